//! Truncated power series on the disc and bidisc and the Dirichlet-type and
//! Bergman norms in coefficient and integral form.
//!
//! Area measure is normalised, `dA = dx dy / pi`; the Bergman weight
//! `(1-|z|^2)^beta dA` is left unnormalised.

mod grid;
mod norms;
mod test_function;

pub use grid::{BergmanWeight, TaylorGrid1D, TaylorGrid2D, WeightPair};
pub(crate) use grid::check_dirichlet_exponent;
pub use norms::{
    abs2_integral_1d, abs2_integral_2d, abs2_tensor, bergman_norm, dirichlet_energy_integral,
    dirichlet_norm_coeff, energy_parts, log_energy_parts, EnergyParts,
};
pub use test_function::{test_function, DEFAULT_TEST_ORDER};
