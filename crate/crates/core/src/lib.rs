//! Numerical realisation of boundedness criteria for composition operators on
//! Dirichlet-type spaces of the disc and bidisc and from the Dirichlet space
//! of the bidisc into weighted Bergman spaces.
//!
//! Every verdict produced here is evidence gathered on finite grids, never a
//! proof.

// `!(x > 0.0)` is used on purpose so that NaN is rejected with the rest
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod capacity;
pub mod carleson;
pub mod criteria;
pub mod error;
pub mod numeric;
pub mod nevanlinna;
pub mod quadrature;
pub mod report;
pub mod symbols;

pub use analytic::{BergmanWeight, TaylorGrid1D, TaylorGrid2D, WeightPair};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use quadrature::{Estimate, QuadratureRule, RadialWeight, Resolution};
pub use symbols::{BidiscSymbol, DiscSymbol, Preimage};
