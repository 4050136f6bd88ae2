//! Disc-level criteria: the double-integral norm equivalence, the kernel-ratio
//! condition, and the change-of-variables and norm-expansion identities for
//! separated symbols.

mod balooch_wu;
mod identities;
mod kernel;
mod series;

pub use balooch_wu::{
    balooch_wu_ratio, dirichlet_seminorm_1d, BwEntry, BwIntegrator, BwParams, EquivalenceReport, BW_RESOLUTION,
};
pub use identities::{
    counting_expansion, counting_nodes, pullback_nodes, verify_change_of_variables, verify_separated_norm_expansion,
    ExpansionReport, IdentityReport, TestIntegrand, IDENTITY_RESOLUTION,
};
pub use kernel::{
    bound_from_report, kernel_phi, kernel_ratio_sup, moebius_ratio, operator_norm_bound, KernelGrid,
    KernelRatioQuery, KernelRatioReport,
};
pub use series::{compose_separated, symbol_series, Composition, COMPOSITION_ORDER};
