//! Holomorphic self-maps of the disc and bidisc.

mod bidisc;
mod disc;
pub mod roots;

pub use bidisc::{BidiscSpec, BidiscSymbol};
pub use disc::{
    moebius, DiscSymbol, Preimage, SymbolSpec, BOUNDARY_TOL, PREIMAGE_RESIDUAL, VALIDATION_POINTS,
    VALIDATION_RADIUS, VALIDATION_SLACK,
};
