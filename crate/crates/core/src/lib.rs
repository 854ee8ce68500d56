#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod diffpoly;
pub mod error;
pub mod polyhedral;
pub mod random;
pub mod hahn;
pub mod newton;
pub mod residue;
pub mod rho;
pub mod upoly;

pub use diffpoly::{Coefficient, DiffPolynomial, KDiffPoly, Monomial, MultiIndex, ResidueDiffPoly, SigmaExponent};
pub use error::{Error, Result};
pub use hahn::HahnSeries;
pub use residue::AlgebraicScalar;
pub use rho::{Extended, RhoConstant, RhoRational};
