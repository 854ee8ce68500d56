//! The residue field: the algebraic closure of the rationals, carrying the
//! identity as its induced automorphism.

mod algebraic;
pub(crate) mod field;
pub(crate) mod isolate;
pub mod kpoly;
pub(crate) mod qpoly;

pub use algebraic::AlgebraicScalar;
pub use isolate::Rect;
pub use kpoly::{roots_univariate, roots_with_multiplicity, KPoly};
pub mod oracle;
pub use oracle::{ConjugationField, IdentityField, ResidueField};
