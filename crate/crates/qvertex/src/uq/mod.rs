//! Algebra-level verification: defining relations, Hopf structure, the
//! evaluation representation and its R-matrix.

pub mod coproduct;
pub mod hopf;
pub mod relations_suite;
pub mod vecrep;

pub use relations_suite::{defining_relations, generator_image, ImageKind};
