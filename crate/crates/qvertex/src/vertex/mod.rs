//! Normal-ordered exponential operator templates, current constructors,
//! and the coefficient-wise relation evaluator.

pub mod currents;
pub mod relations;
pub mod template;

pub use currents::CurrentKind;
pub use template::{contract, normal_ordered, template_diff, template_eq, VertexTemplate};
