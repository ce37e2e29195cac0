//! Engine-wide error type.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EngineError {
    /// Mathematical domain violation (division by zero, pole at the
    /// expansion point, sector mismatch, …).
    Domain(String),
    /// Sum of scalars carrying distinct nontrivial root-of-unity phases.
    /// Such sums never arise from well-formed computations, so they are
    /// rejected instead of being embedded in a larger coefficient field.
    PhaseSum(String),
    /// Malformed input to a verification suite or constructor.
    Validation(String),
}

impl EngineError {
    pub fn domain(msg: impl Into<String>) -> Self {
        EngineError::Domain(msg.into())
    }

    pub fn phase_sum(msg: impl Into<String>) -> Self {
        EngineError::PhaseSum(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        EngineError::Validation(msg.into())
    }
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::Domain(m) => write!(f, "domain error: {m}"),
            EngineError::PhaseSum(m) => write!(f, "unsupported sum of phases: {m}"),
            EngineError::Validation(m) => write!(f, "validation error: {m}"),
        }
    }
}

impl std::error::Error for EngineError {}
