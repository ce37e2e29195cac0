//! qvertex: an exact symbolic engine for the current realization of the
//! quantum affine algebra of type A, its closed-form comultiplication on
//! currents, the level-one free-field (Fock) representations, and the
//! associated q-vertex operators.
//!
//! Everything is computed over the exact coefficient field of rational
//! functions in `q` (extended by root-of-unity phases); there is no floating
//! point anywhere. Identities between currents and vertex operators are
//! decided either as exact template equalities of normal-ordered exponential
//! operators or coefficient-by-coefficient on graded Fock modules, where each
//! matrix element is a finite exact computation.
//!
//! The crate is organised around the objects it models:
//!
//! - [`scalar`]: rational functions of `q`, phases `(-1)^r`, truncated
//!   Laurent series with fractional exponents, rational-factor expansions and
//!   infinite q-Pochhammer products;
//! - [`lattice`]: the type-A weight lattice, its bilinear pairing, and the
//!   sign-cocycle group algebra on the free basis `α_2, …, α_{n-1}, Λ̄_{n-1}`;
//! - [`fock`]: the Heisenberg algebra, dual boson combinations, level-one
//!   Fock modules and exact matrix-element extraction;
//! - [`vertex`]: normal-ordered exponential operator templates, Wick
//!   contraction, exact mode application and the current constructors;
//! - [`uq`]: the defining-relation suite, the current coproduct / counit /
//!   antipode and the Hopf-axiom suite, the n-dimensional evaluation
//!   representation and its R-matrix intertwining check;
//! - [`intertwiner`]: the four families of vertex operators, their
//!   normalization and exchange-relation (OPE) suites, two-point functions,
//!   and the normal-ordered reconstruction of the currents;
//! - [`report`]: machine-readable suite reports.
//!
//! The `qvertex` binary exposes the suites (`verify`), two-point functions
//! (`corr`) and operator dumps (`dump`); see the crate README and the
//! `examples/` directory for entry points.

pub mod error;
pub mod fock;
pub mod intertwiner;
pub mod lattice;
pub mod report;
pub mod scalar;
pub mod uq;
pub mod vertex;

pub use error::EngineError;

use crate::lattice::WeightLattice;

/// Deliberate single-site perturbations of defining formulas, used by the
/// negative-control tests: each mutation must make its suite fail with a
/// concrete witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Shift the exponent in one exchange function `g_{ij}`.
    GExponent,
    /// Shift the `q^{∓k/2}` weight in the raising-current exponential.
    XPlusCoefShift,
    /// Scale the Heisenberg commutator by an extra q-power.
    BosonCommutator,
    /// Drop the minus sign in the dual-boson expansion at negative modes.
    AstarSign,
    /// Shift the zero mode of `φ` from `q^{-∂}` to `q^{-∂-1}`-like weight.
    PhiZeroMode,
    /// Shift one central-charge power inside the coproduct of `x^+`.
    CoproductShift,
    /// Perturb one rational entry of the two-site R-matrix.
    RmatrixEntry,
    /// Perturb the q-power in one vertex-operator constant.
    VoConstant,
    /// Shift one exchange factor in the vertex-operator OPE list.
    OpeFactor,
    /// Swap the `q^{±1/2}` substitutions in the reconstruction identities.
    ReconstructionSwap,
    /// Shift the boson weight in the type-I vertex-operator exponential.
    VoCoefShift,
}

/// Shared context for one rank parameter `n`: the lattice data plus an
/// optional mutation for negative-control runs.
#[derive(Clone, Debug)]
pub struct Engine {
    n: usize,
    lattice: WeightLattice,
    mutation: Option<Mutation>,
}

impl Engine {
    pub fn new(n: usize) -> Result<Self, EngineError> {
        if n < 2 {
            return Err(EngineError::validation("rank parameter n must be at least 2"));
        }
        Ok(Engine {
            n,
            lattice: WeightLattice::new(n),
            mutation: None,
        })
    }

    pub fn with_mutation(n: usize, mutation: Mutation) -> Result<Self, EngineError> {
        let mut e = Engine::new(n)?;
        e.mutation = Some(mutation);
        Ok(e)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lattice(&self) -> &WeightLattice {
        &self.lattice
    }

    pub fn mutation(&self) -> Option<Mutation> {
        self.mutation
    }

    pub(crate) fn mutated(&self, m: Mutation) -> bool {
        self.mutation == Some(m)
    }
}
