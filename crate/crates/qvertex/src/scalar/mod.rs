//! Exact coefficient arithmetic: rational functions in `q`, root-of-unity
//! phases, and truncated Laurent series with fractional exponents.

pub mod phase;
pub mod pochhammer;
pub mod poly;
pub mod qrat;
pub mod ratfn;
pub mod series;

pub use phase::{Phase, PhaseExp};
pub use pochhammer::pochhammer_series;
pub use poly::{qexp, LaurentPoly, QExp};
pub use qrat::{q_minus_qinv, qint, QRat};
pub use ratfn::RatFunc;
pub use series::FracLaurentSeries;

use crate::error::EngineError;
use std::fmt;

/// A scalar of the engine: a rational function of `q` together with an exact
/// phase `(-1)^r`, `r` rational mod 2. The zero scalar always carries the
/// trivial phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scalar {
    value: QRat,
    phase: Phase,
}

impl Scalar {
    pub fn new(value: QRat, raw_phase: PhaseExp) -> Self {
        let (neg, phase) = Phase::decompose(raw_phase);
        let value = if neg { value.neg() } else { value };
        if value.is_zero() {
            Scalar { value, phase: Phase::trivial() }
        } else {
            Scalar { value, phase }
        }
    }

    pub fn from_qrat(value: QRat) -> Self {
        if value.is_zero() {
            return Scalar::zero();
        }
        Scalar { value, phase: Phase::trivial() }
    }

    pub fn zero() -> Self {
        Scalar { value: QRat::zero(), phase: Phase::trivial() }
    }

    pub fn one() -> Self {
        Scalar { value: QRat::one(), phase: Phase::trivial() }
    }

    pub fn from_int(c: i64) -> Self {
        Scalar::from_qrat(QRat::from_int(c))
    }

    pub fn q_pow(e: QExp) -> Self {
        Scalar::from_qrat(QRat::q_pow(e))
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one() && self.phase.is_trivial()
    }

    pub fn value(&self) -> &QRat {
        &self.value
    }

    pub fn phase(&self) -> &Phase {
        &self.phase
    }

    pub fn has_trivial_phase(&self) -> bool {
        self.phase.is_trivial()
    }

    pub fn neg(&self) -> Self {
        Scalar { value: self.value.neg(), phase: self.phase }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (neg, phase) = self.phase.mul(&other.phase);
        let mut value = self.value.mul(&other.value);
        if neg {
            value = value.neg();
        }
        if value.is_zero() {
            Scalar::zero()
        } else {
            Scalar { value, phase }
        }
    }

    pub fn mul_qrat(&self, c: &QRat) -> Self {
        let value = self.value.mul(c);
        if value.is_zero() {
            Scalar::zero()
        } else {
            Scalar { value, phase: self.phase }
        }
    }

    /// Multiply by `(-1)^r`.
    pub fn mul_phase(&self, raw: PhaseExp) -> Self {
        if self.is_zero() {
            return Scalar::zero();
        }
        let (neg, phase) = Phase::decompose(self.phase.exponent() + raw);
        let value = if neg { self.value.neg() } else { self.value.clone() };
        Scalar { value, phase }
    }

    /// Addition is defined only between scalars whose phases agree (or when
    /// one side is zero); distinct nontrivial phases are rejected.
    pub fn add(&self, other: &Self) -> Result<Self, EngineError> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.phase != other.phase {
            return Err(EngineError::phase_sum(format!(
                "{} + {}",
                self.phase, other.phase
            )));
        }
        let value = self.value.add(&other.value);
        if value.is_zero() {
            Ok(Scalar::zero())
        } else {
            Ok(Scalar { value, phase: self.phase })
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, EngineError> {
        self.add(&other.neg())
    }

    pub fn inv(&self) -> Result<Self, EngineError> {
        let (neg, phase) = self.phase.inv_with_sign();
        let mut value = self.value.inv()?;
        if neg {
            value = value.neg();
        }
        Ok(Scalar { value, phase })
    }

    pub fn div(&self, other: &Self) -> Result<Self, EngineError> {
        Ok(self.mul(&other.inv()?))
    }
}

impl fmt::Display for Scalar {
    /// `(-1)^a/b | (num)/(den)`; the phase field is printed even when trivial
    /// so that dump lines stay column-aligned.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} | {}", self.phase, self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use num_traits::One;

    fn half() -> PhaseExp {
        Ratio::new(1, 2)
    }

    #[test]
    fn phase_exponents_add_under_multiplication() {
        // (q, (-1)^{1/2}) * (q^{-1}, (-1)^{1/2}) = (-1, trivial)
        let a = Scalar::new(QRat::q_pow(QExp::one()), half());
        let b = Scalar::new(QRat::q_pow(-QExp::one()), half());
        let p = a.mul(&b);
        assert_eq!(p, Scalar::from_int(-1));
        assert!(p.has_trivial_phase());
    }

    #[test]
    fn inverse_of_q_minus_qinv() {
        let a = Scalar::from_qrat(q_minus_qinv());
        let inv = a.inv().unwrap();
        assert!(a.mul(&inv).is_one());
    }

    #[test]
    fn qint_two_equals_q_plus_qinv() {
        let lhs = Scalar::from_qrat(QRat::q_pow(QExp::one()).add(&QRat::q_pow(-QExp::one())));
        let rhs = Scalar::from_qrat(qint(2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn mixed_phase_addition_is_rejected() {
        let a = Scalar::new(QRat::one(), half());
        let b = Scalar::one();
        assert!(matches!(a.add(&b), Err(EngineError::PhaseSum(_))));
        // but adding across a zero is fine
        assert_eq!(a.add(&Scalar::zero()).unwrap(), a);
    }

    #[test]
    fn zero_scalar_has_trivial_phase() {
        let a = Scalar::new(QRat::one(), half());
        let d = a.sub(&a).unwrap();
        assert!(d.is_zero() && d.has_trivial_phase());
    }
}
