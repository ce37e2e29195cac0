//! Exact root-of-unity phases `(-1)^r` with rational exponent `r` taken
//! modulo 2.
//!
//! The exponent group is Q/2Z, but `(-1)^{r+1} = -(-1)^r`, so a unique
//! normal form needs the half-turn folded out: the scalar layer keeps the
//! sign on its rational-function part and a stored [`Phase`] either is
//! trivial or has exponent in `(0,1)` with denominator > 1.

use num_rational::Ratio;
use num_traits::Zero;
use std::fmt;

pub type PhaseExp = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Phase {
    r: PhaseExp,
}

impl Phase {
    pub fn trivial() -> Self {
        Phase { r: PhaseExp::zero() }
    }

    /// Split `(-1)^raw` into a sign and a normalised phase with exponent in
    /// `[0,1)`. Returns `(negate, phase)`; `negate` is true when an odd
    /// integer part folds out.
    pub fn decompose(raw: PhaseExp) -> (bool, Phase) {
        let two = PhaseExp::from_integer(2);
        let one = PhaseExp::from_integer(1);
        let mut r = raw % two;
        if r < PhaseExp::zero() {
            r += two;
        }
        let mut negate = false;
        if r >= one {
            r -= one;
            negate = true;
        }
        if r.is_zero() {
            (negate, Phase::trivial())
        } else {
            (negate, Phase { r })
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.r.is_zero()
    }

    pub fn exponent(&self) -> PhaseExp {
        self.r
    }

    /// Multiply two phases; the folded sign is returned separately.
    pub fn mul(&self, other: &Phase) -> (bool, Phase) {
        Phase::decompose(self.r + other.r)
    }

    /// Inverse phase; the folded sign is returned separately.
    pub fn inv_with_sign(&self) -> (bool, Phase) {
        if self.is_trivial() {
            (false, *self)
        } else {
            Phase::decompose(PhaseExp::from_integer(2) - self.r)
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(-1)^{}/{}", self.r.numer(), self.r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> PhaseExp {
        PhaseExp::new(n, d)
    }

    #[test]
    fn integer_exponents_fold_to_signs() {
        assert_eq!(Phase::decompose(r(0, 1)), (false, Phase::trivial()));
        assert_eq!(Phase::decompose(r(1, 1)), (true, Phase::trivial()));
        assert_eq!(Phase::decompose(r(2, 1)), (false, Phase::trivial()));
        assert_eq!(Phase::decompose(r(-3, 1)), (true, Phase::trivial()));
    }

    #[test]
    fn halves_multiply_to_a_sign() {
        let (neg, p) = Phase::decompose(r(1, 2));
        assert!(!neg && p.exponent() == r(1, 2));
        let (neg, p2) = p.mul(&p);
        assert!(neg && p2.is_trivial());
    }

    #[test]
    fn negative_exponent_normalises_into_window() {
        // (-1)^{-1/2} = (-1)^{3/2} = -(-1)^{1/2}
        let (neg, p) = Phase::decompose(r(-1, 2));
        assert!(neg);
        assert_eq!(p.exponent(), r(1, 2));
    }

    #[test]
    fn normal_form_is_unique() {
        // (-1)·(-1)^{3/2} and (+1)·(-1)^{1/2} must decompose identically
        let a = Phase::decompose(r(3, 2));
        let b = Phase::decompose(r(1, 2));
        assert_eq!(a.1, b.1);
        assert!(a.0 && !b.0);
    }

    #[test]
    fn phase_times_inverse_is_one() {
        for raw in [r(1, 2), r(1, 3), r(5, 6), r(7, 4)] {
            let (_, p) = Phase::decompose(raw);
            let (inv_neg, pi) = p.inv_with_sign();
            let (neg, q) = p.mul(&pi);
            assert_eq!(neg ^ inv_neg, false);
            assert!(q.is_trivial());
        }
    }
}
