//! Exact rational functions in `q`: quotients of integer Laurent polynomials
//! in reduced normal form.
//!
//! Normal form: numerator and denominator share no polynomial or integer
//! factor, the denominator has lowest exponent 0 and positive leading
//! coefficient. This makes equality structural.

use super::poly::{LaurentPoly, QExp};
use crate::error::EngineError;
use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QRat {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl QRat {
    fn normalized(num: LaurentPoly, den: LaurentPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return QRat { num, den: LaurentPoly::one() };
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g), den.div_exact(&g))
        };
        // remaining integer content
        let cg = {
            let cn = num.content();
            let cd = den.content();
            let mut a = cn;
            let mut b = cd;
            while !b.is_zero() {
                let t = &a % &b;
                a = b;
                b = t;
            }
            a.abs()
        };
        if !cg.is_one() {
            num = num.div_content(&cg);
            den = den.div_content(&cg);
        }
        // unit normalisation of the denominator: q^{low} and sign move to num
        let low = den.low().unwrap();
        if !low.is_zero() {
            den = den.shift(-low);
            num = num.shift(-low);
        }
        if den.leading_coef().unwrap().is_negative() {
            den = den.neg();
            num = num.neg();
        }
        QRat { num, den }
    }

    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Self {
        Self::normalized(num, den)
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        QRat { num: p, den: LaurentPoly::one() }
    }

    pub fn zero() -> Self {
        Self::from_poly(LaurentPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(LaurentPoly::one())
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_poly(LaurentPoly::from_int(c))
    }

    /// Exact rational constant `a/b`.
    pub fn from_ratio(r: Ratio<i64>) -> Self {
        Self::normalized(
            LaurentPoly::from_int(*r.numer()),
            LaurentPoly::from_int(*r.denom()),
        )
    }

    /// `q^e`.
    pub fn q_pow(e: QExp) -> Self {
        Self::from_poly(LaurentPoly::q_pow(e))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::normalized(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        QRat { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::normalized(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn inv(&self) -> Result<Self, EngineError> {
        if self.is_zero() {
            return Err(EngineError::domain("inversion of zero"));
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Result<Self, EngineError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<Self, EngineError> {
        if k == 0 {
            return Ok(Self::one());
        }
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut out = Self::one();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    /// q-adic expansion of the value up to `q^order` (exclusive); test oracle.
    pub fn q_series(&self, order: i64) -> BTreeMap<QExp, Ratio<BigInt>> {
        let rec = self.den.recip_series(order + 8);
        let mut out: BTreeMap<QExp, Ratio<BigInt>> = BTreeMap::new();
        let bound = QExp::from_integer(order);
        for (e, c) in self.num.terms() {
            for (re, rc) in &rec {
                let ee = e + re;
                if ee < bound {
                    let v = rc * Ratio::from_integer(c.clone());
                    *out.entry(ee)
                        .or_insert_with(|| Ratio::from_integer(BigInt::zero())) += v;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }
}

/// The symmetric q-integer `[k] = (q^k - q^{-k})/(q - q^{-1})`, expanded to
/// the Laurent polynomial `q^{k-1} + q^{k-3} + … + q^{1-k}` for k > 0, with
/// `[-k] = -[k]`.
pub fn qint(k: i64) -> QRat {
    assert!(k != 0, "q-integer [0] is outside the domain");
    let s = k.signum();
    let k = k.abs();
    let mut p = LaurentPoly::zero();
    let mut e = QExp::from_integer(1 - k);
    for _ in 0..k {
        p = p.add(&LaurentPoly::q_pow(e));
        e += QExp::from_integer(2);
    }
    if s < 0 {
        p = p.neg();
    }
    QRat::from_poly(p)
}

/// `q - q^{-1}`.
pub fn q_minus_qinv() -> QRat {
    QRat::from_poly(
        LaurentPoly::q_pow(QExp::one()).sub(&LaurentPoly::q_pow(-QExp::one())),
    )
}

impl fmt::Display for QRat {
    /// `(num)/(den)` in the monomial-sum format of [`LaurentPoly`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {}", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::poly::qexp;

    #[test]
    fn qint_small_values() {
        assert_eq!(qint(1), QRat::one());
        let q = QRat::q_pow(QExp::one());
        let qi = QRat::q_pow(-QExp::one());
        assert_eq!(qint(2), q.add(&qi));
        assert_eq!(
            qint(3),
            QRat::q_pow(QExp::from_integer(2))
                .add(&QRat::one())
                .add(&QRat::q_pow(QExp::from_integer(-2)))
        );
        assert_eq!(qint(-3), qint(3).neg());
    }

    #[test]
    fn qint_matches_defining_quotient() {
        for k in [-6i64, -2, -1, 1, 2, 5, 6] {
            let lhs = qint(k);
            let num = QRat::q_pow(QExp::from_integer(k))
                .sub(&QRat::q_pow(QExp::from_integer(-k)));
            let rhs = num.div(&q_minus_qinv()).unwrap();
            assert_eq!(lhs, rhs, "[{k}]");
        }
    }

    #[test]
    fn field_identities_on_fixed_samples() {
        let samples = [
            QRat::q_pow(qexp(1, 2)),
            qint(2),
            qint(3).sub(&QRat::from_int(1)),
            QRat::new(
                LaurentPoly::q_pow(QExp::one()).add(&LaurentPoly::one()),
                LaurentPoly::q_pow(QExp::from_integer(2)).sub(&LaurentPoly::from_int(3)),
            ),
        ];
        for a in &samples {
            for b in &samples {
                for c in &samples {
                    let lhs = a.mul(&b.add(c));
                    let rhs = a.mul(b).add(&a.mul(c));
                    assert_eq!(lhs, rhs);
                }
                // (a+b)-b = a and (a*b)/b = a
                assert_eq!(a.add(b).sub(b), *a);
                if !b.is_zero() {
                    assert_eq!(a.mul(b).div(b).unwrap(), *a);
                }
            }
        }
    }

    #[test]
    fn inversion_of_zero_is_rejected() {
        assert!(QRat::zero().inv().is_err());
    }

    #[test]
    fn q_series_oracle_geometric() {
        // 1/(1-q) = 1 + q + q^2 + ...
        let f = QRat::new(
            LaurentPoly::one(),
            LaurentPoly::one().sub(&LaurentPoly::q_pow(QExp::one())),
        );
        let s = f.q_series(5);
        for e in 0..5 {
            assert!(s.get(&QExp::from_integer(e)).unwrap().is_one());
        }
    }
}
