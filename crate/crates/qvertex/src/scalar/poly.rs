//! Sparse Laurent polynomials in the deformation parameter `q`, with exact
//! arbitrary-precision integer coefficients and rational exponents.
//!
//! Exponents are rationals rather than integers because the engine works with
//! objects such as `q^{1/2}` shifts and fractional eigenvalues of weight
//! operators; all exponents produced by the engine for rank parameter `n`
//! have denominator dividing `2n`.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Exponent of `q`: an exact rational number.
pub type QExp = Ratio<i64>;

pub fn qexp(num: i64, den: i64) -> QExp {
    Ratio::new(num, den)
}

/// `Σ c_e · q^e` with finitely many nonzero integer coefficients `c_e`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<QExp, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(QExp::zero(), BigInt::one())
    }

    pub fn monomial(exp: QExp, coef: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert(exp, coef);
        }
        LaurentPoly { terms }
    }

    pub fn from_int(c: i64) -> Self {
        Self::monomial(QExp::zero(), BigInt::from(c))
    }

    /// `q^e`.
    pub fn q_pow(e: QExp) -> Self {
        Self::monomial(e, BigInt::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&QExp::zero())
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&QExp, &BigInt)> {
        self.terms.iter()
    }

    /// Lowest exponent, if nonzero.
    pub fn low(&self) -> Option<QExp> {
        self.terms.keys().next().copied()
    }

    /// Highest exponent, if nonzero.
    pub fn high(&self) -> Option<QExp> {
        self.terms.keys().next_back().copied()
    }

    pub fn leading_coef(&self) -> Option<&BigInt> {
        self.terms.values().next_back()
    }

    pub fn coef(&self, e: QExp) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_else(BigInt::zero)
    }

    fn insert_add(&mut self, e: QExp, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_add(*e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.insert_add(e1 + e2, c1 * c2);
            }
        }
        out
    }

    pub fn mul_int(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }

    /// Multiply by the unit `q^e`.
    pub fn shift(&self, e: QExp) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(k, c)| (k + e, c.clone())).collect(),
        }
    }

    /// Positive gcd of the integer coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = gcd_bigint(&g, c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn div_content(&self, g: &BigInt) -> Self {
        if g.is_one() {
            return self.clone();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, c / g)).collect(),
        }
    }

    /// Exact division; panics if `d` does not divide `self` exactly.
    /// Only called on multiples produced by the gcd routine.
    pub fn div_exact(&self, d: &Self) -> Self {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut rem = self.clone();
        let mut quot = LaurentPoly::zero();
        let d_high = d.high().unwrap();
        let d_lead = d.leading_coef().unwrap().clone();
        while !rem.is_zero() {
            let r_high = rem.high().unwrap();
            let e = r_high - d_high;
            let c = rem.leading_coef().unwrap() / &d_lead;
            assert!(
                !c.is_zero() && (&c * &d_lead) == *rem.leading_coef().unwrap(),
                "inexact polynomial division"
            );
            let t = LaurentPoly::monomial(e, c);
            rem = rem.sub(&t.mul(d));
            quot = quot.add(&t);
        }
        quot
    }

    /// Gcd over Z[q^{±}] up to units; result has lowest exponent 0, positive
    /// leading coefficient, and carries the coefficient content gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.unit_normal();
        }
        if other.is_zero() {
            return self.unit_normal();
        }
        let ca = self.content();
        let cb = other.content();
        let cg = gcd_bigint(&ca, &cb);
        let pa = self.div_content(&ca).align_low();
        let pb = other.div_content(&cb).align_low();
        let pg = primitive_gcd(pa, pb);
        pg.mul_int(&cg)
    }

    /// Shift so the lowest exponent is 0.
    fn align_low(&self) -> Self {
        match self.low() {
            Some(l) => self.shift(-l),
            None => self.clone(),
        }
    }

    /// Unit normalisation: lowest exponent 0, positive leading coefficient.
    pub fn unit_normal(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let p = self.align_low();
        if p.leading_coef().unwrap().is_negative() {
            p.neg()
        } else {
            p
        }
    }

    /// Expand `1/self` as a power series in q up to `q^order` (exclusive),
    /// starting at `q^{-low}`. Used by test oracles for q-adic comparison.
    pub fn recip_series(&self, order: i64) -> BTreeMap<QExp, Ratio<BigInt>> {
        assert!(!self.is_zero());
        let low = self.low().unwrap();
        let p = self.align_low();
        let c0 = Ratio::from_integer(p.coef(QExp::zero()));
        assert!(!c0.is_zero());
        let mut out: BTreeMap<QExp, Ratio<BigInt>> = BTreeMap::new();
        // long division on the exponent lattice of p
        let mut exps: Vec<QExp> = vec![QExp::zero()];
        // lattice step: gcd of exponent denominators -> iterate over multiples
        let den = p
            .terms
            .keys()
            .map(|e| *e.denom())
            .fold(1i64, num_integer_lcm);
        let step = QExp::new(1, den);
        let bound = QExp::from_integer(order);
        let mut e = step;
        while e < bound {
            exps.push(e);
            e += step;
        }
        for &e in &exps {
            let mut acc = if e.is_zero() {
                Ratio::from_integer(BigInt::one())
            } else {
                Ratio::from_integer(BigInt::zero())
            };
            for (pe, pc) in p.terms() {
                if *pe > QExp::zero() && *pe <= e {
                    if let Some(prev) = out.get(&(e - pe)) {
                        acc -= prev * Ratio::from_integer(pc.clone());
                    }
                }
            }
            out.insert(e, acc / c0.clone());
        }
        // shift by -low
        out.into_iter().map(|(e, c)| (e - low, c)).collect()
    }
}

fn num_integer_lcm(a: i64, b: i64) -> i64 {
    let g = num_integer_gcd(a, b);
    (a / g) * b
}

fn num_integer_gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    if a == 0 {
        1
    } else {
        a
    }
}

fn gcd_bigint(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let t = &a % &b;
        a = b;
        b = t;
    }
    a
}

/// Primitive-PRS gcd of two primitive polynomials with lowest exponent 0.
fn primitive_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly {
    let (mut r0, mut r1) = if a.high().unwrap() >= b.high().unwrap() {
        (a, b)
    } else {
        (b, a)
    };
    loop {
        if r1.is_zero() {
            let c = r0.content();
            return r0.div_content(&c).unit_normal();
        }
        let r2 = pseudo_rem(&r0, &r1);
        let r2 = if r2.is_zero() {
            r2
        } else {
            let c = r2.content();
            r2.div_content(&c).unit_normal()
        };
        r0 = r1;
        r1 = r2;
    }
}

/// Pseudo-remainder of `a` by `b` (both with lowest exponent 0).
fn pseudo_rem(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    let mut r = a.clone();
    let db = b.high().unwrap();
    let lb = b.leading_coef().unwrap().clone();
    while !r.is_zero() && r.high().unwrap() >= db {
        let e = r.high().unwrap() - db;
        let lr = r.leading_coef().unwrap().clone();
        r = r.mul_int(&lb).sub(&b.mul(&LaurentPoly::monomial(e, lr)));
    }
    r
}

impl fmt::Display for LaurentPoly {
    /// Terms ascending by exponent, each as `c*q^e`, joined by ` + `.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0*q^0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if e.is_integer() {
                write!(f, "{}*q^{}", c, e.numer())?;
            } else {
                write!(f, "{}*q^{}/{}", c, e.numer(), e.denom())?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(pairs: &[(i64, i64)]) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for &(e, c) in pairs {
            out = out.add(&LaurentPoly::monomial(QExp::from_integer(e), BigInt::from(c)));
        }
        out
    }

    #[test]
    fn mul_and_gcd_of_cyclotomic_like_factors() {
        // (q^4 - 1) and (q^2 - 1) share the factor (q^2 - 1)
        let a = p(&[(4, 1), (0, -1)]);
        let b = p(&[(2, 1), (0, -1)]);
        let g = a.gcd(&b);
        assert_eq!(g, b.unit_normal());
        let q = a.div_exact(&g);
        assert_eq!(q, p(&[(2, 1), (0, 1)]));
    }

    #[test]
    fn gcd_with_fractional_exponents() {
        // q^{1/2}(q - 1) vs (q - 1)
        let a = p(&[(1, 1), (0, -1)]).shift(qexp(1, 2));
        let b = p(&[(1, 1), (0, -1)]);
        let g = a.gcd(&b);
        assert_eq!(g, b.unit_normal());
    }

    #[test]
    fn unit_normal_fixes_sign_and_offset() {
        let a = p(&[(3, -2), (1, 4)]);
        let n = a.unit_normal();
        assert_eq!(n, p(&[(2, 2), (0, -4)]));
        assert!(n.leading_coef().unwrap() > &BigInt::zero());
        assert_eq!(n.low(), Some(QExp::zero()));
    }

    #[test]
    fn recip_series_of_one_minus_q() {
        let a = p(&[(0, 1), (1, -1)]);
        let s = a.recip_series(4);
        for e in 0..4 {
            assert_eq!(
                s.get(&QExp::from_integer(e)).unwrap(),
                &Ratio::from_integer(BigInt::one())
            );
        }
    }
}
