//! Rational functions of one formal variable with [`QRat`] coefficients, and
//! their truncated expansions about `x = 0` or `x = ∞`.
//!
//! These carry the exchange factors appearing in the current relations,
//! the diagonal actions on the vector representation, and the R-matrix
//! entries. The expansion direction is always an explicit argument: the same
//! rational function expands to different formal series in the two regimes.

use super::{FracLaurentSeries, QExp, QRat, Scalar};
use crate::error::EngineError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    /// Coefficients of `x^0, x^1, …`.
    num: Vec<QRat>,
    den: Vec<QRat>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    AtZero,
    AtInfinity,
}

fn trim(mut v: Vec<QRat>) -> Vec<QRat> {
    while v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
    v
}

impl RatFunc {
    pub fn new(num: Vec<QRat>, den: Vec<QRat>) -> Self {
        let den = trim(den);
        assert!(!den.is_empty(), "zero denominator polynomial");
        RatFunc { num: trim(num), den }
    }

    pub fn poly(num: Vec<QRat>) -> Self {
        RatFunc::new(num, vec![QRat::one()])
    }

    pub fn one() -> Self {
        Self::poly(vec![QRat::one()])
    }

    /// `(a·x + b)/(c·x + d)` given as constant/linear coefficients.
    pub fn linear_frac(b: QRat, a: QRat, d: QRat, c: QRat) -> Self {
        RatFunc::new(vec![b, a], vec![d, c])
    }

    pub fn recip(&self) -> Result<Self, EngineError> {
        if self.num.is_empty() {
            return Err(EngineError::domain("reciprocal of the zero function"));
        }
        Ok(RatFunc { num: self.den.clone(), den: self.num.clone() })
    }

    pub fn mul(&self, other: &Self) -> Self {
        RatFunc::new(
            poly_mul(&self.num, &other.num),
            poly_mul(&self.den, &other.den),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = poly_add(
            &poly_mul(&self.num, &other.den),
            &poly_mul(&other.num, &self.den),
        );
        RatFunc::new(num, poly_mul(&self.den, &other.den))
    }

    pub fn scale(&self, c: &QRat) -> Self {
        RatFunc::new(
            self.num.iter().map(|a| a.mul(c)).collect(),
            self.den.clone(),
        )
    }

    pub fn neg(&self) -> Self {
        self.scale(&QRat::from_int(-1))
    }

    /// Equality as rational functions, by cross multiplication.
    pub fn equiv(&self, other: &Self) -> bool {
        trim(poly_mul(&self.num, &other.den)) == trim(poly_mul(&other.num, &self.den))
    }

    /// `x^k` as a rational function (negative `k` puts the power below).
    pub fn monomial(c: QRat, k: i64) -> Self {
        let mut num = vec![QRat::zero(); k.max(0) as usize];
        num.push(c);
        let mut den = vec![QRat::zero(); (-k).max(0) as usize];
        den.push(QRat::one());
        RatFunc::new(num, den)
    }

    /// Substitute `x -> c·x` (or `x -> c/x` when `inverse` is set).
    pub fn subst_monomial(&self, c: &QRat, inverse: bool) -> Self {
        let scale_coeffs = |v: &[QRat]| -> Vec<QRat> {
            let mut pow = QRat::one();
            v.iter()
                .map(|a| {
                    let out = a.mul(&pow);
                    pow = pow.mul(c);
                    out
                })
                .collect()
        };
        let num = scale_coeffs(&self.num);
        let den = scale_coeffs(&self.den);
        if !inverse {
            return RatFunc::new(num, den);
        }
        // f(c/x) = x^{deg_den - deg_num} · rev(num)/rev(den)
        let mut rnum: Vec<QRat> = num.into_iter().rev().collect();
        let mut rden: Vec<QRat> = den.into_iter().rev().collect();
        let shift = rden.len() as i64 - rnum.len() as i64;
        if shift > 0 {
            let mut padded = vec![QRat::zero(); shift as usize];
            padded.append(&mut rnum);
            rnum = padded;
        } else if shift < 0 {
            let mut padded = vec![QRat::zero(); (-shift) as usize];
            padded.append(&mut rden);
            rden = padded;
        }
        RatFunc::new(rnum, rden)
    }

    /// Truncated Laurent expansion about `x = 0`, allowing a pole there:
    /// the principal part is returned as negative exponents.
    pub fn expand_laurent(
        &self,
        var: impl Into<String>,
        order: i64,
    ) -> Result<FracLaurentSeries, EngineError> {
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        if num.iter().all(|c| c.is_zero()) {
            return Ok(FracLaurentSeries::zero(var, QExp::from_integer(order)));
        }
        let vn = num.iter().position(|c| !c.is_zero()).unwrap();
        let vd = den.iter().position(|c| !c.is_zero()).unwrap();
        num.drain(..vn);
        den.drain(..vd);
        let shift = vn as i64 - vd as i64;
        let inner = RatFunc::new(num, den)
            .expand(Direction::AtZero, "t", order + shift.abs() + 1)?;
        let mut out = FracLaurentSeries::zero(var, QExp::from_integer(order));
        for (e, c) in inner.terms() {
            out.set(e + QExp::from_integer(shift), c.clone());
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn num_coeffs(&self) -> &[QRat] {
        &self.num
    }

    pub fn den_coeffs(&self) -> &[QRat] {
        &self.den
    }

    /// Value at a point; the denominator must not vanish there.
    pub fn eval(&self, x: &QRat) -> Result<QRat, EngineError> {
        let n = poly_eval(&self.num, x);
        let d = poly_eval(&self.den, x);
        n.div(&d)
    }

    /// Cancel the common factor of numerator and denominator (Euclidean gcd
    /// over the coefficient field), normalising the denominator to be monic
    /// in its leading coefficient.
    pub fn reduced(&self) -> Self {
        if self.num.is_empty() {
            return RatFunc::poly(vec![]);
        }
        let g = poly_gcd_field(self.num.clone(), self.den.clone());
        let num = poly_div_exact(&self.num, &g);
        let den = poly_div_exact(&self.den, &g);
        let lead = den.last().expect("nonzero denominator").clone();
        let inv = lead.inv().expect("leading coefficient nonzero");
        RatFunc::new(
            num.iter().map(|c| c.mul(&inv)).collect(),
            den.iter().map(|c| c.mul(&inv)).collect(),
        )
    }
}

fn poly_eval(p: &[QRat], x: &QRat) -> QRat {
    let mut acc = QRat::zero();
    for c in p.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

/// Divide by `(x - root)`, exactly; `None` when the division has remainder.
pub fn poly_divide_root(p: &[QRat], root: &QRat) -> Option<Vec<QRat>> {
    if p.is_empty() {
        return Some(Vec::new());
    }
    let mut out = vec![QRat::zero(); p.len() - 1];
    let mut carry = QRat::zero();
    for i in (0..p.len()).rev() {
        let c = p[i].add(&carry);
        if i == 0 {
            if c.is_zero() {
                return Some(out);
            }
            return None;
        }
        out[i - 1] = c.clone();
        carry = c.mul(root);
    }
    unreachable!()
}

fn poly_gcd_field(a: Vec<QRat>, b: Vec<QRat>) -> Vec<QRat> {
    let mut a = trim(a);
    let mut b = trim(b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b);
        a = b;
        b = trim(r);
    }
    if a.is_empty() {
        vec![QRat::one()]
    } else {
        let lead = a.last().unwrap().inv().expect("nonzero lead");
        a.iter().map(|c| c.mul(&lead)).collect()
    }
}

fn poly_rem(a: &[QRat], b: &[QRat]) -> Vec<QRat> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b.last().unwrap();
    while r.len() > db && !r.is_empty() {
        let lr = r.last().unwrap().clone();
        if lr.is_zero() {
            r.pop();
            continue;
        }
        let f = lr.div(lead).expect("nonzero lead");
        let shift = r.len() - 1 - db;
        for (i, c) in b.iter().enumerate() {
            let t = r[shift + i].sub(&c.mul(&f));
            r[shift + i] = t;
        }
        r.pop();
    }
    r
}

fn poly_div_exact(a: &[QRat], d: &[QRat]) -> Vec<QRat> {
    // long division, exact by construction
    let mut r = a.to_vec();
    let dd = d.len() - 1;
    let lead = d.last().unwrap();
    let mut q = vec![QRat::zero(); a.len().saturating_sub(dd)];
    while trim(r.clone()).len() > dd {
        let lr = r.last().unwrap().clone();
        if lr.is_zero() {
            r.pop();
            continue;
        }
        let f = lr.div(lead).expect("nonzero lead");
        let shift = r.len() - 1 - dd;
        q[shift] = f.clone();
        for (i, c) in d.iter().enumerate() {
            let t = r[shift + i].sub(&c.mul(&f));
            r[shift + i] = t;
        }
        r.pop();
    }
    q
}

impl RatFunc {
    /// Truncated expansion in the requested direction, with the requested
    /// number of known exponents. `AtZero` yields a series in `var = x`;
    /// `AtInfinity` yields a series in `var = 1/x` (ascending exponents of
    /// the reciprocal variable).
    pub fn expand(
        &self,
        dir: Direction,
        var: impl Into<String>,
        order: i64,
    ) -> Result<FracLaurentSeries, EngineError> {
        assert!(order >= 1, "expansion order must be at least 1");
        match dir {
            Direction::AtZero => self.expand_at_zero(var, order),
            Direction::AtInfinity => self.reversed().expand_at_zero(var, order),
        }
    }

    /// Substitute `x -> 1/y`, clearing denominators: `f(1/y) = y^{d_den-d_num}
    /// · rev(num)(y)/rev(den)(y)` folded into one rational function times a
    /// monomial; the monomial is absorbed by padding with zero coefficients
    /// or, for negative shifts, kept in the numerator valuation.
    fn reversed(&self) -> ReversedRatFunc {
        let mut num: Vec<QRat> = self.num.iter().rev().cloned().collect();
        let den: Vec<QRat> = self.den.iter().rev().cloned().collect();
        let shift = self.den.len() as i64 - self.num.len() as i64;
        if shift > 0 {
            let mut padded = vec![QRat::zero(); shift as usize];
            padded.append(&mut num);
            ReversedRatFunc { f: RatFunc::new(padded, den), shift: 0 }
        } else {
            ReversedRatFunc { f: RatFunc::new(num, den), shift }
        }
    }

    fn expand_at_zero(
        &self,
        var: impl Into<String>,
        order: i64,
    ) -> Result<FracLaurentSeries, EngineError> {
        ReversedRatFunc { f: self.clone(), shift: 0 }.expand_at_zero(var, order)
    }
}

struct ReversedRatFunc {
    f: RatFunc,
    /// Extra power of the expansion variable, `x^shift` (may be negative).
    shift: i64,
}

impl ReversedRatFunc {
    fn expand_at_zero(
        &self,
        var: impl Into<String>,
        order: i64,
    ) -> Result<FracLaurentSeries, EngineError> {
        let mut num = self.f.num.clone();
        let mut den = self.f.den.clone();
        // cancel a common power of x
        let vn = num.iter().position(|c| !c.is_zero());
        let vd = den.iter().position(|c| !c.is_zero()).unwrap();
        let cancel = match vn {
            Some(vn) => vn.min(vd),
            None => vd,
        };
        num.drain(..cancel.min(num.len()));
        den.drain(..cancel);
        let vd = den.iter().position(|c| !c.is_zero()).unwrap();
        if vd > 0 {
            return Err(EngineError::domain(
                "pole at the expansion point of a rational factor",
            ));
        }
        let d0 = den[0].inv()?;
        let var = var.into();
        let order_exp = QExp::from_integer(order + self.shift);
        let mut out = FracLaurentSeries::zero(var, order_exp);
        let mut coefs: Vec<QRat> = Vec::with_capacity(order as usize);
        for k in 0..order as usize {
            let mut acc = num.get(k).cloned().unwrap_or_else(QRat::zero);
            for j in 0..k {
                if let Some(dc) = den.get(k - j) {
                    acc = acc.sub(&coefs[j].mul(dc));
                }
            }
            let c = acc.mul(&d0);
            if !c.is_zero() {
                out.set(
                    QExp::from_integer(k as i64 + self.shift),
                    Scalar::from_qrat(c.clone()),
                );
            }
            coefs.push(c);
        }
        Ok(out)
    }
}

fn poly_add(a: &[QRat], b: &[QRat]) -> Vec<QRat> {
    let mut out = vec![QRat::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] = out[i].add(c);
    }
    for (i, c) in b.iter().enumerate() {
        out[i] = out[i].add(c);
    }
    out
}

fn poly_mul(a: &[QRat], b: &[QRat]) -> Vec<QRat> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![QRat::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&ca.mul(cb));
        }
    }
    out
}
