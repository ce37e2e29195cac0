//! Truncated Laurent series in one formal variable with rational exponents
//! and [`Scalar`] coefficients.
//!
//! A series knows everything below its truncation order `O` and nothing at or
//! above it. Arithmetic propagates orders pessimistically so that chained
//! operations never claim more precision than they have.

use super::{QExp, Scalar};
use crate::error::EngineError;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracLaurentSeries {
    var: String,
    terms: BTreeMap<QExp, Scalar>,
    order: QExp,
}

impl FracLaurentSeries {
    pub fn zero(var: impl Into<String>, order: QExp) -> Self {
        FracLaurentSeries { var: var.into(), terms: BTreeMap::new(), order }
    }

    pub fn one(var: impl Into<String>, order: QExp) -> Self {
        let mut s = Self::zero(var, order);
        if order > QExp::from_integer(0) {
            s.terms.insert(QExp::from_integer(0), Scalar::one());
        }
        s
    }

    pub fn monomial(var: impl Into<String>, exp: QExp, coef: Scalar, order: QExp) -> Self {
        let mut s = Self::zero(var, order);
        s.set(exp, coef);
        s
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn order(&self) -> QExp {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&QExp, &Scalar)> {
        self.terms.iter()
    }

    pub fn coef(&self, e: QExp) -> Scalar {
        self.terms.get(&e).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest known exponent; falls back to the order for the zero series.
    pub fn valuation(&self) -> QExp {
        self.terms.keys().next().copied().unwrap_or(self.order)
    }

    pub fn set(&mut self, e: QExp, c: Scalar) {
        if e >= self.order || c.is_zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, c);
        }
    }

    pub fn add_at(&mut self, e: QExp, c: &Scalar) -> Result<(), EngineError> {
        if e >= self.order {
            return Ok(());
        }
        let cur = self.coef(e);
        self.set(e, cur.add(c)?);
        Ok(())
    }

    fn check_var(&self, other: &Self) -> Result<(), EngineError> {
        if self.var != other.var {
            return Err(EngineError::validation(format!(
                "series variable mismatch: {} vs {}",
                self.var, other.var
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, EngineError> {
        self.check_var(other)?;
        let order = self.order.min(other.order);
        let mut out = Self::zero(self.var.clone(), order);
        for (e, c) in &self.terms {
            out.add_at(*e, c)?;
        }
        for (e, c) in &other.terms {
            out.add_at(*e, c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, EngineError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        FracLaurentSeries {
            var: self.var.clone(),
            terms: self.terms.iter().map(|(e, c)| (*e, c.neg())).collect(),
            order: self.order,
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.var.clone(), self.order);
        }
        FracLaurentSeries {
            var: self.var.clone(),
            terms: self.terms.iter().map(|(e, k)| (*e, k.mul(c))).collect(),
            order: self.order,
        }
    }

    /// Multiply by `c·x^e`; the truncation order shifts along.
    pub fn mul_monomial(&self, e: QExp, c: &Scalar) -> Self {
        let mut out = Self::zero(self.var.clone(), self.order + e);
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.terms {
            out.terms.insert(k + e, v.mul(c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, EngineError> {
        self.check_var(other)?;
        let order = (self.order + other.valuation()).min(other.order + self.valuation());
        let mut out = Self::zero(self.var.clone(), order);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_at(e1 + e2, &c1.mul(c2))?;
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse; requires an invertible lowest term.
    pub fn inv(&self) -> Result<Self, EngineError> {
        let v = self.valuation();
        if self.is_zero() || v >= self.order {
            return Err(EngineError::domain(
                "inversion of a series with no known leading term",
            ));
        }
        let lead = self.coef(v);
        let lead_inv = lead.inv()?;
        // self = lead x^v (1 + u), u = tail/lead x^{-v}
        let order = self.order - v - v;
        let mut u = Self::zero(self.var.clone(), order);
        for (e, c) in &self.terms {
            if *e > v {
                u.add_at(e - v, &c.mul(&lead_inv))?;
            }
        }
        // (1+u)^{-1} = Σ (-u)^m, truncated
        let mut out = Self::one(self.var.clone(), order);
        let mut pw = Self::one(self.var.clone(), order);
        let uv = u.valuation();
        if !u.is_zero() {
            let mut total = QExp::from_integer(0);
            loop {
                total += uv;
                if total >= order {
                    break;
                }
                pw = pw.mul(&u.neg())?;
                out = out.add(&pw)?;
            }
        }
        Ok(out.mul_monomial(-v, &lead_inv))
    }

    /// Exponential of a series with strictly positive valuation.
    pub fn exp(&self) -> Result<Self, EngineError> {
        if !self.is_zero() && self.valuation() <= QExp::from_integer(0) {
            return Err(EngineError::domain(
                "exp of a series with nonpositive valuation",
            ));
        }
        let mut out = Self::one(self.var.clone(), self.order);
        let mut pw = Self::one(self.var.clone(), self.order);
        let mut fact = Scalar::one();
        if self.is_zero() {
            return Ok(out);
        }
        let uv = self.valuation();
        let mut total = QExp::from_integer(0);
        let mut m = 0i64;
        loop {
            total += uv;
            if total >= self.order {
                break;
            }
            m += 1;
            pw = pw.mul(self)?;
            fact = fact.mul(&Scalar::from_qrat(super::QRat::from_int(m)));
            out = out.add(&pw.scale(&fact.inv()?))?;
        }
        Ok(out)
    }

    /// Truncate to a (smaller) order.
    pub fn truncate(&self, order: QExp) -> Self {
        let order = order.min(self.order);
        let mut out = Self::zero(self.var.clone(), order);
        for (e, c) in &self.terms {
            if *e < order {
                out.terms.insert(*e, c.clone());
            }
        }
        out
    }

    /// Rename the formal variable.
    pub fn rename(&self, var: impl Into<String>) -> Self {
        FracLaurentSeries {
            var: var.into(),
            terms: self.terms.clone(),
            order: self.order,
        }
    }

    /// Equality of all coefficients below the smaller order.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let order = self.order.min(other.order);
        let a = self.truncate(order);
        let b = other.truncate(order);
        a.terms == b.terms
    }

    /// First exponent (below the common order) where the two series differ.
    pub fn first_difference(&self, other: &Self) -> Option<QExp> {
        let order = self.order.min(other.order);
        let mut exps: Vec<QExp> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .copied()
            .filter(|e| *e < order)
            .collect();
        exps.sort();
        exps.dedup();
        exps.into_iter().find(|e| self.coef(*e) != other.coef(*e))
    }

    /// Canonical dump: one `exp | phase | rational` line per term, ascending,
    /// then the truncation marker.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (e, c) in &self.terms {
            out.push_str(&format!(
                "{}/{} | {} | {}\n",
                e.numer(),
                e.denom(),
                c.phase(),
                c.value()
            ));
        }
        let o = self.order;
        if o.is_integer() {
            out.push_str(&format!("O({}^{})\n", self.var, o.numer()));
        } else {
            out.push_str(&format!("O({}^{}/{})\n", self.var, o.numer(), o.denom()));
        }
        out
    }
}

impl fmt::Display for FracLaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dump())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{qexp, QRat};

    fn x() -> &'static str {
        "x"
    }

    fn ord(n: i64) -> QExp {
        QExp::from_integer(n)
    }

    #[test]
    fn geometric_inverse() {
        // inv(1 - q^2 x) = 1 + q^2 x + O(x^2)
        let mut s = FracLaurentSeries::one(x(), ord(2));
        s.set(ord(1), Scalar::q_pow(qexp(2, 1)).neg());
        let inv = s.inv().unwrap();
        assert_eq!(inv.coef(ord(0)), Scalar::one());
        assert_eq!(inv.coef(ord(1)), Scalar::q_pow(qexp(2, 1)));
        assert_eq!(inv.order(), ord(2));
    }

    #[test]
    fn annihilating_product_keeps_truncation() {
        // (1-x)(1+x+x^2) = 1 + O(x^3)
        let mut a = FracLaurentSeries::one(x(), ord(3));
        a.set(ord(1), Scalar::from_int(-1));
        let mut b = FracLaurentSeries::one(x(), ord(3));
        b.set(ord(1), Scalar::one());
        b.set(ord(2), Scalar::one());
        let p = a.mul(&b).unwrap();
        assert_eq!(p.coef(ord(0)), Scalar::one());
        assert_eq!(p.coef(ord(1)), Scalar::zero());
        assert_eq!(p.coef(ord(2)), Scalar::zero());
        assert_eq!(p.order(), ord(3));
    }

    #[test]
    fn fractional_exponents_add() {
        let a = FracLaurentSeries::monomial(x(), qexp(1, 2), Scalar::one(), ord(4));
        let b = FracLaurentSeries::monomial(x(), qexp(3, 2), Scalar::one(), ord(4));
        let p = a.mul(&b).unwrap();
        assert_eq!(p.coef(ord(2)), Scalar::one());
    }

    #[test]
    fn mul_then_inv_is_identity_up_to_order() {
        let mut a = FracLaurentSeries::one(x(), ord(6));
        a.set(ord(1), Scalar::q_pow(qexp(1, 1)));
        a.set(ord(2), Scalar::from_qrat(QRat::from_int(-3)));
        let inv = a.inv().unwrap();
        let p = a.mul(&inv).unwrap();
        assert!(p.agrees_with(&FracLaurentSeries::one(x(), p.order())));
    }

    #[test]
    fn dump_format_is_stable() {
        let mut s = FracLaurentSeries::zero(x(), qexp(3, 2));
        s.set(qexp(1, 2), Scalar::q_pow(qexp(-1, 1)));
        let d = s.dump();
        assert_eq!(d, "1/2 | (-1)^0/1 | 1*q^-1 / 1*q^0\nO(x^3/2)\n");
    }
}
