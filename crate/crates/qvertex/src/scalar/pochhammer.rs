//! The infinite product `(a; p)_∞ = Π_{m≥0} (1 − a·p^m)` for `a = c·x` a
//! monomial in the series variable and `p = q^s` a positive power of `q`.
//!
//! The coefficient of `x^k` collects contributions from every factor, summing
//! to an exact rational function of `q` by Euler's q-exponential identity:
//!
//! `(c·x; p)_∞ = Σ_k (−1)^k p^{k(k−1)/2} c^k / ((p;p)_k) · x^k`,
//! `(p;p)_k = Π_{i=1..k} (1 − p^i)`.
//!
//! Truncating a finite sub-product instead would only approximate these
//! coefficients q-adically; the tests compare the two routes modulo a high
//! power of `q`.

use super::{FracLaurentSeries, QExp, QRat, Scalar};

/// Expansion of `(c·x; q^s)_∞` in `x` to the given order. `s` must be a
/// positive rational so the geometric sums converge q-adically.
pub fn pochhammer_series(
    c: &QRat,
    s: QExp,
    var: impl Into<String>,
    order: i64,
) -> FracLaurentSeries {
    assert!(order >= 1, "expansion order must be at least 1");
    assert!(s > QExp::from_integer(0), "modulus must be a positive power of q");
    let order_exp = QExp::from_integer(order);
    let mut out = FracLaurentSeries::zero(var, order_exp);
    out.set(QExp::from_integer(0), Scalar::one());
    if c.is_zero() {
        return out;
    }
    let mut c_pow = QRat::one();
    let mut pp = QRat::one(); // (p;p)_k
    for k in 1..order {
        c_pow = c_pow.mul(c);
        let pk = QRat::one().sub(&QRat::q_pow(s * QExp::from_integer(k)));
        pp = pp.mul(&pk);
        let tri = s * QExp::new(k * (k - 1), 2);
        let sign = if k % 2 == 0 { QRat::one() } else { QRat::from_int(-1) };
        let coef = sign
            .mul(&QRat::q_pow(tri))
            .mul(&c_pow)
            .div(&pp)
            .expect("(p;p)_k is nonzero for positive powers of q");
        out.set(QExp::from_integer(k), Scalar::from_qrat(coef));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::poly::qexp;
    use num_bigint::BigInt;
    use num_rational::Ratio;
    use num_traits::Zero;
    use std::collections::BTreeMap;

    type QSeries = BTreeMap<QExp, Ratio<BigInt>>;

    fn qs_add(a: &mut QSeries, e: QExp, c: Ratio<BigInt>) {
        let entry = a.entry(e).or_insert_with(|| Ratio::from_integer(BigInt::zero()));
        *entry += c;
        if entry.is_zero() {
            a.remove(&e);
        }
    }

    /// Finite-product oracle: multiply factors (1 - c q^{s m} x) for
    /// m = 0..factors, with coefficients kept as q-adic expansions modulo
    /// q^qorder, truncated at x^xorder.
    fn finite_product_qadic(
        c: &QRat,
        s: QExp,
        xorder: usize,
        factors: i64,
        qorder: i64,
    ) -> Vec<QSeries> {
        let mut coefs: Vec<QSeries> = vec![QSeries::new(); xorder];
        coefs[0].insert(QExp::from_integer(0), Ratio::from_integer(BigInt::from(1)));
        let c_adic = c.q_series(qorder);
        for m in 0..factors {
            let shift = s * QExp::from_integer(m);
            let mut next = coefs.clone();
            for k in (0..xorder - 1).rev() {
                let snapshot: Vec<(QExp, Ratio<BigInt>)> =
                    coefs[k].iter().map(|(e, v)| (*e, v.clone())).collect();
                for (e, v) in snapshot {
                    for (ce, cv) in &c_adic {
                        let ee = e + ce + shift;
                        if ee < QExp::from_integer(qorder) {
                            qs_add(&mut next[k + 1], ee, -(v.clone() * cv));
                        }
                    }
                }
            }
            coefs = next;
        }
        for m in coefs.iter_mut() {
            m.retain(|e, _| *e < QExp::from_integer(qorder));
        }
        coefs
    }

    fn assert_qadic_match(series: &FracLaurentSeries, oracle: &[QSeries], qorder: i64) {
        for (k, want) in oracle.iter().enumerate() {
            let got = series.coef(QExp::from_integer(k as i64));
            assert!(got.has_trivial_phase());
            let mut got_adic = got.value().q_series(qorder);
            got_adic.retain(|e, _| *e < QExp::from_integer(qorder));
            assert_eq!(&got_adic, want, "coefficient of x^{k}");
        }
    }

    #[test]
    fn euler_route_matches_finite_product_oracle() {
        // (q x; q^4)_inf to x^4, compared q-adically to 40 q-orders
        let c = QRat::q_pow(QExp::from_integer(1));
        let s = QExp::from_integer(4);
        let series = pochhammer_series(&c, s, "x", 4);
        let oracle = finite_product_qadic(&c, s, 4, 12, 40);
        assert_qadic_match(&series, &oracle, 40);
    }

    #[test]
    fn more_factors_do_not_change_the_comparison() {
        let c = QRat::q_pow(QExp::from_integer(3));
        let s = QExp::from_integer(4);
        let series = pochhammer_series(&c, s, "x", 3);
        let a = finite_product_qadic(&c, s, 3, 10, 32);
        let b = finite_product_qadic(&c, s, 3, 25, 32);
        assert_eq!(a, b, "factors beyond the q-adic bound are inert");
        assert_qadic_match(&series, &a, 32);
    }

    #[test]
    fn empty_product_is_one() {
        let series = pochhammer_series(&QRat::zero(), QExp::from_integer(4), "x", 5);
        assert!(series.agrees_with(&FracLaurentSeries::one("x", QExp::from_integer(5))));
    }

    #[test]
    fn first_coefficient_is_geometric_sum() {
        // coefficient of x in (x; q^4)_inf is -1/(1-q^4)
        let series = pochhammer_series(&QRat::one(), QExp::from_integer(4), "x", 2);
        let want = QRat::one()
            .div(&QRat::one().sub(&QRat::q_pow(QExp::from_integer(4))))
            .unwrap()
            .neg();
        assert_eq!(series.coef(QExp::from_integer(1)), Scalar::from_qrat(want));
    }

    #[test]
    fn log_derivative_identity_for_ratio() {
        // (q x; q^4)/(q^3 x; q^4) = exp(-Σ_k q^k x^k / (k (1+q^{2k})))
        let num = pochhammer_series(&QRat::q_pow(qexp(1, 1)), QExp::from_integer(4), "x", 6);
        let den = pochhammer_series(&QRat::q_pow(qexp(3, 1)), QExp::from_integer(4), "x", 6);
        let ratio = num.mul(&den.inv().unwrap()).unwrap();
        let mut log = FracLaurentSeries::zero("x", QExp::from_integer(6));
        for k in 1..6i64 {
            let c = QRat::q_pow(QExp::from_integer(k))
                .div(
                    &QRat::from_int(k)
                        .mul(&QRat::one().add(&QRat::q_pow(QExp::from_integer(2 * k)))),
                )
                .unwrap()
                .neg();
            log.set(QExp::from_integer(k), Scalar::from_qrat(c));
        }
        let exp = log.exp().unwrap();
        assert!(ratio.agrees_with(&exp));
    }
}
