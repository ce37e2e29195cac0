//! The n-dimensional evaluation representation on `V ⊗ C[z, z^{-1}]` and
//! the two-site R-matrix intertwining check.
//!
//! The currents act by
//!
//! ```text
//! x_i^+(w)|j⟩ = δ_{ij} δ(w/(q^i z)) |i-1⟩,
//! x_i^-(w)|j⟩ = δ_{i-1,j} δ(w/(q^i z)) |i⟩,
//! φ_i(w)|i-1⟩ = (q^{-1} - q^{-i+1} w/z)/(1 - q^{-i} w/z)|i-1⟩   in C[[w/z]],
//! φ_i(w)|i⟩   = (q - q^{-i-1} w/z)/(1 - q^{-i} w/z)|i⟩          in C[[w/z]],
//! ψ_i(w)|i-1⟩ = (q - q^{i-1} z/w)/(1 - q^{i} z/w)|i-1⟩          in C[[z/w]],
//! ψ_i(w)|i⟩   = (q^{-1} - q^{i+1} z/w)/(1 - q^{i} z/w)|i⟩       in C[[z/w]],
//! ```
//!
//! all other basis vectors fixed, and the central element acts trivially.
//! On `V_{z1} ⊗ V_{z2}`, matrix entries of comultiplication images are
//! series in `y = z2/z1` (each mode is `z1`-homogeneous, and the common
//! power is dropped); the check is the entrywise identity
//! `R·Δ(x) = Δ'(x)·R` through the expansion order.

use crate::error::EngineError;
use crate::report::{Check, Report};
use crate::scalar::ratfn::Direction;
use crate::scalar::{FracLaurentSeries, QExp, QRat, RatFunc, Scalar};
use crate::vertex::CurrentKind;
use crate::{Engine, Mutation};

/// One term of a current-mode action on a basis vector of `V_z`:
/// `coefficient · z^{zpow} |out⟩`. For every mode `l` of every current the
/// attached power is `zpow = l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VecAction {
    pub out: usize,
    pub zpow: i64,
    pub coef: QRat,
}

fn diagonal_factor(kind: CurrentKind, i: usize, j: usize) -> Option<RatFunc> {
    let q = |e: i64| QRat::q_pow(QExp::from_integer(e));
    let i64i = i as i64;
    match kind {
        CurrentKind::Phi => {
            if j + 1 == i {
                Some(RatFunc::linear_frac(
                    q(-1),
                    q(-i64i + 1).neg(),
                    QRat::one(),
                    q(-i64i).neg(),
                ))
            } else if j == i {
                Some(RatFunc::linear_frac(
                    q(1),
                    q(-i64i - 1).neg(),
                    QRat::one(),
                    q(-i64i).neg(),
                ))
            } else {
                None
            }
        }
        CurrentKind::Psi => {
            if j + 1 == i {
                Some(RatFunc::linear_frac(
                    q(1),
                    q(i64i - 1).neg(),
                    QRat::one(),
                    q(i64i).neg(),
                ))
            } else if j == i {
                Some(RatFunc::linear_frac(
                    q(-1),
                    q(i64i + 1).neg(),
                    QRat::one(),
                    q(i64i).neg(),
                ))
            } else {
                None
            }
        }
        _ => None,
    }
}

impl Engine {
    /// Action of one current mode on a basis vector `|j⟩` of `V_z`. The
    /// diagonal families carry rational factors expanded to `order`; modes
    /// outside the prepared order are rejected rather than truncated.
    pub fn vecrep_mode(
        &self,
        kind: CurrentKind,
        i: usize,
        mode: i64,
        j: usize,
        order: i64,
    ) -> Result<Vec<VecAction>, EngineError> {
        let n = self.n();
        assert!((1..n).contains(&i), "current index out of range");
        if j >= n {
            return Err(EngineError::validation("basis index out of range"));
        }
        let i64i = i as i64;
        match kind {
            CurrentKind::XPlus | CurrentKind::XMinus => {
                let hit = if kind == CurrentKind::XPlus { j == i } else { j + 1 == i };
                if !hit {
                    return Ok(Vec::new());
                }
                let out = if kind == CurrentKind::XPlus { i - 1 } else { i };
                Ok(vec![VecAction {
                    out,
                    zpow: mode,
                    coef: QRat::q_pow(QExp::from_integer(i64i * mode)),
                }])
            }
            CurrentKind::Phi | CurrentKind::Psi => {
                let m = if kind == CurrentKind::Phi { -mode } else { mode };
                if m < 0 {
                    return Ok(Vec::new());
                }
                match diagonal_factor(kind, i, j) {
                    None => {
                        if m == 0 {
                            Ok(vec![VecAction { out: j, zpow: 0, coef: QRat::one() }])
                        } else {
                            Ok(Vec::new())
                        }
                    }
                    Some(f) => {
                        if m >= order {
                            return Err(EngineError::validation(
                                "mode outside the prepared expansion order",
                            ));
                        }
                        let s = f.expand(Direction::AtZero, "u", order)?;
                        let c = s.coef(QExp::from_integer(m));
                        Ok(vec![VecAction { out: j, zpow: mode, coef: c.value().clone() }])
                    }
                }
            }
        }
    }
}

/// Square matrix over exact rational functions of `y = z2/z1`.
///
/// Entries of comultiplication images on two evaluation modules are honest
/// rational functions of `y` (each arising from a specific expansion
/// direction); products and comparisons are carried out rationally, and the
/// report additionally expands both sides about `y = 0` through the stated
/// order.
#[derive(Clone, Debug)]
pub struct RatMatrix {
    dim: usize,
    entries: Vec<RatFunc>,
}

impl RatMatrix {
    fn zero(dim: usize) -> Self {
        RatMatrix {
            dim,
            entries: vec![RatFunc::poly(vec![]); dim * dim],
        }
    }

    pub fn at(&self, r: usize, c: usize) -> &RatFunc {
        &self.entries[r * self.dim + c]
    }

    fn add_at(&mut self, r: usize, c: usize, f: &RatFunc) {
        let e = &mut self.entries[r * self.dim + c];
        *e = e.add(f);
    }

    fn set(&mut self, r: usize, c: usize, f: RatFunc) {
        self.entries[r * self.dim + c] = f;
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = RatMatrix::zero(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                let mut acc = RatFunc::poly(vec![]);
                for k in 0..self.dim {
                    acc = acc.add(&self.at(r, k).mul(other.at(k, c)));
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    fn first_difference(&self, other: &Self) -> Option<(usize, usize)> {
        for r in 0..self.dim {
            for c in 0..self.dim {
                if !self.at(r, c).equiv(other.at(r, c)) {
                    return Some((r, c));
                }
            }
        }
        None
    }
}

impl Engine {
    /// Matrix of a current mode on `V_{z1} ⊗ V_{z2}` through the level-zero
    /// comultiplication (`opposite` flips the slots), with entries exact
    /// rational functions of `y = z2/z1`; the common `z1^{mode}` factor is
    /// dropped.
    pub fn vecrep_coproduct_matrix(
        &self,
        kind: CurrentKind,
        i: usize,
        mode: i64,
        opposite: bool,
    ) -> Result<RatMatrix, EngineError> {
        let n = self.n();
        let dim = n * n;
        let mut out = RatMatrix::zero(dim);
        let i64i = i as i64;
        let qp = |e: i64| QRat::q_pow(QExp::from_integer(e));
        // level zero: every q^{c·(…)} argument shift is trivial
        let mut terms: Vec<(Option<CurrentKind>, Option<CurrentKind>)> = match kind {
            CurrentKind::XPlus => vec![
                (Some(CurrentKind::XPlus), None),
                (Some(CurrentKind::Phi), Some(CurrentKind::XPlus)),
            ],
            CurrentKind::XMinus => vec![
                (None, Some(CurrentKind::XMinus)),
                (Some(CurrentKind::XMinus), Some(CurrentKind::Psi)),
            ],
            CurrentKind::Phi => vec![(Some(CurrentKind::Phi), Some(CurrentKind::Phi))],
            CurrentKind::Psi => vec![(Some(CurrentKind::Psi), Some(CurrentKind::Psi))],
        };
        if opposite {
            terms = terms.into_iter().map(|(a, b)| (b, a)).collect();
        }
        let is_delta = |k: &Option<CurrentKind>| {
            matches!(k, Some(CurrentKind::XPlus) | Some(CurrentKind::XMinus))
        };
        for j1 in 0..n {
            for j2 in 0..n {
                let col = j1 * n + j2;
                for (k1, k2) in &terms {
                    match (k1, k2) {
                        (Some(k), None) | (None, Some(k)) => {
                            let slot1 = k2.is_none();
                            let j = if slot1 { j1 } else { j2 };
                            let hits = match k {
                                CurrentKind::XPlus => j == i,
                                CurrentKind::XMinus => j + 1 == i,
                                _ => unreachable!("single slots are raising/lowering"),
                            };
                            if !hits {
                                continue;
                            }
                            let outj = if *k == CurrentKind::XPlus { i - 1 } else { i };
                            let row = if slot1 { outj * n + j2 } else { j1 * n + outj };
                            // slot-1 action carries z1^{mode} (dropped);
                            // slot-2 carries z2^{mode} = y^{mode}
                            let pow = if slot1 { 0 } else { mode };
                            out.add_at(row, col, &RatFunc::monomial(qp(i64i * mode), pow));
                        }
                        (Some(ka), Some(kb)) => {
                            let a_delta = is_delta(&Some(*ka));
                            let b_delta = is_delta(&Some(*kb));
                            if a_delta && b_delta {
                                return Err(EngineError::validation(
                                    "comultiplication term with two δ-supported slots",
                                ));
                            }
                            if a_delta || b_delta {
                                // the δ slot pins w = q^i z_s; the diagonal
                                // factor evaluates there
                                let (dk, ds, fj, fslot) = if a_delta {
                                    (*ka, 0usize, *kb, 1usize)
                                } else {
                                    (*kb, 1usize, *ka, 0usize)
                                };
                                let dj = if ds == 0 { j1 } else { j2 };
                                let hits = match dk {
                                    CurrentKind::XPlus => dj == i,
                                    CurrentKind::XMinus => dj + 1 == i,
                                    _ => unreachable!(),
                                };
                                if !hits {
                                    continue;
                                }
                                let dout = if dk == CurrentKind::XPlus { i - 1 } else { i };
                                let fj_in = if fslot == 0 { j1 } else { j2 };
                                let fact = match diagonal_factor(fj, i, fj_in) {
                                    None => RatFunc::one(),
                                    Some(f) => {
                                        // φ: argument w/z_f; ψ: z_f/w, with
                                        // w = q^i z_d
                                        let c = match (fj, ds) {
                                            (CurrentKind::Phi, 1) => (qp(i64i), false), // q^i z2/z1 = q^i y
                                            (CurrentKind::Phi, 0) => (qp(i64i), true),  // q^i z1/z2 = q^i / y
                                            (CurrentKind::Psi, 1) => (qp(-i64i), true), // z1/(q^i z2) = q^{-i}/y
                                            (CurrentKind::Psi, 0) => (qp(-i64i), false), // z2/(q^i z1) = q^{-i} y
                                            _ => unreachable!(),
                                        };
                                        f.subst_monomial(&c.0, c.1)
                                    }
                                };
                                let row = if ds == 0 {
                                    dout * n + fj_in
                                } else {
                                    fj_in * n + dout
                                };
                                // δ slot carries z_s^{mode}
                                let pow = if ds == 0 { 0 } else { mode };
                                out.add_at(
                                    row,
                                    col,
                                    &RatFunc::monomial(qp(i64i * mode), pow).mul(&fact),
                                );
                            } else {
                                // two diagonal factors: a finite convolution
                                let f1 = diagonal_factor(*ka, i, j1);
                                let f2 = diagonal_factor(*kb, i, j2);
                                let sign = if *ka == CurrentKind::Phi { -1i64 } else { 1 };
                                // mode m of φ is ≤ 0, of ψ is ≥ 0; both slots
                                // share the family here
                                let lo = 0i64.min(sign * mode);
                                let hi = 0i64.max(sign * mode);
                                let _ = (lo, hi);
                                let span = (sign * mode).abs();
                                if sign * mode < 0 {
                                    continue;
                                }
                                let expand_coef =
                                    |f: &Option<RatFunc>, m: i64| -> Result<QRat, EngineError> {
                                        match f {
                                            None => Ok(if m == 0 {
                                                QRat::one()
                                            } else {
                                                QRat::zero()
                                            }),
                                            Some(f) => {
                                                let s = f.expand(
                                                    Direction::AtZero,
                                                    "u",
                                                    span + 1,
                                                )?;
                                                Ok(s
                                                    .coef(QExp::from_integer(m))
                                                    .value()
                                                    .clone())
                                            }
                                        }
                                    };
                                let mut acc = RatFunc::poly(vec![]);
                                for m2 in 0..=span {
                                    let m1 = span - m2;
                                    let c = expand_coef(&f1, m1)?
                                        .mul(&expand_coef(&f2, m2)?);
                                    if c.is_zero() {
                                        continue;
                                    }
                                    // z-powers: slot powers are sign·m ·(∓1)…
                                    // φ mode -m carries z^{-m}; ψ mode m
                                    // carries z^{m}; the y power is the slot-2
                                    // z2 power
                                    let ypow = sign * m2;
                                    acc = acc.add(&RatFunc::monomial(c, ypow));
                                }
                                out.add_at(col, col, &acc);
                            }
                        }
                        (None, None) => unreachable!("no identity⊗identity terms"),
                    }
                }
            }
        }
        Ok(out)
    }

    /// The two-site R-matrix (rank parameter 2), with rational entries in
    /// `y = z2/z1`.
    pub fn rmatrix(&self) -> Result<RatMatrix, EngineError> {
        if self.n() != 2 {
            return Err(EngineError::validation(
                "the two-site R-matrix is implemented for n = 2 only",
            ));
        }
        let q = |e: i64| QRat::q_pow(QExp::from_integer(e));
        let mut r = RatMatrix::zero(4);
        r.set(0, 0, RatFunc::one());
        r.set(3, 3, RatFunc::one());
        // |01⟩: (q^{-1} - q y)/(1 - y)
        let mut top = q(-1);
        if self.mutated(Mutation::RmatrixEntry) {
            top = q(-2);
        }
        r.set(
            1,
            1,
            RatFunc::linear_frac(top, q(1).neg(), QRat::one(), QRat::from_int(-1)),
        );
        // |10⟩: (1 - y)/(q - q^{-1} y)
        r.set(
            2,
            2,
            RatFunc::linear_frac(QRat::one(), QRat::from_int(-1), q(1), q(-1).neg()),
        );
        Ok(r)
    }

    /// Entrywise check of `R·Δ(x) = Δ'(x)·R` for all generator modes in the
    /// window: exact rational equality, plus a series comparison in
    /// `y = z2/z1` through `order` for the report.
    pub fn verify_rmatrix(&self, order: i64, mode_window: i64) -> Result<Report, EngineError> {
        let start = std::time::Instant::now();
        let mut report = Report::new("rmatrix", self.n())
            .param("order", order)
            .param("mode_window", mode_window);
        let r = self.rmatrix()?;
        for kind in [
            CurrentKind::XPlus,
            CurrentKind::XMinus,
            CurrentKind::Phi,
            CurrentKind::Psi,
        ] {
            for i in 1..self.n() {
                let modes: Vec<i64> = match kind {
                    CurrentKind::Phi => (-mode_window..=0).collect(),
                    CurrentKind::Psi => (0..=mode_window).collect(),
                    _ => (-mode_window..=mode_window).collect(),
                };
                for mode in modes {
                    let name = format!(
                        "intertwine({},{i}, mode {mode})",
                        match kind {
                            CurrentKind::XPlus => "x+",
                            CurrentKind::XMinus => "x-",
                            CurrentKind::Phi => "phi",
                            CurrentKind::Psi => "psi",
                        }
                    );
                    let m = self.vecrep_coproduct_matrix(kind, i, mode, false)?;
                    let mo = self.vecrep_coproduct_matrix(kind, i, mode, true)?;
                    let lhs = r.mul(&m);
                    let rhs = mo.mul(&r);
                    match lhs.first_difference(&rhs) {
                        Some((row, col)) => report.checks.push(Check::fail(
                            name,
                            format!("entry ({row},{col}) differs as a rational function"),
                        )),
                        None => {
                            // series comparison through the stated order
                            let mut ok = true;
                            let mut wit = String::new();
                            'outer: for row in 0..lhs.dim {
                                for colx in 0..lhs.dim {
                                    let a = lhs.at(row, colx).expand_laurent("y", order)?;
                                    let b = rhs.at(row, colx).expand_laurent("y", order)?;
                                    if let Some(e) = a.first_difference(&b) {
                                        ok = false;
                                        wit = format!(
                                            "entry ({row},{colx}) series differ at y^{}/{}",
                                            e.numer(),
                                            e.denom()
                                        );
                                        break 'outer;
                                    }
                                }
                            }
                            if ok {
                                report.checks.push(Check::pass(name));
                            } else {
                                report.checks.push(Check::fail(name, wit));
                            }
                        }
                    }
                }
            }
        }
        report.elapsed = start.elapsed().as_millis() as u64;
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raising_mode_action_is_the_evaluation_formula() {
        // x_1^+(l)|1⟩ = q^{l} z^{l} |0⟩
        let e = Engine::new(3).unwrap();
        for l in [-2i64, 0, 3] {
            let a = e.vecrep_mode(CurrentKind::XPlus, 1, l, 1, 8).unwrap();
            assert_eq!(a.len(), 1);
            assert_eq!(a[0].out, 0);
            assert_eq!(a[0].zpow, l);
            assert_eq!(a[0].coef, QRat::q_pow(QExp::from_integer(l)));
            assert!(e.vecrep_mode(CurrentKind::XPlus, 1, l, 2, 8).unwrap().is_empty());
        }
    }

    #[test]
    fn diagonal_action_fixes_far_basis_vectors() {
        // φ_1(w)|2⟩ = |2⟩ for n ≥ 4
        let e = Engine::new(4).unwrap();
        let a = e.vecrep_mode(CurrentKind::Phi, 1, 0, 2, 8).unwrap();
        assert_eq!(a, vec![VecAction { out: 2, zpow: 0, coef: QRat::one() }]);
        assert!(e.vecrep_mode(CurrentKind::Phi, 1, -1, 2, 8).unwrap().is_empty());
    }

    #[test]
    fn diagonal_series_on_the_touched_vector() {
        // φ_1(w)|1⟩ = (q - q^{-2} u)/(1 - q^{-1} u)|1⟩, u = w/z
        let e = Engine::new(2).unwrap();
        let c0 = e.vecrep_mode(CurrentKind::Phi, 1, 0, 1, 8).unwrap();
        assert_eq!(c0[0].coef, QRat::q_pow(QExp::from_integer(1)));
        let c1 = e.vecrep_mode(CurrentKind::Phi, 1, -1, 1, 8).unwrap();
        let want = QRat::q_pow(QExp::from_integer(0)).sub(&QRat::q_pow(QExp::from_integer(-2)));
        assert_eq!(c1[0].coef, want);
    }

    #[test]
    fn intertwining_holds_at_small_order() {
        let e = Engine::new(2).unwrap();
        let report = e.verify_rmatrix(6, 2).unwrap();
        assert!(report.all_pass(), "{}", report.text_summary());
    }

    #[test]
    fn perturbed_rmatrix_entry_fails() {
        let e = Engine::with_mutation(2, Mutation::RmatrixEntry).unwrap();
        let report = e.verify_rmatrix(5, 1).unwrap();
        assert!(!report.all_pass());
    }
}
