//! Normal-ordered exponential operator templates.
//!
//! A [`VertexTemplate`] is an operator of the shape
//!
//! ```text
//!   pre · Π var^{s} ·
//!   exp[ Σ_{j,k>0} N_{j}(k) a_{j,-k} u^{k} ] ·
//!   exp[ Σ_{j,k>0} P_{j}(k) a_{j,k} u^{-k} ] ·
//!   e^{β} · Π (q^{r} var)^{∂_γ} · Π (-1)^{ρ ∂_γ}
//! ```
//!
//! with `u = q^{base}·var` and exact coefficient functions given by lists of
//! exponential atoms. Every current and every vertex operator of the engine
//! is such a template, and the class is closed under normal-ordered products.
//!
//! Two product routes are provided and kept strictly apart:
//!
//! - [`contract`] computes the true operator product `L(zl)·R(zr)`: the
//!   scalar Wick factor `exp Σ_k P_L(k)·N_R(k)·[a,a]·(zr/zl)^k`, the
//!   eigenvalue monomials of `L`'s weight factors on `R`'s lattice shift,
//!   the lattice cocycle sign, and the merged template;
//! - [`normal_ordered`] merges the data with no contraction factor and no
//!   weight-factor eigenvalues, keeping only the cocycle sign — the `:·:`
//!   operation.
//!
//! [`VertexTemplate::apply_mode`] extracts one mode exactly on a Fock state:
//! for a fixed mode index only finitely many terms of the exponentials
//! satisfy the variable balance, so no truncation is involved.

use crate::error::EngineError;
use crate::fock::{BosonMono, FockKey, FockState};
use crate::lattice::{Coef, LatticeElt, WeightVec};
use crate::scalar::{FracLaurentSeries, QExp, QRat, Scalar};
use crate::Engine;
use num_rational::Ratio;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet};

/// Coefficient family of one exponential atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AtomKind {
    /// `1/[k]`
    InvQint,
    /// `q - q^{-1}`
    QmQinv,
    /// `1`
    Unit,
}

/// One summand `sign · q^{half·k} · kind(k) · aᵈ_{j,∓k} · (q^{base}·var)^{±k}`
/// in the creation (`neg`) or annihilation (`pos`) exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OscAtom {
    pub var: String,
    pub boson: usize,
    /// Dual mode `a*` (expanded over the plain basis on evaluation).
    pub dual: bool,
    pub kind: AtomKind,
    pub sign: i8,
    pub half: Coef,
    pub base: QExp,
}

/// Weight factor `(q^{base}·var)^{∂_γ}`, or `q^{base·∂_γ}` when `var` is
/// absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZPow {
    pub var: Option<String>,
    pub base: QExp,
    pub gamma: WeightVec,
}

/// Phase factor `(-1)^{r·∂_γ}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasePow {
    pub r: Coef,
    pub gamma: WeightVec,
}

#[derive(Clone, Debug)]
pub struct VertexTemplate {
    pub(crate) neg: Vec<OscAtom>,
    pub(crate) pos: Vec<OscAtom>,
    pub(crate) shift: WeightVec,
    pub(crate) zpows: Vec<ZPow>,
    pub(crate) phases: Vec<PhasePow>,
    pub(crate) pre: Scalar,
    /// Scalar monomial `Π var^{e}` in the prefactor.
    pub(crate) pre_z: BTreeMap<String, QExp>,
}

impl VertexTemplate {
    pub fn identity(n: usize) -> Self {
        VertexTemplate {
            neg: Vec::new(),
            pos: Vec::new(),
            shift: WeightVec::zero(n),
            zpows: Vec::new(),
            phases: Vec::new(),
            pre: Scalar::one(),
            pre_z: BTreeMap::new(),
        }
    }

    /// The identity operator carrying a formal variable, for products that
    /// need a second variable slot.
    pub fn located_identity(n: usize, var: &str) -> Self {
        let mut t = Self::identity(n);
        t.zpows.push(ZPow {
            var: Some(var.to_string()),
            base: QExp::zero(),
            gamma: WeightVec::zero(n),
        });
        t
    }

    pub fn shift(&self) -> &WeightVec {
        &self.shift
    }

    pub fn prefactor(&self) -> &Scalar {
        &self.pre
    }

    pub fn prefactor_z(&self) -> &BTreeMap<String, QExp> {
        &self.pre_z
    }

    pub fn scaled(&self, c: &Scalar) -> Self {
        let mut t = self.clone();
        t.pre = t.pre.mul(c);
        t
    }

    pub fn mul_pre_z(&self, var: &str, e: QExp) -> Self {
        let mut t = self.clone();
        *t.pre_z.entry(var.to_string()).or_insert_with(QExp::zero) += e;
        t
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for a in self.neg.iter().chain(&self.pos) {
            out.insert(a.var.clone());
        }
        for z in &self.zpows {
            if let Some(v) = &z.var {
                out.insert(v.clone());
            }
        }
        for (v, e) in &self.pre_z {
            if !e.is_zero() {
                out.insert(v.clone());
            }
        }
        out
    }

    fn single_var(&self) -> Result<String, EngineError> {
        let vars = self.vars();
        if vars.len() != 1 {
            return Err(EngineError::validation(format!(
                "operation requires a single-variable template, found {vars:?}"
            )));
        }
        Ok(vars.into_iter().next().unwrap())
    }

    /// Substitute `var -> q^{qshift}·new_var`.
    pub fn substitute(&self, var: &str, qshift: QExp, new_var: &str) -> Self {
        let mut t = self.clone();
        for a in t.neg.iter_mut().chain(t.pos.iter_mut()) {
            if a.var == var {
                a.base += qshift;
                a.var = new_var.to_string();
            }
        }
        for z in t.zpows.iter_mut() {
            if z.var.as_deref() == Some(var) {
                z.base += qshift;
                z.var = Some(new_var.to_string());
            }
        }
        if let Some(e) = t.pre_z.remove(var) {
            t.pre = t.pre.mul_qrat(&QRat::q_pow(qshift * e));
            *t.pre_z.entry(new_var.to_string()).or_insert_with(QExp::zero) += e;
        }
        t
    }

    /// Inverse of a template with zero lattice shift and at most one
    /// exponential side (the `φ/ψ` family and its shifts).
    pub fn inverse(&self) -> Result<Self, EngineError> {
        if !self.shift.is_zero() {
            return Err(EngineError::validation(
                "only templates with trivial lattice shift invert",
            ));
        }
        if !self.neg.is_empty() && !self.pos.is_empty() {
            return Err(EngineError::validation(
                "only one-sided exponentials invert in template form",
            ));
        }
        let flip = |atoms: &[OscAtom]| -> Vec<OscAtom> {
            atoms
                .iter()
                .map(|a| OscAtom { sign: -a.sign, ..a.clone() })
                .collect()
        };
        Ok(VertexTemplate {
            neg: flip(&self.neg),
            pos: flip(&self.pos),
            shift: self.shift.clone(),
            zpows: self
                .zpows
                .iter()
                .map(|z| ZPow {
                    var: z.var.clone(),
                    base: z.base,
                    gamma: z.gamma.neg(),
                })
                .collect(),
            phases: self
                .phases
                .iter()
                .map(|p| PhasePow { r: -p.r, gamma: p.gamma.clone() })
                .collect(),
            pre: self.pre.inv()?,
            pre_z: self.pre_z.iter().map(|(v, e)| (v.clone(), -e)).collect(),
        })
    }

    /// Absolute coefficient of `a_{jp,-k}·var^{k}` in the creation exponent.
    pub fn neg_coef(&self, engine: &Engine, var: &str, jp: usize, k: i64) -> QRat {
        osc_coef(engine, &self.neg, var, jp, k, true)
    }

    /// Absolute coefficient of `a_{jp,k}·var^{-k}` in the annihilation
    /// exponent.
    pub fn pos_coef(&self, engine: &Engine, var: &str, jp: usize, k: i64) -> QRat {
        osc_coef(engine, &self.pos, var, jp, k, false)
    }

    /// Eigen-scalar of the weight and phase factors on a lattice point.
    pub(crate) fn zero_mode_scalar(&self, engine: &Engine, beta: &WeightVec) -> Scalar {
        let lat = engine.lattice();
        let mut sc = Scalar::one();
        for z in &self.zpows {
            let ev = lat.pairing(&z.gamma, beta);
            sc = sc.mul_qrat(&QRat::q_pow(z.base * ev));
        }
        for p in &self.phases {
            let ev = lat.pairing(&p.gamma, beta);
            sc = sc.mul_phase(p.r * ev);
        }
        sc
    }

    /// Variable exponent contributed by prefactor and weight factors on a
    /// lattice point (the mode-balance part independent of the bosons).
    pub(crate) fn static_zdeg(&self, engine: &Engine, var: &str, beta: &WeightVec) -> QExp {
        let lat = engine.lattice();
        let mut d = self.pre_z.get(var).copied().unwrap_or_else(QExp::zero);
        for z in &self.zpows {
            if z.var.as_deref() == Some(var) {
                d += lat.pairing(&z.gamma, beta);
            }
        }
        d
    }

    /// Mode-index support `[lo, hi]` on a state: outside this interval the
    /// application is identically zero. `lo` is `None` when the template
    /// creates arbitrary energy (modes unbounded below).
    pub fn mode_support(
        &self,
        engine: &Engine,
        state: &FockState,
    ) -> Result<(Option<QExp>, Option<QExp>), EngineError> {
        let var = self.single_var()?;
        Ok(self.mode_support_var(engine, &var, state))
    }

    /// Per-variable mode support of a (possibly multi-variable) template.
    pub fn mode_support_var(
        &self,
        engine: &Engine,
        var: &str,
        state: &FockState,
    ) -> (Option<QExp>, Option<QExp>) {
        if state.is_zero() {
            return (Some(QExp::zero()), Some(-QExp::from_integer(1)));
        }
        let lat = engine.lattice();
        let has_pos = self.pos.iter().any(|a| a.var == var);
        let has_neg = self.neg.iter().any(|a| a.var == var);
        let mut hi: Option<QExp> = None;
        let mut lo: Option<QExp> = None;
        for (key, _) in state.terms() {
            let beta = lat.from_free_basis(&key.lattice);
            let z0 = self.static_zdeg(engine, var, &beta);
            // mode l = -(z0 + created - annihilated)
            let ann_max = if has_pos { key.degree() } else { 0 };
            let h = QExp::from_integer(ann_max) - z0;
            hi = Some(hi.map_or(h, |x: QExp| x.max(h)));
            if !has_neg {
                let l = -z0;
                lo = Some(lo.map_or(l, |x: QExp| x.min(l)));
            }
        }
        if has_neg {
            (None, hi)
        } else {
            (lo, hi)
        }
    }

    pub fn has_creation(&self) -> bool {
        !self.neg.is_empty()
    }

    /// Coset displacement of the lattice shift (how the sector index moves).
    pub fn sector_shift(&self, engine: &Engine) -> usize {
        engine
            .lattice()
            .coset_class(&self.shift)
            .expect("template shifts are lattice weights")
    }

    /// Extract the coefficient of `var^{-l}` of the template applied to a
    /// state.
    pub fn apply_mode(
        &self,
        engine: &Engine,
        l: QExp,
        state: &FockState,
    ) -> Result<FockState, EngineError> {
        let var = self.single_var()?;
        let lat = engine.lattice();
        let n = engine.n();
        let new_sector = (state.sector() + self.sector_shift(engine)) % n;
        let mut out = FockState::zero(new_sector);
        let shift_elt = LatticeElt::from_weight(lat, &self.shift)?;
        for (key, coef) in state.terms() {
            let beta = lat.from_free_basis(&key.lattice);
            let zm_scalar = self.zero_mode_scalar(engine, &beta);
            let z0 = self.static_zdeg(engine, &var, &beta);
            let ket_elt = LatticeElt::new(key.lattice.clone(), false);
            let new_elt = shift_elt.mul(&ket_elt, lat);
            let mut base_coef = coef.mul(&self.pre).mul(&zm_scalar);
            if new_elt.is_negative() {
                base_coef = base_coef.neg();
            }
            if base_coef.is_zero() {
                continue;
            }
            for (ann_coef, reduced, ann_deg) in
                self.expand_annihilation(engine, &var, &key.bosons)?
            {
                // creation degree forced by the variable balance
                let t = -l - z0 + QExp::from_integer(ann_deg);
                if !t.is_integer() || *t.numer() < 0 {
                    continue;
                }
                let t = *t.numer();
                for (cre_coef, created) in self.expand_creation(engine, &var, t)? {
                    let mut bos = reduced.clone();
                    for (&(j, k), &m) in created.factors() {
                        for _ in 0..m {
                            bos = bos.with(j, k);
                        }
                    }
                    out.add_term(
                        FockKey { bosons: bos, lattice: new_elt.exps().to_vec() },
                        base_coef.mul_qrat(&ann_coef).mul_qrat(&cre_coef),
                    )?;
                }
            }
        }
        Ok(out)
    }

    /// Multi-variable companion of [`Self::apply_mode`]: extract one mode
    /// per formal variable simultaneously (used for merged products).
    pub(crate) fn apply_modes_multi(
        &self,
        engine: &Engine,
        modes: &BTreeMap<String, QExp>,
        state: &FockState,
    ) -> Result<FockState, EngineError> {
        let vars: Vec<String> = self.vars().into_iter().collect();
        let lat = engine.lattice();
        let n = engine.n();
        let new_sector = (state.sector() + self.sector_shift(engine)) % n;
        let mut out = FockState::zero(new_sector);
        let shift_elt = LatticeElt::from_weight(lat, &self.shift)?;
        for (key, coef) in state.terms() {
            let beta = lat.from_free_basis(&key.lattice);
            let zm_scalar = self.zero_mode_scalar(engine, &beta);
            let ket_elt = LatticeElt::new(key.lattice.clone(), false);
            let new_elt = shift_elt.mul(&ket_elt, lat);
            let mut base_coef = coef.mul(&self.pre).mul(&zm_scalar);
            if new_elt.is_negative() {
                base_coef = base_coef.neg();
            }
            if base_coef.is_zero() {
                continue;
            }
            // annihilate variable by variable, tracking per-variable degree
            let mut layers: Vec<(QRat, BosonMono, Vec<i64>)> =
                vec![(QRat::one(), key.bosons.clone(), vec![0; vars.len()])];
            for (vi, v) in vars.iter().enumerate() {
                let mut next = Vec::new();
                for (c, m, degs) in &layers {
                    for (c2, m2, d2) in self.expand_annihilation(engine, v, m)? {
                        let mut degs = degs.clone();
                        degs[vi] += d2;
                        next.push((c.mul(&c2), m2, degs));
                    }
                }
                layers = next;
            }
            for (ann_coef, reduced, ann_degs) in &layers {
                // per-variable creation degrees forced by the balances
                let mut ts = Vec::with_capacity(vars.len());
                let mut ok = true;
                for (vi, v) in vars.iter().enumerate() {
                    let l = modes.get(v).copied().unwrap_or_else(QExp::zero);
                    let z0 = self.static_zdeg(engine, v, &beta);
                    let t = -l - z0 + QExp::from_integer(ann_degs[vi]);
                    if !t.is_integer() || *t.numer() < 0 {
                        ok = false;
                        break;
                    }
                    ts.push(*t.numer());
                }
                if !ok {
                    continue;
                }
                // creation per variable, combined multiplicatively
                let mut combos: Vec<(QRat, BosonMono)> =
                    vec![(ann_coef.clone(), reduced.clone())];
                for (vi, v) in vars.iter().enumerate() {
                    let creations = self.expand_creation(engine, v, ts[vi])?;
                    let mut next = Vec::new();
                    for (c, m) in &combos {
                        for (c2, created) in &creations {
                            let mut bos = m.clone();
                            for (&(j, k), &mult) in created.factors() {
                                for _ in 0..mult {
                                    bos = bos.with(j, k);
                                }
                            }
                            next.push((c.mul(c2), bos));
                        }
                    }
                    combos = next;
                }
                for (c, bos) in combos {
                    out.add_term(
                        FockKey { bosons: bos, lattice: new_elt.exps().to_vec() },
                        base_coef.mul_qrat(&c),
                    )?;
                }
            }
        }
        Ok(out)
    }

    /// All results of `exp(annihilation exponent)` on one creation monomial:
    /// `(coefficient, reduced monomial, annihilated degree)`.
    fn expand_annihilation(
        &self,
        engine: &Engine,
        var: &str,
        mono: &BosonMono,
    ) -> Result<Vec<(QRat, BosonMono, i64)>, EngineError> {
        let mut acc: Vec<(QRat, BosonMono, i64)> = vec![(QRat::one(), mono.clone(), 0)];
        if self.pos.is_empty() {
            return Ok(acc);
        }
        let ks: BTreeSet<i64> = mono.factors().map(|(&(_, k), _)| k).collect();
        let n = engine.n();
        for k in ks {
            let coefs: Vec<QRat> = (0..n)
                .map(|j| if j == 0 { QRat::zero() } else { self.pos_coef(engine, var, j, k) })
                .collect();
            if coefs.iter().all(|c| c.is_zero()) {
                continue;
            }
            // exp(L_k), L_k = Σ_j P_j(k) a_{j,k}: expand power by power
            let mut next = Vec::new();
            for (c0, m0, d0) in &acc {
                next.push((c0.clone(), m0.clone(), *d0));
                let mut layer: Vec<(QRat, BosonMono)> = vec![(c0.clone(), m0.clone())];
                let mut mth = 0i64;
                loop {
                    mth += 1;
                    let mut new_layer: BTreeMap<BosonMono, QRat> = BTreeMap::new();
                    for (c, m) in &layer {
                        for j in 1..n {
                            if coefs[j].is_zero() {
                                continue;
                            }
                            for (&(j2, k2), &mult) in m.clone().factors() {
                                if k2 != k {
                                    continue;
                                }
                                let comm = engine.boson_commutator(j, k, j2, -k2);
                                if comm.is_zero() {
                                    continue;
                                }
                                let reduced = m.without(j2, k2).expect("factor present");
                                let add = c
                                    .mul(&coefs[j])
                                    .mul(&comm)
                                    .mul(&QRat::from_int(i64::from(mult)));
                                let e = new_layer.entry(reduced).or_insert_with(QRat::zero);
                                *e = e.add(&add);
                            }
                        }
                    }
                    new_layer.retain(|_, c| !c.is_zero());
                    if new_layer.is_empty() {
                        break;
                    }
                    layer = new_layer.into_iter().map(|(m, c)| (c, m)).collect();
                    let inv_fact = QRat::from_ratio(Ratio::new(1, mth));
                    for (c, m) in layer.iter_mut() {
                        *c = c.mul(&inv_fact);
                        next.push((c.clone(), m.clone(), d0 + mth * k));
                    }
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    /// All degree-`t` terms of `exp(creation exponent)`:
    /// `(coefficient, created monomial)`.
    fn expand_creation(
        &self,
        engine: &Engine,
        var: &str,
        t: i64,
    ) -> Result<Vec<(QRat, BosonMono)>, EngineError> {
        if t == 0 {
            return Ok(vec![(QRat::one(), BosonMono::one())]);
        }
        if self.neg.is_empty() {
            return Ok(Vec::new());
        }
        let n = engine.n();
        let mut channels: Vec<((usize, i64), QRat)> = Vec::new();
        for k in 1..=t {
            for j in 1..n {
                let c = self.neg_coef(engine, var, j, k);
                if !c.is_zero() {
                    channels.push(((j, k), c));
                }
            }
        }
        fn rec(
            channels: &[((usize, i64), QRat)],
            idx: usize,
            remaining: i64,
            coef: &QRat,
            mono: &BosonMono,
            out: &mut Vec<(QRat, BosonMono)>,
        ) {
            if remaining == 0 {
                out.push((coef.clone(), mono.clone()));
                return;
            }
            if idx >= channels.len() {
                return;
            }
            let ((j, k), ref c) = channels[idx];
            let mut m = 0i64;
            let mut term = coef.clone();
            let mut mono_m = mono.clone();
            loop {
                rec(channels, idx + 1, remaining - m * k, &term, &mono_m, out);
                m += 1;
                if m * k > remaining {
                    break;
                }
                term = term.mul(c).mul(&QRat::from_ratio(Ratio::new(1, m)));
                mono_m = mono_m.with(j, k);
            }
        }
        let mut out = Vec::new();
        rec(&channels, 0, t, &QRat::one(), &BosonMono::one(), &mut out);
        Ok(out)
    }

    /// Canonical text dump: prefactor, variable powers, lattice shift,
    /// weight factors, and the first `k_max` mode coefficients per colour.
    pub fn dump(&self, engine: &Engine, k_max: i64) -> String {
        let coords = |w: &WeightVec| -> String {
            let parts: Vec<String> = w
                .coords()
                .iter()
                .map(|c| format!("{}/{}", c.numer(), c.denom()))
                .collect();
            format!("[{}]", parts.join(","))
        };
        let mut out = String::new();
        out.push_str(&format!("prefactor: {}\n", self.pre));
        for (v, e) in &self.pre_z {
            out.push_str(&format!(
                "prefactor power: {v}^{}/{}\n",
                e.numer(),
                e.denom()
            ));
        }
        out.push_str(&format!("lattice shift: {}\n", coords(&self.shift)));
        for z in &self.zpows {
            out.push_str(&format!(
                "weight factor: (q^{}/{}{})^d_{}\n",
                z.base.numer(),
                z.base.denom(),
                z.var.as_deref().map(|v| format!("*{v}")).unwrap_or_default(),
                coords(&z.gamma)
            ));
        }
        for p in &self.phases {
            out.push_str(&format!(
                "phase factor: (-1)^({}/{} d_{})\n",
                p.r.numer(),
                p.r.denom(),
                coords(&p.gamma)
            ));
        }
        for v in self.vars() {
            for k in 1..=k_max {
                for j in 1..engine.n() {
                    let nc = self.neg_coef(engine, &v, j, k);
                    if !nc.is_zero() {
                        out.push_str(&format!("neg[{j},{k}]({v}): {nc}\n"));
                    }
                    let pc = self.pos_coef(engine, &v, j, k);
                    if !pc.is_zero() {
                        out.push_str(&format!("pos[{j},{k}]({v}): {pc}\n"));
                    }
                }
            }
        }
        out
    }
}

fn osc_coef(
    engine: &Engine,
    atoms: &[OscAtom],
    var: &str,
    jp: usize,
    k: i64,
    negside: bool,
) -> QRat {
    debug_assert!(k > 0);
    let mut acc = QRat::zero();
    for a in atoms {
        if a.var != var {
            continue;
        }
        let kind = match a.kind {
            AtomKind::InvQint => QRat::one().div(&crate::scalar::qint(k)).unwrap(),
            AtomKind::QmQinv => crate::scalar::q_minus_qinv(),
            AtomKind::Unit => QRat::one(),
        };
        let base_pow = if negside { a.base } else { -a.base };
        let weight = QRat::q_pow((a.half + base_pow) * QExp::from_integer(k));
        let sgn = QRat::from_int(i64::from(a.sign));
        let head = sgn.mul(&weight).mul(&kind);
        if a.dual {
            let mode = if negside { -k } else { k };
            for (j2, c) in engine.astar_expand(a.boson, mode) {
                if j2 == jp {
                    acc = acc.add(&head.mul(&c));
                }
            }
        } else if a.boson == jp {
            acc = acc.add(&head);
        }
    }
    acc
}

/// Scalar part of a contraction: a truncated series in `zr/zl` together with
/// eigenvalue monomials and the cocycle sign produced by the reordering.
#[derive(Clone, Debug)]
pub struct ContractionScalar {
    pub series: FracLaurentSeries,
    /// Extra per-variable powers from weight factors crossing the lattice.
    pub var_pows: BTreeMap<String, QExp>,
    /// q-monomial, phase and cocycle sign.
    pub scalar: Scalar,
}

/// One contraction series `exp Σ_k P_L(k) N_R(k) [a,a] (num/den)^k`.
#[derive(Clone, Debug)]
pub struct SeriesPart {
    pub series: FracLaurentSeries,
    pub num: String,
    pub den: String,
}

/// Full operator product `left·right` for a right factor in one variable
/// and a left factor in any number of them: one contraction series per left
/// variable, the crossing eigenvalue data, and the merged template.
pub fn contract_general(
    engine: &Engine,
    left: &VertexTemplate,
    right: &VertexTemplate,
    order: i64,
) -> Result<(Vec<SeriesPart>, ContractionScalar, VertexTemplate), EngineError> {
    let rv = right.single_var()?;
    if left.vars().contains(&rv) {
        return Err(EngineError::domain(
            "contraction requires distinct formal variables",
        ));
    }
    let lat = engine.lattice();
    let n = engine.n();
    let mut parts = Vec::new();
    for lv in left.vars() {
        let ratio = format!("{rv}/{lv}");
        let mut exponent = FracLaurentSeries::zero(ratio, QExp::from_integer(order));
        for k in 1..order {
            let mut c = QRat::zero();
            for j1 in 1..n {
                let p = left.pos_coef(engine, &lv, j1, k);
                if p.is_zero() {
                    continue;
                }
                for j2 in 1..n {
                    let nn = right.neg_coef(engine, &rv, j2, k);
                    if nn.is_zero() {
                        continue;
                    }
                    c = c.add(&p.mul(&nn).mul(&engine.boson_commutator(j1, k, j2, -k)));
                }
            }
            exponent.set(QExp::from_integer(k), Scalar::from_qrat(c));
        }
        let series = exponent.exp()?;
        if !series.agrees_with(&FracLaurentSeries::one(series.var(), series.order())) {
            parts.push(SeriesPart { series, num: rv.clone(), den: lv.clone() });
        }
    }

    // left weight and phase factors crossing the right lattice shift
    let mut cross_scalar = Scalar::one();
    let mut cross_pows: BTreeMap<String, QExp> = BTreeMap::new();
    for z in &left.zpows {
        let ev = lat.pairing(&z.gamma, &right.shift);
        cross_scalar = cross_scalar.mul_qrat(&QRat::q_pow(z.base * ev));
        if let Some(v) = &z.var {
            if !ev.is_zero() {
                *cross_pows.entry(v.clone()).or_insert_with(QExp::zero) += ev;
            }
        }
    }
    for p in &left.phases {
        let ev = lat.pairing(&p.gamma, &right.shift);
        cross_scalar = cross_scalar.mul_phase(p.r * ev);
    }
    let el = LatticeElt::from_weight(lat, &left.shift)?;
    let er = LatticeElt::from_weight(lat, &right.shift)?;
    if el.mul(&er, lat).is_negative() {
        cross_scalar = cross_scalar.neg();
    }

    let merged = merge(left, right);
    Ok((
        parts,
        ContractionScalar {
            series: FracLaurentSeries::one("1", QExp::from_integer(order)),
            var_pows: cross_pows,
            scalar: cross_scalar,
        },
        merged,
    ))
}

/// Coefficient of `x^k` in the contraction exponent between the left
/// template's variable `lv` and the right template.
fn contraction_exponent_coef(
    engine: &Engine,
    left: &VertexTemplate,
    lv: &str,
    right: &VertexTemplate,
    rv: &str,
    k: i64,
) -> QRat {
    let n = engine.n();
    let mut c = QRat::zero();
    for j1 in 1..n {
        let p = left.pos_coef(engine, lv, j1, k);
        if p.is_zero() {
            continue;
        }
        for j2 in 1..n {
            let nn = right.neg_coef(engine, rv, j2, k);
            if nn.is_zero() {
                continue;
            }
            c = c.add(&p.mul(&nn).mul(&engine.boson_commutator(j1, k, j2, -k)));
        }
    }
    c
}

/// Closed geometric form of a contraction exponent: returns pairs
/// `(multiplicity, μ)` such that `k·c_k = Σ mult·q^{μ·k}` for all probed k,
/// so the contraction factor is `Π (1 - q^{μ} x)^{-mult}` exactly.
/// Fails when the exponent is not of this finite-geometric shape.
pub fn contraction_fit(
    engine: &Engine,
    left: &VertexTemplate,
    lv: &str,
    right: &VertexTemplate,
    rv: &str,
    probe: i64,
) -> Result<Vec<(i64, QExp)>, EngineError> {
    let p1 = contraction_exponent_coef(engine, left, lv, right, rv, 1);
    if !p1.den().is_one() {
        return Err(EngineError::domain(
            "contraction exponent is not finitely geometric",
        ));
    }
    let mut fit: Vec<(i64, QExp)> = Vec::new();
    for (e, c) in p1.num().terms() {
        let c: i64 = i64::try_from(c.clone()).map_err(|_| {
            EngineError::domain("contraction multiplicity out of range")
        })?;
        fit.push((c, *e));
    }
    for k in 1..=probe {
        let got = contraction_exponent_coef(engine, left, lv, right, rv, k)
            .mul(&QRat::from_int(k));
        let mut want = QRat::zero();
        for (m, mu) in &fit {
            want = want.add(&QRat::q_pow(*mu * QExp::from_integer(k)).mul(&QRat::from_int(*m)));
        }
        if got != want {
            return Err(EngineError::domain(
                "contraction exponent is not finitely geometric",
            ));
        }
    }
    Ok(fit)
}

/// Product of two templates at the same single variable: the contraction
/// collapses to an exact scalar `Π (1 - q^{μ})^{-mult}` (an error if some
/// `μ = 0`), and the result is one merged template in that variable.
pub fn same_var_product(
    engine: &Engine,
    left: &VertexTemplate,
    right: &VertexTemplate,
) -> Result<VertexTemplate, EngineError> {
    let v = left.single_var()?;
    if right.single_var()? != v {
        return Err(EngineError::validation(
            "same-variable product requires identical variables",
        ));
    }
    let tmp = "__pinned";
    let renamed = right.substitute(&v, QExp::zero(), tmp);
    let fit = contraction_fit(engine, left, &v, &renamed, tmp, 12)?;
    let mut factor = QRat::one();
    for (m, mu) in fit {
        if mu.is_zero() {
            return Err(EngineError::domain(
                "same-variable product has a pole at coincident arguments",
            ));
        }
        let base = QRat::one().sub(&QRat::q_pow(mu));
        factor = factor.mul(&base.pow(-m)?);
    }
    let (_, sc, merged) = contract_general(engine, left, &renamed, 2)?;
    let mut out = merged.substitute(tmp, QExp::zero(), &v);
    out.pre = out.pre.mul(&sc.scalar).mul_qrat(&factor);
    for (var, e) in sc.var_pows {
        // eigenvalue powers of tmp belong to the shared variable
        let var = if var == tmp { v.clone() } else { var };
        *out.pre_z.entry(var).or_insert_with(QExp::zero) += e;
    }
    Ok(out)
}

/// Two-template product with both factors in a single variable.
pub fn contract(
    engine: &Engine,
    left: &VertexTemplate,
    right: &VertexTemplate,
    order: i64,
) -> Result<(ContractionScalar, VertexTemplate), EngineError> {
    let lv = left.single_var()?;
    let rv = right.single_var()?;
    let (parts, sc, merged) = contract_general(engine, left, right, order)?;
    let series = match parts.into_iter().next() {
        Some(p) => p.series,
        None => FracLaurentSeries::one(format!("{rv}/{lv}"), QExp::from_integer(order)),
    };
    Ok((
        ContractionScalar { series, var_pows: sc.var_pows, scalar: sc.scalar },
        merged,
    ))
}

/// The normal-ordered product `:left·right:`: data concatenated, lattice
/// shifts multiplied with their cocycle sign, no contraction factor and no
/// crossing eigenvalues.
pub fn normal_ordered(
    engine: &Engine,
    left: &VertexTemplate,
    right: &VertexTemplate,
) -> Result<VertexTemplate, EngineError> {
    let lat = engine.lattice();
    let el = LatticeElt::from_weight(lat, &left.shift)?;
    let er = LatticeElt::from_weight(lat, &right.shift)?;
    let mut t = merge(left, right);
    if el.mul(&er, lat).is_negative() {
        t.pre = t.pre.neg();
    }
    Ok(t)
}

fn merge(left: &VertexTemplate, right: &VertexTemplate) -> VertexTemplate {
    let mut pre_z = left.pre_z.clone();
    for (v, e) in &right.pre_z {
        *pre_z.entry(v.clone()).or_insert_with(QExp::zero) += *e;
    }
    VertexTemplate {
        neg: left.neg.iter().chain(&right.neg).cloned().collect(),
        pos: left.pos.iter().chain(&right.pos).cloned().collect(),
        shift: left.shift.add(&right.shift),
        zpows: left.zpows.iter().chain(&right.zpows).cloned().collect(),
        phases: left.phases.iter().chain(&right.phases).cloned().collect(),
        pre: left.pre.mul(&right.pre),
        pre_z,
    }
}

/// Exact template equality: prefactor, variable powers, lattice shift,
/// canonical weight/phase data, and all mode coefficients up to `k_cutoff`
/// for every boson colour.
pub fn template_eq(
    engine: &Engine,
    a: &VertexTemplate,
    b: &VertexTemplate,
    k_cutoff: i64,
) -> Result<bool, EngineError> {
    Ok(template_diff(engine, a, b, k_cutoff)?.is_none())
}

/// First difference found between two templates, as a printable label.
pub fn template_diff(
    engine: &Engine,
    a: &VertexTemplate,
    b: &VertexTemplate,
    k_cutoff: i64,
) -> Result<Option<String>, EngineError> {
    let lat = engine.lattice();
    if a.shift != b.shift {
        return Ok(Some("lattice shift".into()));
    }
    if a.pre != b.pre {
        return Ok(Some(format!("prefactor {} vs {}", a.pre, b.pre)));
    }
    let zp = |t: &VertexTemplate, v: &str| t.pre_z.get(v).copied().unwrap_or_else(QExp::zero);
    let vars: BTreeSet<String> = a.vars().union(&b.vars()).cloned().collect();
    for v in &vars {
        if zp(a, v) != zp(b, v) {
            return Ok(Some(format!("prefactor power of {v}")));
        }
    }
    let zweight = |t: &VertexTemplate, v: &str| {
        let mut w = WeightVec::zero(engine.n());
        for z in &t.zpows {
            if z.var.as_deref() == Some(v) {
                w = w.add(&z.gamma);
            }
        }
        w
    };
    for v in &vars {
        if zweight(a, v) != zweight(b, v) {
            return Ok(Some(format!("weight-factor power of {v}")));
        }
    }
    let qweight = |t: &VertexTemplate| {
        let mut w = WeightVec::zero(engine.n());
        for z in &t.zpows {
            w = w.add(&z.gamma.scale(z.base));
        }
        w
    };
    if qweight(a) != qweight(b) {
        return Ok(Some("q-weight of the zero mode".into()));
    }
    let phase_weight = |t: &VertexTemplate| {
        let mut w = WeightVec::zero(engine.n());
        for p in &t.phases {
            w = w.add(&p.gamma.scale(p.r));
        }
        w
    };
    // phases agree iff the pairing of the difference with every free-basis
    // generator is an even integer
    let dw = phase_weight(a).sub(&phase_weight(b));
    for g in 0..lat.rank() {
        let mut exps = vec![0i64; lat.rank()];
        exps[g] = 1;
        let gen = lat.from_free_basis(&exps);
        let p = lat.pairing(&dw, &gen);
        if !p.is_integer() || p.numer() % 2 != 0 {
            return Ok(Some("phase factor".into()));
        }
    }
    for v in &vars {
        for k in 1..=k_cutoff {
            for j in 1..engine.n() {
                if a.neg_coef(engine, v, j, k) != b.neg_coef(engine, v, j, k) {
                    return Ok(Some(format!("creation coefficient ({j},-{k}) at {v}")));
                }
                if a.pos_coef(engine, v, j, k) != b.pos_coef(engine, v, j, k) {
                    return Ok(Some(format!("annihilation coefficient ({j},{k}) at {v}")));
                }
            }
        }
    }
    Ok(None)
}
