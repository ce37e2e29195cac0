//! Coefficient-wise evaluation of current relations on Fock modules.
//!
//! A relation is a sum of terms, each a scalar multiple of
//! `Π (scalar factors) · Π_slot (operator product)`,
//! asserted to annihilate every state. Scalar factors are formal δ-supports
//! `δ((v_a/v_b)·q^s)`, rational functions expanded about a declared ratio
//! direction, or finite Laurent polynomials in the formal variables.
//!
//! Evaluation first collapses every slot product into contraction data times
//! one merged template (Wick's theorem), then extracts the requested modes.
//! After the collapse each slot carries a single normal-ordered operator, so
//! every mode of it on a fixed state has annihilation-bounded support and
//! all convolution sums are provably finite: δ indices are pinned by a
//! variable that carries no operators, and each expansion index is bounded
//! through the support of the variable it raises.

use super::template::{contract_general, VertexTemplate};
use crate::error::EngineError;
use crate::fock::TensorState;
use crate::scalar::ratfn::Direction;
use crate::scalar::{FracLaurentSeries, QExp, QRat, RatFunc, Scalar};
use crate::Engine;
use std::collections::BTreeMap;

/// A scalar factor of a relation term.
#[derive(Clone, Debug)]
pub enum Factor {
    /// `δ((num/den)·q^{qshift}) = Σ_{k∈Z} q^{qshift·k} num^k den^{-k}`
    Delta { num: String, den: String, qshift: QExp },
    /// Rational function of `num/den`, expanded about `num/den → 0`.
    Expand { f: RatFunc, num: String, den: String },
    /// Finite sum `Σ c · Π v^{e_v}`.
    Poly { terms: Vec<(BTreeMap<String, i64>, QRat)> },
}

impl Factor {
    /// `(v_a - c·q^e v_b)` as a polynomial factor.
    pub fn linear(va: &str, vb: &str, c: i64, e: QExp) -> Self {
        let mut t1 = BTreeMap::new();
        t1.insert(va.to_string(), 1);
        let mut t2 = BTreeMap::new();
        t2.insert(vb.to_string(), 1);
        Factor::Poly {
            terms: vec![
                (t1, QRat::one()),
                (t2, QRat::from_int(-c).mul(&QRat::q_pow(e))),
            ],
        }
    }
}

/// One term: `coef · factors · (slot_1 ⊗ … ⊗ slot_m)`, operators listed
/// left to right within a slot.
#[derive(Clone, Debug)]
pub struct RelTerm {
    pub coef: Scalar,
    pub factors: Vec<Factor>,
    pub slots: Vec<Vec<VertexTemplate>>,
}

impl RelTerm {
    pub fn new(coef: Scalar, slots: Vec<Vec<VertexTemplate>>) -> Self {
        RelTerm { coef, factors: Vec::new(), slots }
    }

    pub fn with_factor(mut self, f: Factor) -> Self {
        self.factors.push(f);
        self
    }
}

/// A relation `Σ terms = 0` in the listed formal variables.
#[derive(Clone, Debug)]
pub struct Relation {
    pub name: String,
    pub vars: Vec<String>,
    pub terms: Vec<RelTerm>,
}

/// One series factor in a fixed orientation (`num/den` ascending).
struct SeriesFactor {
    series: FracLaurentSeries,
    num: String,
    den: String,
}

/// Collapse a slot product into scalar data and one merged template.
fn collapse_slot(
    engine: &Engine,
    ops: &[VertexTemplate],
    order: i64,
) -> Result<(Scalar, BTreeMap<String, QExp>, Vec<SeriesFactor>, VertexTemplate), EngineError> {
    let n = engine.n();
    let mut acc = match ops.first() {
        Some(t) => t.clone(),
        None => VertexTemplate::identity(n),
    };
    let mut scalar = Scalar::one();
    let mut pows: BTreeMap<String, QExp> = BTreeMap::new();
    let mut series: Vec<SeriesFactor> = Vec::new();
    for op in ops.iter().skip(1) {
        let shared: Vec<String> = acc.vars().intersection(&op.vars()).cloned().collect();
        if shared.is_empty() {
            let (parts, sc, merged) = contract_general(engine, &acc, op, order)?;
            for p in parts {
                series.push(SeriesFactor { series: p.series, num: p.num, den: p.den });
            }
            scalar = scalar.mul(&sc.scalar);
            for (v, e) in sc.var_pows {
                *pows.entry(v).or_insert_with(QExp::zero) += e;
            }
            acc = merged;
        } else {
            // same-variable product: rename, contract, and demand a trivial
            // Wick factor (all same-variable products in the suites pair a
            // creation-free side against an annihilation-free side)
            let tmp = "__same_var_tmp";
            let mut renamed = op.clone();
            for v in &shared {
                renamed = renamed.substitute(v, QExp::zero(), tmp);
            }
            let (parts, sc, merged) = contract_general(engine, &acc, &renamed, order)?;
            if !parts.is_empty() {
                return Err(EngineError::validation(
                    "same-variable product with a nontrivial contraction",
                ));
            }
            scalar = scalar.mul(&sc.scalar);
            for (v, e) in sc.var_pows {
                *pows.entry(v).or_insert_with(QExp::zero) += e;
            }
            let mut back = merged;
            if back.vars().contains(tmp) {
                for v in &shared {
                    back = back.substitute(tmp, QExp::zero(), v);
                    break;
                }
            }
            acc = back;
        }
    }
    Ok((scalar, pows, series, acc))
}

use num_traits::Zero;

/// A relation term with every slot product already collapsed to one merged
/// template plus scalar contraction data, ready for repeated evaluation.
pub struct CollapsedTerm {
    scalar: Scalar,
    pows: BTreeMap<String, QExp>,
    series: Vec<SeriesFactor>,
    deltas: Vec<(String, String, QExp)>,
    polys: Vec<Vec<(BTreeMap<String, i64>, QRat)>>,
    slots: Vec<VertexTemplate>,
}

/// A relation prepared for evaluation at expansion order `order` (which must
/// cover every convolution index the state supports allow; the per-ket
/// budget check in the evaluator guards this).
pub struct CollapsedRelation {
    pub name: String,
    pub vars: Vec<String>,
    terms: Vec<CollapsedTerm>,
    order: i64,
}

/// Collapse all slot products of a relation at the given expansion order.
pub fn collapse_relation(
    engine: &Engine,
    rel: &Relation,
    order: i64,
) -> Result<CollapsedRelation, EngineError> {
    let mut terms = Vec::new();
    for term in &rel.terms {
        let mut slots = Vec::new();
        let mut scalar = term.coef.clone();
        let mut pows: BTreeMap<String, QExp> = BTreeMap::new();
        let mut series: Vec<SeriesFactor> = Vec::new();
        for ops in &term.slots {
            let (sc, p, mut sf, tpl) = collapse_slot(engine, ops, order)?;
            scalar = scalar.mul(&sc);
            for (v, e) in p {
                *pows.entry(v).or_insert_with(QExp::zero) += e;
            }
            series.append(&mut sf);
            slots.push(tpl);
        }
        let mut deltas = Vec::new();
        let mut polys = Vec::new();
        for f in &term.factors {
            match f {
                Factor::Delta { num, den, qshift } => {
                    deltas.push((num.clone(), den.clone(), *qshift))
                }
                Factor::Expand { f, num, den } => {
                    let sx = f
                        .expand(Direction::AtZero, format!("{num}/{den}"), order)
                        .map_err(|e| {
                            EngineError::validation(format!("factor expansion failed: {e}"))
                        })?;
                    series.push(SeriesFactor {
                        series: sx,
                        num: num.clone(),
                        den: den.clone(),
                    });
                }
                Factor::Poly { terms } => polys.push(terms.clone()),
            }
        }
        terms.push(CollapsedTerm { scalar, pows, series, deltas, polys, slots });
    }
    Ok(CollapsedRelation {
        name: rel.name.clone(),
        vars: rel.vars.clone(),
        terms,
        order,
    })
}

/// Evaluate `Σ terms` at the given target modes on a tensor ket.
/// The relation holds at these modes on this ket iff the result is zero.
pub fn eval_relation_on_ket(
    engine: &Engine,
    rel: &Relation,
    targets: &BTreeMap<String, QExp>,
    ket: &TensorState,
) -> Result<TensorState, EngineError> {
    // order: generous width from supports of a token collapse
    let mut order = 6i64;
    for term in &rel.terms {
        let mut widths: BTreeMap<String, QExp> = BTreeMap::new();
        for (slot_idx, ops) in term.slots.iter().enumerate() {
            let (_, _, _, tpl) = collapse_slot(engine, ops, 2)?;
            let single = single_slot_state(ket, slot_idx);
            for v in tpl.vars() {
                let (_, hi) = tpl.mode_support_var(engine, &v, &single);
                if let Some(hi) = hi {
                    *widths.entry(v).or_insert_with(QExp::zero) += hi;
                }
            }
        }
        for (v, w) in widths {
            let t = targets.get(&v).copied().unwrap_or_else(QExp::zero);
            let width = w - t;
            if width > QExp::from_integer(order - 4) {
                order = width.to_integer() + 6;
            }
        }
    }
    let collapsed = collapse_relation(engine, rel, order)?;
    eval_collapsed_on_ket(engine, &collapsed, targets, ket)
}

/// Evaluate a prepared relation. Errors if the prepared expansion order is
/// too small for the supports of this ket.
pub fn eval_collapsed_on_ket(
    engine: &Engine,
    rel: &CollapsedRelation,
    targets: &BTreeMap<String, QExp>,
    ket: &TensorState,
) -> Result<TensorState, EngineError> {
    let mut out: Option<TensorState> = None;
    for term in &rel.terms {
        let contrib = eval_term(engine, term, rel.order, targets, ket)?;
        out = Some(match out {
            None => contrib,
            Some(acc) => acc.add(&contrib)?,
        });
    }
    out.ok_or_else(|| EngineError::validation("relation with no terms"))
}

fn eval_term(
    engine: &Engine,
    term: &CollapsedTerm,
    order: i64,
    targets: &BTreeMap<String, QExp>,
    ket: &TensorState,
) -> Result<TensorState, EngineError> {
    let slots = &term.slots;
    let scalar = &term.scalar;
    let sectors = out_sectors(engine, slots, ket);
    if scalar.is_zero() {
        return Ok(TensorState::zero(sectors));
    }
    let var_slot = |v: &str| -> Option<usize> {
        slots.iter().position(|t| t.vars().contains(v))
    };

    let mut acc = TensorState::zero(sectors);
    let poly_refs: Vec<&Vec<(BTreeMap<String, i64>, QRat)>> = term.polys.iter().collect();
    for (poly_shift, poly_coef) in cartesian(&poly_refs) {
        // δ indices are pinned through a variable with no operators
        let mut delta_shift: BTreeMap<String, QExp> = BTreeMap::new();
        let mut delta_scalar = QRat::one();
        let mut pinned_ok = true;
        for (num, den, qs) in &term.deltas {
            let k = if var_slot(num).is_none() {
                let t = targets.get(num).copied().unwrap_or_else(QExp::zero)
                    + poly_shift
                        .get(num)
                        .map(|e| QExp::from_integer(*e))
                        .unwrap_or_else(QExp::zero);
                -t
            } else if var_slot(den).is_none() {
                targets.get(den).copied().unwrap_or_else(QExp::zero)
                    + poly_shift
                        .get(den)
                        .map(|e| QExp::from_integer(*e))
                        .unwrap_or_else(QExp::zero)
            } else {
                return Err(EngineError::validation(
                    "δ factor with operators on both variables in a modewise check",
                ));
            };
            if !k.is_integer() {
                pinned_ok = false;
                break;
            }
            delta_scalar = delta_scalar.mul(&QRat::q_pow(*qs * k));
            *delta_shift.entry(num.clone()).or_insert_with(QExp::zero) += k;
            *delta_shift.entry(den.clone()).or_insert_with(QExp::zero) -= k;
        }
        if !pinned_ok {
            continue;
        }

        // per-variable raise budgets from the summed slot supports
        let mut budget: BTreeMap<String, QExp> = BTreeMap::new();
        for (si, tpl) in slots.iter().enumerate() {
            let single = single_slot_state(ket, si);
            for v in tpl.vars() {
                let (_, hi) = tpl.mode_support_var(engine, &v, &single);
                match hi {
                    Some(h) => {
                        *budget.entry(v).or_insert_with(QExp::zero) += h;
                    }
                    None => {
                        return Err(EngineError::validation(
                            "slot support unavailable for a series variable",
                        ))
                    }
                }
            }
        }
        for (v, b) in budget.iter_mut() {
            let t = targets.get(v).copied().unwrap_or_else(QExp::zero)
                + delta_shift.get(v).copied().unwrap_or_else(QExp::zero);
            *b = *b - t + QExp::from_integer(2);
        }
        // per-factor index caps: an index raising `num` is bounded by the
        // num-variable budget plus whatever later factors can lower it again;
        // solve K_g = B(num_g) + Σ_{h: den_h = num_g} K_h by fixpoint (the
        // factor ratio graph of every suite is acyclic)
        let series = &term.series;
        let mut caps: Vec<i64> = vec![0; series.len()];
        for (g, sf) in series.iter().enumerate() {
            caps[g] = budget
                .get(&sf.num)
                .map(|b| b.ceil().to_integer())
                .unwrap_or(0)
                .max(0);
        }
        for _round in 0..series.len() + 1 {
            let mut changed = false;
            for g in 0..series.len() {
                let mut k = budget
                    .get(&series[g].num)
                    .map(|b| b.ceil().to_integer())
                    .unwrap_or(0);
                for (h, other) in series.iter().enumerate() {
                    if h != g && other.den == series[g].num {
                        k += caps[h];
                    }
                }
                let k = k.max(0);
                if k != caps[g] {
                    caps[g] = k;
                    changed = true;
                }
            }
            if !changed {
                break;
            } else if _round == series.len() {
                return Err(EngineError::validation(
                    "cyclic convolution in a relation term",
                ));
            }
        }
        for (g, sf) in series.iter().enumerate() {
            if caps[g] >= order {
                return Err(EngineError::validation(format!(
                    "prepared expansion order {order} too small for the factor in {}/{}",
                    sf.num, sf.den
                )));
            }
        }
        let mut visit = |shifts: &BTreeMap<String, QExp>,
                         series_coef: &Scalar|
         -> Result<(), EngineError> {
            let mut modes: BTreeMap<String, QExp> = BTreeMap::new();
            let mut all_vars: Vec<&String> = targets.keys().collect();
            for v in shifts.keys() {
                if !targets.contains_key(v) {
                    all_vars.push(v);
                }
            }
            for v in all_vars {
                let mut m = targets.get(v).copied().unwrap_or_else(QExp::zero);
                if let Some(e) = poly_shift.get(v) {
                    m += QExp::from_integer(*e);
                }
                if let Some(e) = delta_shift.get(v) {
                    m += *e;
                }
                if let Some(e) = shifts.get(v) {
                    m += *e;
                }
                if let Some(e) = term.pows.get(v) {
                    m += *e;
                }
                modes.insert(v.clone(), m);
            }
            // a variable carried by several slots splits its mode across
            // them; enumerate the splits with per-slot support bounds
            let mut shared: Vec<(String, Vec<usize>)> = Vec::new();
            for v in modes.keys() {
                let carriers: Vec<usize> = slots
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.vars().contains(v))
                    .map(|(i, _)| i)
                    .collect();
                if carriers.len() > 1 {
                    shared.push((v.clone(), carriers));
                }
            }
            // per-slot mode tables, seeded with the sole-carrier variables
            let base_slot_modes: Vec<BTreeMap<String, QExp>> = slots
                .iter()
                .map(|t| {
                    t.vars()
                        .into_iter()
                        .filter(|v| {
                            !shared.iter().any(|(sv, _)| sv == v)
                        })
                        .map(|v| {
                            let m = modes.get(&v).copied().unwrap_or_else(QExp::zero);
                            (v, m)
                        })
                        .collect()
                })
                .collect();
            let total = scalar
                .mul(series_coef)
                .mul_qrat(&poly_coef)
                .mul_qrat(&delta_scalar);
            // recursive split enumeration
            fn rec(
                engine: &Engine,
                slots: &[VertexTemplate],
                ket: &TensorState,
                shared: &[(String, Vec<usize>)],
                idx: usize,
                slot_modes: &mut Vec<BTreeMap<String, QExp>>,
                modes: &BTreeMap<String, QExp>,
                total: &Scalar,
                acc: &mut TensorState,
            ) -> Result<(), EngineError> {
                if idx == shared.len() {
                    let mut state = ket.clone();
                    for (slot_idx, tpl) in slots.iter().enumerate() {
                        let in_sector = state.sectors()[slot_idx];
                        let sm = &slot_modes[slot_idx];
                        state = state.apply_slot(
                            slot_idx,
                            (in_sector + tpl.sector_shift(engine)) % engine.n(),
                            |key| {
                                let single =
                                    crate::fock::FockState::basis(in_sector, key.clone());
                                tpl.apply_modes(engine, sm, &single)
                            },
                        )?;
                        if state.is_zero() {
                            break;
                        }
                    }
                    *acc = acc.add(&state.scale(total))?;
                    return Ok(());
                }
                let (v, carriers) = &shared[idx];
                let m_total = modes.get(v).copied().unwrap_or_else(QExp::zero);
                // per-carrier support intervals on the current ket
                let mut his: Vec<QExp> = Vec::new();
                for &c in carriers {
                    let single = single_slot_state(ket, c);
                    let (_, hi) = slots[c].mode_support_var(engine, v, &single);
                    match hi {
                        Some(h) => his.push(h),
                        None => {
                            return Err(EngineError::validation(
                                "slot support unavailable for a shared variable",
                            ))
                        }
                    }
                }
                fn split_rec(
                    engine: &Engine,
                    slots: &[VertexTemplate],
                    ket: &TensorState,
                    shared: &[(String, Vec<usize>)],
                    idx: usize,
                    v: &str,
                    carriers: &[usize],
                    his: &[QExp],
                    pos: usize,
                    remaining: QExp,
                    slot_modes: &mut Vec<BTreeMap<String, QExp>>,
                    modes: &BTreeMap<String, QExp>,
                    total: &Scalar,
                    acc: &mut TensorState,
                ) -> Result<(), EngineError> {
                    if pos + 1 == carriers.len() {
                        slot_modes[carriers[pos]].insert(v.to_string(), remaining);
                        rec(engine, slots, ket, shared, idx + 1, slot_modes, modes, total, acc)?;
                        slot_modes[carriers[pos]].remove(v);
                        return Ok(());
                    }
                    // this carrier takes m ≤ hi[pos]; the rest must supply
                    // remaining − m ≤ Σ later hi, bounding m from below
                    let later: QExp = his[pos + 1..]
                        .iter()
                        .fold(QExp::zero(), |a, b| a + *b);
                    let mut m = remaining - later;
                    // modes live on the integer lattice offsets of `remaining`
                    m = m.floor();
                    while m <= his[pos] {
                        slot_modes[carriers[pos]].insert(v.to_string(), m);
                        split_rec(
                            engine, slots, ket, shared, idx, v, carriers, his,
                            pos + 1, remaining - m, slot_modes, modes, total, acc,
                        )?;
                        slot_modes[carriers[pos]].remove(v);
                        m += QExp::from_integer(1);
                    }
                    Ok(())
                }
                split_rec(
                    engine, slots, ket, shared, idx, v, carriers, &his, 0, m_total,
                    slot_modes, modes, total, acc,
                )
            }
            let mut slot_modes = base_slot_modes;
            rec(
                engine,
                slots,
                ket,
                &shared,
                0,
                &mut slot_modes,
                &modes,
                &total,
                &mut acc,
            )?;
            Ok(())
        };
        enumerate_series(
            &term.series,
            0,
            &mut visit,
            &BTreeMap::new(),
            &Scalar::one(),
            &caps,
        )?;
    }
    Ok(acc)
}

fn out_sectors(engine: &Engine, slots: &[VertexTemplate], ket: &TensorState) -> Vec<usize> {
    ket.sectors()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if i < slots.len() {
                (s + slots[i].sector_shift(engine)) % engine.n()
            } else {
                *s
            }
        })
        .collect()
}

fn single_slot_state(ket: &TensorState, slot: usize) -> crate::fock::FockState {
    let mut s = crate::fock::FockState::zero(ket.sectors()[slot]);
    for (keys, _) in ket.terms() {
        let _ = s.add_term(keys[slot].clone(), Scalar::one());
    }
    s
}

fn enumerate_series(
    series: &[SeriesFactor],
    pos: usize,
    visit: &mut dyn FnMut(&BTreeMap<String, QExp>, &Scalar) -> Result<(), EngineError>,
    shifts: &BTreeMap<String, QExp>,
    coef: &Scalar,
    caps: &[i64],
) -> Result<(), EngineError> {
    if pos == series.len() {
        return visit(shifts, coef);
    }
    let sf = &series[pos];
    for k in 0..=caps[pos] {
        let c = sf.series.coef(QExp::from_integer(k));
        if !c.is_zero() {
            let mut s2 = shifts.clone();
            *s2.entry(sf.num.clone()).or_insert_with(QExp::zero) += QExp::from_integer(k);
            *s2.entry(sf.den.clone()).or_insert_with(QExp::zero) -= QExp::from_integer(k);
            let c2 = coef.mul(&c);
            enumerate_series(series, pos + 1, visit, &s2, &c2, caps)?;
        }
    }
    Ok(())
}

fn cartesian(
    polys: &[&Vec<(BTreeMap<String, i64>, QRat)>],
) -> Vec<(BTreeMap<String, i64>, QRat)> {
    let mut acc: Vec<(BTreeMap<String, i64>, QRat)> = vec![(BTreeMap::new(), QRat::one())];
    for p in polys {
        let mut next = Vec::new();
        for (shift, coef) in &acc {
            for (s2, c2) in p.iter() {
                let mut shift = shift.clone();
                for (v, e) in s2 {
                    *shift.entry(v.clone()).or_insert(0) += e;
                }
                next.push((shift, coef.mul(c2)));
            }
        }
        acc = next;
    }
    acc
}

impl VertexTemplate {
    /// Multi-variable mode extraction: the coefficient of `Π var^{-l_var}`
    /// applied to a state.
    pub fn apply_modes(
        &self,
        engine: &Engine,
        modes: &BTreeMap<String, QExp>,
        state: &crate::fock::FockState,
    ) -> Result<crate::fock::FockState, EngineError> {
        let vars = self.vars();
        if vars.is_empty() {
            return Ok(state.scale(self.prefactor()));
        }
        if vars.len() == 1 {
            let v = vars.iter().next().unwrap();
            let l = modes.get(v).copied().unwrap_or_else(QExp::zero);
            return self.apply_mode(engine, l, state);
        }
        self.apply_modes_multi(engine, modes, state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q_minus_qinv, QRat};
    use crate::vertex::currents::CurrentKind;

    fn engine() -> Engine {
        Engine::new(2).unwrap()
    }

    /// The mixed-current commutation relation, spot-checked on the vacuum of
    /// the basic sector at a small mode window.
    #[test]
    fn raising_lowering_commutator_on_the_vacuum() {
        let e = engine();
        let xp = e.fj_current(CurrentKind::XPlus, 1, "z");
        let xm = e.fj_current(CurrentKind::XMinus, 1, "w");
        let qq = Scalar::from_qrat(q_minus_qinv().inv().unwrap());
        let psi = e
            .fj_current(CurrentKind::Psi, 1, "w")
            .substitute("w", crate::scalar::qexp(1, 2), "w");
        let phi = e
            .fj_current(CurrentKind::Phi, 1, "z")
            .substitute("z", crate::scalar::qexp(1, 2), "z");
        let rel = Relation {
            name: "mixed commutator".into(),
            vars: vec!["z".into(), "w".into()],
            terms: vec![
                RelTerm::new(Scalar::one(), vec![vec![xp.clone(), xm.clone()]]),
                RelTerm::new(Scalar::from_int(-1), vec![vec![xm, xp]]),
                RelTerm::new(qq.neg(), vec![vec![psi]]).with_factor(Factor::Delta {
                    num: "z".into(),
                    den: "w".into(),
                    qshift: QExp::from_integer(-1),
                }),
                RelTerm::new(qq, vec![vec![phi]]).with_factor(Factor::Delta {
                    num: "z".into(),
                    den: "w".into(),
                    qshift: QExp::from_integer(1),
                }),
            ],
        };
        let ket = TensorState::basis(vec![0], vec![e.vacuum_key(0)]);
        for a in -2..=2i64 {
            for b in -2..=2i64 {
                let mut targets = BTreeMap::new();
                targets.insert("z".to_string(), QExp::from_integer(a));
                targets.insert("w".to_string(), QExp::from_integer(b));
                let r = eval_relation_on_ket(&e, &rel, &targets, &ket).unwrap();
                assert!(r.is_zero(), "failed at modes ({a},{b}):\n{}", r.dump());
            }
        }
    }

    /// The symmetric exchange relation with its polynomial factors.
    #[test]
    fn quadratic_exchange_relation_on_low_states() {
        let e = engine();
        let xp_z = e.fj_current(CurrentKind::XPlus, 1, "z");
        let xp_w = e.fj_current(CurrentKind::XPlus, 1, "w");
        let mut f2 = BTreeMap::new();
        f2.insert("z".to_string(), 1);
        let mut f2b = BTreeMap::new();
        f2b.insert("w".to_string(), 1);
        let rel = Relation {
            name: "same-sign exchange".into(),
            vars: vec!["z".into(), "w".into()],
            terms: vec![
                RelTerm::new(Scalar::one(), vec![vec![xp_z.clone(), xp_w.clone()]])
                    .with_factor(Factor::linear("z", "w", 1, QExp::from_integer(2))),
                RelTerm::new(Scalar::from_int(-1), vec![vec![xp_w, xp_z]]).with_factor(
                    Factor::Poly {
                        terms: vec![
                            (f2, QRat::q_pow(QExp::from_integer(2))),
                            (f2b, QRat::from_int(-1)),
                        ],
                    },
                ),
            ],
        };
        let vac = TensorState::basis(vec![0], vec![e.vacuum_key(0)]);
        let one_boson = {
            let s = e.apply_boson(1, -1, &e.vacuum(0)).unwrap();
            let (k, _) = s.terms().next().unwrap();
            TensorState::basis(vec![0], vec![k.clone()])
        };
        for ket in [vac, one_boson] {
            for a in -2..=2i64 {
                for b in -2..=2i64 {
                    let mut targets = BTreeMap::new();
                    targets.insert("z".to_string(), QExp::from_integer(a));
                    targets.insert("w".to_string(), QExp::from_integer(b));
                    let r = eval_relation_on_ket(&e, &rel, &targets, &ket).unwrap();
                    assert!(r.is_zero(), "failed at ({a},{b}):\n{}", r.dump());
                }
            }
        }
    }
}
