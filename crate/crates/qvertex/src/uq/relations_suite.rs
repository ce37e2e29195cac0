//! The defining-relation list of the current algebra and its verification
//! on Fock modules, for the plain generators or for their images under the
//! comultiplication (the algebra-homomorphism half of the Hopf suite).

use super::coproduct::coproduct;
use crate::error::EngineError;
use crate::fock::TensorState;
use crate::lattice::Coef;
use crate::report::{Check, Report};
use crate::scalar::{q_minus_qinv, QExp, QRat, RatFunc, Scalar};
use crate::vertex::relations::{
    collapse_relation, eval_collapsed_on_ket_cached, EvalCache, Factor, RelTerm, Relation,
};
use crate::vertex::{CurrentKind, VertexTemplate};
use crate::{Engine, Mutation};
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// How generators are mapped into operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageKind {
    /// Plain level-one currents on one module.
    Plain,
    /// Comultiplication images on a two-fold tensor of level-one modules.
    Coproduct,
}

impl ImageKind {
    pub fn slots(&self) -> usize {
        match self {
            ImageKind::Plain => 1,
            ImageKind::Coproduct => 2,
        }
    }

    /// Effective central charge of the image.
    pub fn charge(&self) -> Coef {
        match self {
            ImageKind::Plain => Coef::new(1, 1),
            ImageKind::Coproduct => Coef::new(2, 1),
        }
    }
}

/// Image of a generator current at argument `q^{qshift}·var`: a sum of
/// scalar multiples of per-slot operator products.
pub fn generator_image(
    engine: &Engine,
    ik: ImageKind,
    kind: CurrentKind,
    i: usize,
    var: &str,
    qshift: QExp,
) -> Vec<(Scalar, Vec<Vec<VertexTemplate>>)> {
    match ik {
        ImageKind::Plain => {
            let t = engine
                .fj_current(kind, i, var)
                .substitute(var, qshift, var);
            vec![(Scalar::one(), vec![vec![t]])]
        }
        ImageKind::Coproduct => {
            let charges = [Coef::new(1, 1), Coef::new(1, 1)];
            let mut shift_delta = QExp::zero();
            if engine.mutated(Mutation::CoproductShift) && kind == CurrentKind::XPlus {
                shift_delta = QExp::from_integer(1);
            }
            coproduct(kind, i)
                .into_iter()
                .map(|t| {
                    let slots = t
                        .slots
                        .iter()
                        .enumerate()
                        .map(|(snum, fs)| {
                            fs.iter()
                                .map(|f| {
                                    let mut f = f.clone();
                                    if snum == 1 && shift_delta != QExp::zero() {
                                        f.shift.base += shift_delta;
                                    }
                                    f.bind(engine, var, &charges)
                                        .substitute(var, qshift, var)
                                })
                                .collect()
                        })
                        .collect();
                    (Scalar::from_int(i8::into(t.sign)), slots)
                })
                .collect()
        }
    }
}

/// Concatenate image sums into products (slotwise operator concatenation).
fn image_product(
    factors: &[Vec<(Scalar, Vec<Vec<VertexTemplate>>)>],
    slots: usize,
) -> Vec<(Scalar, Vec<Vec<VertexTemplate>>)> {
    let mut acc: Vec<(Scalar, Vec<Vec<VertexTemplate>>)> =
        vec![(Scalar::one(), vec![Vec::new(); slots])];
    for f in factors {
        let mut next = Vec::new();
        for (c0, ops0) in &acc {
            for (c1, ops1) in f {
                let mut ops = ops0.clone();
                for (s, list) in ops1.iter().enumerate() {
                    ops[s].extend(list.iter().cloned());
                }
                next.push((c0.mul(c1), ops));
            }
        }
        acc = next;
    }
    acc
}

/// `g_{ij}(x·q^{qshift})^{±1}` as a rational function of the ratio variable.
fn g_factor(engine: &Engine, i: usize, j: usize, qshift: QExp, invert: bool) -> RatFunc {
    let lat = engine.lattice();
    let mut aij = lat.pairing(&lat.alpha(i), &lat.alpha(j));
    if engine.mutated(Mutation::GExponent) {
        aij += Coef::new(1, 1);
    }
    // (q^{a} q^{s} x - 1) / (q^{s} x - q^{a})
    let num = vec![QRat::from_int(-1), QRat::q_pow(aij + qshift)];
    let den = vec![QRat::q_pow(aij).neg(), QRat::q_pow(qshift)];
    let f = RatFunc::new(num, den);
    if invert {
        f.recip().expect("g factors are nonzero")
    } else {
        f
    }
}

struct Gen<'a> {
    engine: &'a Engine,
    ik: ImageKind,
}

impl<'a> Gen<'a> {
    fn im(
        &self,
        kind: CurrentKind,
        i: usize,
        var: &str,
        qshift: QExp,
    ) -> Vec<(Scalar, Vec<Vec<VertexTemplate>>)> {
        generator_image(self.engine, self.ik, kind, i, var, qshift)
    }

    /// Terms for `coef · A(z-image) · B(w-image) · …` with optional factors.
    fn prod_terms(
        &self,
        coef: Scalar,
        factors: Vec<Factor>,
        ims: &[Vec<(Scalar, Vec<Vec<VertexTemplate>>)>],
    ) -> Vec<RelTerm> {
        image_product(ims, self.ik.slots())
            .into_iter()
            .map(|(c, slots)| {
                let mut t = RelTerm::new(coef.mul(&c), slots);
                for f in &factors {
                    t = t.with_factor(f.clone());
                }
                t
            })
            .collect()
    }
}

/// The defining relations for all index pairs, instantiated through the
/// given image kind. `include_serre` controls the cubic relations (only
/// meaningful for n ≥ 3).
pub fn defining_relations(
    engine: &Engine,
    ik: ImageKind,
    include_serre: bool,
) -> Vec<Relation> {
    let n = engine.n();
    let g = Gen { engine, ik };
    let c = ik.charge();
    let half_c = c / 2;
    let lat = engine.lattice();
    let mut rels = Vec::new();
    let vars2 = vec!["z".to_string(), "w".to_string()];
    for i in 1..n {
        for j in 1..n {
            let aij_r = lat.pairing(&lat.alpha(i), &lat.alpha(j));
            let aij = *aij_r.numer();
            // φ_i(z) φ_j(w) = φ_j(w) φ_i(z), likewise for ψ
            for (label, kind) in [("phi_phi", CurrentKind::Phi), ("psi_psi", CurrentKind::Psi)] {
                let az = g.im(kind, i, "z", QExp::zero());
                let bw = g.im(kind, j, "w", QExp::zero());
                let mut terms =
                    g.prod_terms(Scalar::one(), vec![], &[az.clone(), bw.clone()]);
                terms.extend(g.prod_terms(Scalar::from_int(-1), vec![], &[bw, az]));
                rels.push(Relation {
                    name: format!("{label}({i},{j})"),
                    vars: vars2.clone(),
                    terms,
                });
            }
            // φ_i(z) ψ_j(w) = [g_ij((z/w)q^{-c}) / g_ij((z/w)q^{c})] ψ_j(w) φ_i(z)
            {
                let ratio = g_factor(engine, i, j, -c, false)
                    .mul(&g_factor(engine, i, j, c, true));
                let az = g.im(CurrentKind::Phi, i, "z", QExp::zero());
                let bw = g.im(CurrentKind::Psi, j, "w", QExp::zero());
                let mut terms =
                    g.prod_terms(Scalar::one(), vec![], &[az.clone(), bw.clone()]);
                terms.extend(g.prod_terms(
                    Scalar::from_int(-1),
                    vec![Factor::Expand { f: ratio, num: "z".into(), den: "w".into() }],
                    &[bw, az],
                ));
                rels.push(Relation {
                    name: format!("phi_psi({i},{j})"),
                    vars: vars2.clone(),
                    terms,
                });
            }
            // φ_i(z) x_j^±(w) = g_ij((z/w)q^{∓c/2})^{±1} x_j^±(w) φ_i(z)
            for (label, kind, sign) in [
                ("phi_xplus", CurrentKind::XPlus, 1i64),
                ("phi_xminus", CurrentKind::XMinus, -1),
            ] {
                let f = g_factor(
                    engine,
                    i,
                    j,
                    -half_c * Coef::new(sign, 1),
                    sign < 0,
                );
                let az = g.im(CurrentKind::Phi, i, "z", QExp::zero());
                let bw = g.im(kind, j, "w", QExp::zero());
                let mut terms =
                    g.prod_terms(Scalar::one(), vec![], &[az.clone(), bw.clone()]);
                terms.extend(g.prod_terms(
                    Scalar::from_int(-1),
                    vec![Factor::Expand { f, num: "z".into(), den: "w".into() }],
                    &[bw, az],
                ));
                rels.push(Relation {
                    name: format!("{label}({i},{j})"),
                    vars: vars2.clone(),
                    terms,
                });
            }
            // ψ_i(z) x_j^±(w) = g_ij((w/z)q^{∓c/2})^{∓1} x_j^±(w) ψ_i(z)
            for (label, kind, sign) in [
                ("psi_xplus", CurrentKind::XPlus, 1i64),
                ("psi_xminus", CurrentKind::XMinus, -1),
            ] {
                let f = g_factor(
                    engine,
                    i,
                    j,
                    -half_c * Coef::new(sign, 1),
                    sign > 0,
                );
                let az = g.im(CurrentKind::Psi, i, "z", QExp::zero());
                let bw = g.im(kind, j, "w", QExp::zero());
                let mut terms =
                    g.prod_terms(Scalar::one(), vec![], &[az.clone(), bw.clone()]);
                terms.extend(g.prod_terms(
                    Scalar::from_int(-1),
                    vec![Factor::Expand { f, num: "w".into(), den: "z".into() }],
                    &[bw, az],
                ));
                rels.push(Relation {
                    name: format!("{label}({i},{j})"),
                    vars: vars2.clone(),
                    terms,
                });
            }
            // [x_i^+(z), x_j^-(w)] = δ_ij/(q-q^{-1}) ·
            //   { δ((z/w)q^{-c}) ψ_i(wq^{c/2}) - δ((z/w)q^{c}) φ_i(zq^{c/2}) }
            {
                let az = g.im(CurrentKind::XPlus, i, "z", QExp::zero());
                let bw = g.im(CurrentKind::XMinus, j, "w", QExp::zero());
                let mut terms =
                    g.prod_terms(Scalar::one(), vec![], &[az.clone(), bw.clone()]);
                terms.extend(g.prod_terms(Scalar::from_int(-1), vec![], &[bw, az]));
                if i == j {
                    let qq = Scalar::from_qrat(
                        q_minus_qinv().inv().expect("q - q^{-1} is nonzero"),
                    );
                    let psi = g.im(CurrentKind::Psi, i, "w", half_c);
                    terms.extend(g.prod_terms(
                        qq.neg(),
                        vec![Factor::Delta { num: "z".into(), den: "w".into(), qshift: -c }],
                        &[psi],
                    ));
                    let phi = g.im(CurrentKind::Phi, i, "z", half_c);
                    terms.extend(g.prod_terms(
                        qq,
                        vec![Factor::Delta { num: "z".into(), den: "w".into(), qshift: c }],
                        &[phi],
                    ));
                }
                rels.push(Relation {
                    name: format!("mixed_commutator({i},{j})"),
                    vars: vars2.clone(),
                    terms,
                });
            }
            // (z - q^{±a} w) x_i^±(z) x_j^±(w) = (q^{±a} z - w) x_j^±(w) x_i^±(z)
            // for a_ij ≠ 0, and plain commutation for a_ij = 0
            for (label, kind, sgn) in [
                ("exchange_plus", CurrentKind::XPlus, 1i64),
                ("exchange_minus", CurrentKind::XMinus, -1),
            ] {
                let az = g.im(kind, i, "z", QExp::zero());
                let bw = g.im(kind, j, "w", QExp::zero());
                if aij == 0 {
                    let mut terms =
                        g.prod_terms(Scalar::one(), vec![], &[az.clone(), bw.clone()]);
                    terms.extend(g.prod_terms(Scalar::from_int(-1), vec![], &[bw, az]));
                    rels.push(Relation {
                        name: format!("commuting_{label}({i},{j})"),
                        vars: vars2.clone(),
                        terms,
                    });
                } else {
                    let e = QExp::from_integer(sgn * aij);
                    let mut rhs_poly = BTreeMap::new();
                    rhs_poly.insert("z".to_string(), 1);
                    let mut rhs_poly2 = BTreeMap::new();
                    rhs_poly2.insert("w".to_string(), 1);
                    let mut terms = g.prod_terms(
                        Scalar::one(),
                        vec![Factor::linear("z", "w", 1, e)],
                        &[az.clone(), bw.clone()],
                    );
                    terms.extend(g.prod_terms(
                        Scalar::from_int(-1),
                        vec![Factor::Poly {
                            terms: vec![
                                (rhs_poly, QRat::q_pow(e)),
                                (rhs_poly2, QRat::from_int(-1)),
                            ],
                        }],
                        &[bw, az],
                    ));
                    rels.push(Relation {
                        name: format!("{label}({i},{j})"),
                        vars: vars2.clone(),
                        terms,
                    });
                }
            }
            // Serre relations for a_ij = -1
            if include_serre && aij == -1 {
                for (label, kind) in [
                    ("serre_plus", CurrentKind::XPlus),
                    ("serre_minus", CurrentKind::XMinus),
                ] {
                    let mut terms = Vec::new();
                    let qq2 = Scalar::from_qrat(crate::scalar::qint(2));
                    for (za, zb) in [("z1", "z2"), ("z2", "z1")] {
                        let ia = g.im(kind, i, za, QExp::zero());
                        let ib = g.im(kind, i, zb, QExp::zero());
                        let jw = g.im(kind, j, "w", QExp::zero());
                        terms.extend(g.prod_terms(
                            Scalar::one(),
                            vec![],
                            &[ia.clone(), ib.clone(), jw.clone()],
                        ));
                        terms.extend(g.prod_terms(
                            qq2.neg(),
                            vec![],
                            &[ia.clone(), jw.clone(), ib.clone()],
                        ));
                        terms.extend(g.prod_terms(Scalar::one(), vec![], &[jw, ia, ib]));
                    }
                    rels.push(Relation {
                        name: format!("{label}({i},{j})"),
                        vars: vec!["z1".into(), "z2".into(), "w".into()],
                        terms,
                    });
                }
            }
        }
    }
    rels
}

/// All integer mode tuples with every entry in `[-m, m]`.
fn mode_tuples(vars: &[String], m: i64) -> Vec<BTreeMap<String, QExp>> {
    let mut out = vec![BTreeMap::new()];
    for v in vars {
        let mut next = Vec::new();
        for t in &out {
            for a in -m..=m {
                let mut t = t.clone();
                t.insert(v.clone(), QExp::from_integer(a));
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Run a relation list over kets and mode windows; one report check per
/// relation, with the first counterexample as witness.
pub fn run_relations(
    engine: &Engine,
    rels: &[Relation],
    kets: &[TensorState],
    window: i64,
) -> Result<Vec<Check>, EngineError> {
    // a collapse order covering every support the kets allow
    let max_deg: i64 = kets
        .iter()
        .flat_map(|k| (0..k.sectors().len()).map(move |s| k.max_degree(s)))
        .max()
        .unwrap_or(0);
    let order = max_deg + window + engine.n() as i64 + 8;
    let checks: Result<Vec<Check>, EngineError> = rels
        .par_iter()
        .map(|rel| {
            let collapsed = collapse_relation(engine, rel, order)?;
            let tuples = mode_tuples(&rel.vars, window);
            let mut cache = EvalCache::new();
            for ket in kets {
                for modes in &tuples {
                    let r = eval_collapsed_on_ket_cached(
                        engine, &collapsed, modes, ket, &mut cache,
                    )?;
                    if !r.is_zero() {
                        let modes_str: Vec<String> = modes
                            .iter()
                            .map(|(v, e)| format!("{v}^{}", -e))
                            .collect();
                        return Ok(Check::fail(
                            rel.name.clone(),
                            format!(
                                "modes {} on ket {} give {}",
                                modes_str.join(" "),
                                ket.dump().trim(),
                                r.dump().trim()
                            ),
                        ));
                    }
                }
            }
            Ok(Check::pass(rel.name.clone()))
        })
        .collect();
    checks
}

impl Engine {
    /// Verify the full defining-relation list on the sector-`i` module:
    /// every coefficient of every relation over the mode window, applied to
    /// every basis state with boson degree ≤ `degree` and lattice radius
    /// ≤ `radius`.
    pub fn verify_defining_relations(
        &self,
        sector: usize,
        degree: i64,
        window: i64,
        radius: i64,
    ) -> Result<Report, EngineError> {
        let start = std::time::Instant::now();
        let rels = defining_relations(self, ImageKind::Plain, self.n() >= 3);
        let kets: Vec<TensorState> = self
            .sector_basis(sector, degree, radius)
            .into_iter()
            .map(|k| TensorState::basis(vec![sector], vec![k]))
            .collect();
        let mut report = Report::new("def21", self.n())
            .param("sector", sector)
            .param("degree", degree)
            .param("window", window)
            .param("lattice_radius", radius);
        report
            .checks
            .push(Check::pass("central_element(q^{c/2} q^{-c/2} = 1)"));
        report
            .checks
            .extend(run_relations(self, &rels, &kets, window)?);
        report.elapsed = start.elapsed().as_millis() as u64;
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_list_covers_all_shapes() {
        let e = Engine::new(3).unwrap();
        let rels = defining_relations(&e, ImageKind::Plain, true);
        let names: Vec<&str> = rels.iter().map(|r| r.name.as_str()).collect();
        assert!(names.contains(&"phi_psi(1,2)"));
        assert!(names.contains(&"mixed_commutator(2,2)"));
        assert!(names.contains(&"exchange_plus(1,1)"));
        assert!(names.contains(&"serre_minus(2,1)"));
        // n = 2 has no commuting or Serre cases
        let e2 = Engine::new(2).unwrap();
        let rels2 = defining_relations(&e2, ImageKind::Plain, false);
        assert!(rels2.iter().all(|r| !r.name.starts_with("serre")));
        assert!(rels2.iter().all(|r| !r.name.starts_with("commuting")));
    }

    #[test]
    fn rank_two_relations_hold_on_a_small_window() {
        let e = Engine::new(2).unwrap();
        let report = e.verify_defining_relations(0, 1, 1, 1).unwrap();
        assert!(report.all_pass(), "{}", report.text_summary());
    }

    #[test]
    fn mutated_g_exponent_fails_with_witness() {
        let e = Engine::with_mutation(2, Mutation::GExponent).unwrap();
        let report = e.verify_defining_relations(0, 1, 1, 1).unwrap();
        assert!(!report.all_pass());
        let failing: Vec<_> = report
            .checks
            .iter()
            .filter(|c| c.status == crate::report::Status::Fail)
            .collect();
        assert!(!failing.is_empty());
        assert!(failing[0].witness.is_some());
    }
}
