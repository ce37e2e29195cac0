//! The Hopf-structure suite on a two-fold tensor of level-one modules:
//! the comultiplication respects every defining relation, the counit
//! bindings reproduce the generators, the antipode compositions act as the
//! counit, and the comultiplication is coassociative.

use super::coproduct::{antipode_composition, coassociate, coproduct, counit_is_zero};
use super::relations_suite::{defining_relations, run_relations, ImageKind};
use crate::error::EngineError;
use crate::fock::TensorState;
use crate::lattice::Coef;
use crate::report::{Check, Report};
use crate::scalar::{QExp, Scalar};
use crate::vertex::relations::{Relation, RelTerm};
use crate::vertex::template::template_diff;
use crate::vertex::{CurrentKind, VertexTemplate};
use crate::Engine;

const KINDS: [CurrentKind; 4] = [
    CurrentKind::XPlus,
    CurrentKind::XMinus,
    CurrentKind::Phi,
    CurrentKind::Psi,
];

fn kind_name(k: CurrentKind) -> &'static str {
    match k {
        CurrentKind::XPlus => "x+",
        CurrentKind::XMinus => "x-",
        CurrentKind::Phi => "phi",
        CurrentKind::Psi => "psi",
    }
}

impl Engine {
    /// Counit axiom at the template level: binding the counit on either slot
    /// of the comultiplication reproduces the generator exactly.
    pub fn check_counit(&self, kind: CurrentKind, i: usize) -> Result<Option<String>, EngineError> {
        for slot in [0usize, 1] {
            // ε on `slot`: x± terms with a current there drop; φ/ψ bind to 1
            // and the slot's charge becomes 0
            let mut survivors: Vec<VertexTemplate> = Vec::new();
            for term in coproduct(kind, i) {
                let dies = term.slots[slot]
                    .iter()
                    .any(|f| counit_is_zero(f.kind));
                if dies {
                    continue;
                }
                let mut charges = [Coef::new(1, 1), Coef::new(1, 1)];
                charges[slot] = Coef::new(0, 1);
                let kept = &term.slots[1 - slot];
                if kept.len() != 1 {
                    return Err(EngineError::validation(
                        "counit binding left an unexpected product",
                    ));
                }
                let mut t = kept[0].bind(self, "z", &charges);
                if term.sign < 0 {
                    t = t.scaled(&Scalar::from_int(-1));
                }
                survivors.push(t);
            }
            if survivors.len() != 1 {
                return Ok(Some(format!(
                    "slot {slot}: expected one surviving term, found {}",
                    survivors.len()
                )));
            }
            let want = self.fj_current(kind, i, "z");
            if let Some(d) = template_diff(self, &survivors[0], &want, 20)? {
                return Ok(Some(format!("slot {slot}: {d}")));
            }
        }
        Ok(None)
    }

    /// Antipode axiom on states: `M(1⊗a)Δ(g)` and `M(a⊗1)Δ(g)` act as the
    /// counit on every state of the window.
    fn check_antipode(
        &self,
        kind: CurrentKind,
        i: usize,
        degree: i64,
        window: i64,
        radius: i64,
    ) -> Result<Option<String>, EngineError> {
        let charges = [Coef::new(1, 1), Coef::new(1, 1)];
        for slot in [1usize, 0] {
            let mut terms: Vec<RelTerm> = Vec::new();
            for (sign, prod) in antipode_composition(kind, i, slot) {
                let ops: Vec<VertexTemplate> =
                    prod.iter().map(|f| f.bind(self, "z", &charges)).collect();
                terms.push(RelTerm::new(Scalar::from_int(i64::from(sign)), vec![ops]));
            }
            if !counit_is_zero(kind) {
                // ε(φ) = ε(ψ) = 1: subtract the identity at mode zero
                terms.push(RelTerm::new(
                    Scalar::from_int(-1),
                    vec![vec![VertexTemplate::located_identity(self.n(), "z")]],
                ));
            }
            let rel = Relation {
                name: format!("antipode[{}]({})", slot, kind_name(kind)),
                vars: vec!["z".into()],
                terms,
            };
            let kets: Vec<TensorState> = self
                .sector_basis(0, degree, radius)
                .into_iter()
                .map(|k| TensorState::basis(vec![0], vec![k]))
                .collect();
            let checks = run_relations(self, &[rel], &kets, window)?;
            for c in checks {
                if c.status == crate::report::Status::Fail {
                    return Ok(c.witness);
                }
            }
        }
        Ok(None)
    }

    /// Coassociativity on the three-fold tensor at small degree.
    fn check_coassociativity(
        &self,
        kind: CurrentKind,
        i: usize,
        degree: i64,
        window: i64,
        radius: i64,
    ) -> Result<Option<String>, EngineError> {
        let charges = [Coef::new(1, 1), Coef::new(1, 1), Coef::new(1, 1)];
        let base = coproduct(kind, i);
        let mut terms = Vec::new();
        for (side, sign) in [(coassociate(&base, 0), 1i64), (coassociate(&base, 1), -1)] {
            for t in side {
                let slots: Vec<Vec<VertexTemplate>> = t
                    .slots
                    .iter()
                    .map(|fs| fs.iter().map(|f| f.bind(self, "z", &charges)).collect())
                    .collect();
                terms.push(RelTerm::new(
                    Scalar::from_int(sign * i64::from(t.sign)),
                    slots,
                ));
            }
        }
        let rel = Relation {
            name: format!("coassociativity({})", kind_name(kind)),
            vars: vec!["z".into()],
            terms,
        };
        let singles = self.sector_basis(0, degree, radius);
        let mut kets = Vec::new();
        for a in &singles {
            for b in &singles {
                for c in &singles {
                    if a.degree() + b.degree() + c.degree() <= degree {
                        kets.push(TensorState::basis(
                            vec![0, 0, 0],
                            vec![a.clone(), b.clone(), c.clone()],
                        ));
                    }
                }
            }
        }
        let checks = run_relations(self, &[rel], &kets, window)?;
        for c in checks {
            if c.status == crate::report::Status::Fail {
                return Ok(c.witness);
            }
        }
        Ok(None)
    }

    /// The full Hopf suite on `F_0 ⊗ F_0`.
    pub fn verify_hopf(&self, degree: i64, window: i64, radius: i64) -> Result<Report, EngineError> {
        let start = std::time::Instant::now();
        let mut report = Report::new("hopf", self.n())
            .param("degree", degree)
            .param("window", window)
            .param("lattice_radius", radius);

        // 1. algebra-homomorphism property of the comultiplication
        let rels = defining_relations(self, ImageKind::Coproduct, self.n() >= 3);
        let singles = self.sector_basis(0, degree, radius);
        let mut kets = Vec::new();
        for a in &singles {
            for b in &singles {
                if a.degree() + b.degree() <= degree {
                    kets.push(TensorState::basis(vec![0, 0], vec![a.clone(), b.clone()]));
                }
            }
        }
        for c in run_relations(self, &rels, &kets, window)? {
            report.checks.push(Check {
                name: format!("homomorphism:{}", c.name),
                ..c
            });
        }

        // 2. counit bindings reproduce the generators exactly
        for kind in KINDS {
            for i in 1..self.n() {
                let name = format!("counit({},{i})", kind_name(kind));
                match self.check_counit(kind, i)? {
                    None => report.checks.push(Check::pass(name)),
                    Some(w) => report.checks.push(Check::fail(name, w)),
                }
            }
        }

        // 3. antipode compositions act as the counit
        for kind in KINDS {
            for i in 1..self.n() {
                let name = format!("antipode({},{i})", kind_name(kind));
                match self.check_antipode(kind, i, degree, window, radius)? {
                    None => report.checks.push(Check::pass(name)),
                    Some(w) => report.checks.push(Check::fail(name, w)),
                }
            }
        }

        // 4. coassociativity at degree ≤ 1
        for kind in KINDS {
            for i in 1..self.n() {
                let name = format!("coassociativity({},{i})", kind_name(kind));
                match self.check_coassociativity(kind, i, degree.min(1), window.min(1), radius)? {
                    None => report.checks.push(Check::pass(name)),
                    Some(w) => report.checks.push(Check::fail(name, w)),
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
    fn counit_bindings_reproduce_generators() {
        let e = Engine::new(2).unwrap();
        for kind in KINDS {
            assert_eq!(e.check_counit(kind, 1).unwrap(), None, "{kind:?}");
        }
    }

    #[test]
    fn antipode_compositions_vanish_on_small_states() {
        let e = Engine::new(2).unwrap();
        for kind in KINDS {
            assert_eq!(
                e.check_antipode(kind, 1, 1, 1, 1).unwrap(),
                None,
                "{kind:?}"
            );
        }
    }

    #[test]
    fn coassociativity_at_tiny_degree() {
        let e = Engine::new(2).unwrap();
        for kind in [CurrentKind::Phi, CurrentKind::XPlus] {
            assert_eq!(
                e.check_coassociativity(kind, 1, 1, 1, 1).unwrap(),
                None,
                "{kind:?}"
            );
        }
    }
}
