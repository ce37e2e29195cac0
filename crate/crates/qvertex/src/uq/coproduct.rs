//! The closed-form comultiplication on currents, with its counit and
//! antipode, kept symbolic in the slot central charges until bound to
//! modules:
//!
//! ```text
//! Δ(x_i^+(z)) = x_i^+(z)⊗1 + φ_i(zq^{c1/2})⊗x_i^+(zq^{c1})
//! Δ(x_i^-(z)) = 1⊗x_i^-(z) + x_i^-(zq^{c2})⊗ψ_i(zq^{c2/2})
//! Δ(φ_i(z))   = φ_i(zq^{-c2/2})⊗φ_i(zq^{c1/2})
//! Δ(ψ_i(z))   = ψ_i(zq^{c2/2})⊗ψ_i(zq^{-c1/2})
//! ε(x_i^±) = 0,  ε(φ_i) = ε(ψ_i) = 1
//! a(x_i^+(z)) = -φ_i(zq^{-c/2})^{-1} x_i^+(zq^{-c})
//! a(x_i^-(z)) = -x_i^-(zq^{-c}) ψ_i(zq^{-c/2})^{-1}
//! a(φ_i(z)) = φ_i(z)^{-1},  a(ψ_i(z)) = ψ_i(z)^{-1}
//! ```
//!
//! A `q^{c_s}`-power appearing in any argument is a central factor of slot
//! `s`; the antipode on slot `s` therefore inverts every `c_s`-exponent in
//! sight before its own formulas introduce fresh ones.

use crate::lattice::Coef;
use crate::scalar::QExp;
use crate::vertex::{CurrentKind, VertexTemplate};
use crate::Engine;
use num_rational::Ratio;
use num_traits::Zero;

/// Exponent of `q` in an argument monomial: `base + Σ cs[s]·c_{s+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CShift {
    pub base: Coef,
    pub cs: Vec<Coef>,
}

impl CShift {
    pub fn zero(slots: usize) -> Self {
        CShift { base: Coef::zero(), cs: vec![Coef::zero(); slots] }
    }

    pub fn constant(slots: usize, base: Coef) -> Self {
        CShift { base, cs: vec![Coef::zero(); slots] }
    }

    pub fn charge(slots: usize, idx: usize, coef: Coef) -> Self {
        let mut s = Self::zero(slots);
        s.cs[idx] = coef;
        s
    }

    pub fn plus(&self, other: &CShift) -> Self {
        CShift {
            base: self.base + other.base,
            cs: self.cs.iter().zip(&other.cs).map(|(a, b)| a + b).collect(),
        }
    }

    /// Flip the sign of one charge's coefficient (antipode on that slot).
    pub fn flip_charge(&self, idx: usize) -> Self {
        let mut s = self.clone();
        s.cs[idx] = -s.cs[idx];
        s
    }

    /// Substitute each old charge by a sum of new charges.
    pub fn relabel(&self, map: &[Vec<usize>], new_slots: usize) -> Self {
        let mut s = CShift::constant(new_slots, self.base);
        for (old, coef) in self.cs.iter().enumerate() {
            for &new in &map[old] {
                s.cs[new] += coef;
            }
        }
        s
    }

    /// Resolve against concrete charge values.
    pub fn bind(&self, charges: &[Coef]) -> QExp {
        let mut e = self.base;
        for (s, c) in self.cs.iter().enumerate() {
            e += *c * charges[s];
        }
        e
    }
}

/// One current symbol at a shifted argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymFactor {
    pub kind: CurrentKind,
    pub index: usize,
    pub inverse: bool,
    pub shift: CShift,
}

impl SymFactor {
    fn plain(kind: CurrentKind, index: usize, shift: CShift) -> Self {
        SymFactor { kind, index, inverse: false, shift }
    }

    pub fn bind(&self, engine: &Engine, var: &str, charges: &[Coef]) -> VertexTemplate {
        let t = if self.inverse {
            engine.fj_current_inverse(self.kind, self.index, var)
        } else {
            engine.fj_current(self.kind, self.index, var)
        };
        t.substitute(var, self.shift.bind(charges), var)
    }
}

/// A sum of tensor products of current products.
#[derive(Clone, Debug)]
pub struct SymTensor {
    pub sign: i8,
    pub slots: Vec<Vec<SymFactor>>,
}

/// Image of a generator under the comultiplication (two slots; charge index
/// 0 is the first slot's `c`, index 1 the second's).
pub fn coproduct(kind: CurrentKind, i: usize) -> Vec<SymTensor> {
    let half = |idx| CShift::charge(2, idx, Ratio::new(1, 2));
    let full = |idx| CShift::charge(2, idx, Ratio::new(1, 1));
    let zero = CShift::zero(2);
    match kind {
        CurrentKind::XPlus => vec![
            SymTensor {
                sign: 1,
                slots: vec![
                    vec![SymFactor::plain(CurrentKind::XPlus, i, zero.clone())],
                    vec![],
                ],
            },
            SymTensor {
                sign: 1,
                slots: vec![
                    vec![SymFactor::plain(CurrentKind::Phi, i, half(0))],
                    vec![SymFactor::plain(CurrentKind::XPlus, i, full(0))],
                ],
            },
        ],
        CurrentKind::XMinus => vec![
            SymTensor {
                sign: 1,
                slots: vec![
                    vec![],
                    vec![SymFactor::plain(CurrentKind::XMinus, i, zero.clone())],
                ],
            },
            SymTensor {
                sign: 1,
                slots: vec![
                    vec![SymFactor::plain(CurrentKind::XMinus, i, full(1))],
                    vec![SymFactor::plain(CurrentKind::Psi, i, half(1))],
                ],
            },
        ],
        CurrentKind::Phi => vec![SymTensor {
            sign: 1,
            slots: vec![
                vec![SymFactor::plain(
                    CurrentKind::Phi,
                    i,
                    CShift::charge(2, 1, Ratio::new(-1, 2)),
                )],
                vec![SymFactor::plain(CurrentKind::Phi, i, half(0))],
            ],
        }],
        CurrentKind::Psi => vec![SymTensor {
            sign: 1,
            slots: vec![
                vec![SymFactor::plain(CurrentKind::Psi, i, half(1))],
                vec![SymFactor::plain(
                    CurrentKind::Psi,
                    i,
                    CShift::charge(2, 0, Ratio::new(-1, 2)),
                )],
            ],
        }],
    }
}

/// Counit values: `ε(x±) = 0`, `ε(φ) = ε(ψ) = 1` (inverses included).
pub fn counit_is_zero(kind: CurrentKind) -> bool {
    matches!(kind, CurrentKind::XPlus | CurrentKind::XMinus)
}

/// Antipode image of a generator symbol (single algebra; charge index
/// `cidx` refers to the algebra's own central charge within `slots`
/// symbolic charges).
pub fn antipode(factor: &SymFactor, cidx: usize) -> Vec<(i8, Vec<SymFactor>)> {
    let slots = factor.shift.cs.len();
    let minus_half = CShift::charge(slots, cidx, Ratio::new(-1, 2));
    let minus_full = CShift::charge(slots, cidx, Ratio::new(-1, 1));
    assert!(!factor.inverse, "antipode of inverse symbols is not needed");
    match factor.kind {
        CurrentKind::XPlus => vec![(
            -1,
            vec![
                SymFactor {
                    kind: CurrentKind::Phi,
                    index: factor.index,
                    inverse: true,
                    shift: factor.shift.plus(&minus_half),
                },
                SymFactor {
                    kind: CurrentKind::XPlus,
                    index: factor.index,
                    inverse: false,
                    shift: factor.shift.plus(&minus_full),
                },
            ],
        )],
        CurrentKind::XMinus => vec![(
            -1,
            vec![
                SymFactor {
                    kind: CurrentKind::XMinus,
                    index: factor.index,
                    inverse: false,
                    shift: factor.shift.plus(&minus_full),
                },
                SymFactor {
                    kind: CurrentKind::Psi,
                    index: factor.index,
                    inverse: true,
                    shift: factor.shift.plus(&minus_half),
                },
            ],
        )],
        CurrentKind::Phi | CurrentKind::Psi => vec![(
            1,
            vec![SymFactor { inverse: !factor.inverse, ..factor.clone() }],
        )],
    }
}

/// `M(1⊗a)Δ(g)` (`slot = 1`) or `M(a⊗1)Δ(g)` (`slot = 0`) as a sum of
/// single-algebra products; every charge then binds to the module's `c`.
pub fn antipode_composition(
    kind: CurrentKind,
    i: usize,
    slot: usize,
) -> Vec<(i8, Vec<SymFactor>)> {
    let mut out = Vec::new();
    for term in coproduct(kind, i) {
        // the antipode inverts every central factor of the acted slot
        let flip = |f: &SymFactor| SymFactor {
            shift: f.shift.flip_charge(slot),
            ..f.clone()
        };
        let kept: Vec<SymFactor> = term.slots[1 - slot].iter().map(flip).collect();
        // antipode is an anti-homomorphism: reverse the product
        let mut acted: Vec<(i8, Vec<SymFactor>)> = vec![(1, Vec::new())];
        for f in term.slots[slot].iter().rev() {
            let images = antipode(&flip(f), slot);
            let mut next = Vec::new();
            for (s0, prefix) in &acted {
                for (s1, img) in &images {
                    let mut prod = prefix.clone();
                    prod.extend(img.iter().cloned());
                    next.push((s0 * s1, prod));
                }
            }
            acted = next;
        }
        for (s, prod) in acted {
            let mut factors = Vec::new();
            if slot == 1 {
                factors.extend(kept.iter().cloned());
                factors.extend(prod);
            } else {
                factors.extend(prod);
                factors.extend(kept.iter().cloned());
            }
            out.push((term.sign * s, factors));
        }
    }
    out
}

/// Apply the comultiplication to one slot of a two-slot image, producing
/// three-slot tensors. `slot = 0` relabels `c1 ↦ c1+c2, c2 ↦ c3`;
/// `slot = 1` relabels `c1 ↦ c1, c2 ↦ c2+c3`.
pub fn coassociate(terms: &[SymTensor], slot: usize) -> Vec<SymTensor> {
    let map: Vec<Vec<usize>> = if slot == 0 {
        vec![vec![0, 1], vec![2]]
    } else {
        vec![vec![0], vec![1, 2]]
    };
    let mut out = Vec::new();
    for term in terms {
        let kept: Vec<SymFactor> = term.slots[1 - slot]
            .iter()
            .map(|f| SymFactor { shift: f.shift.relabel(&map, 3), ..f.clone() })
            .collect();
        // expand the acted slot; all our images have at most one factor there
        assert!(term.slots[slot].len() <= 1);
        if term.slots[slot].is_empty() {
            // the untouched factor sits at new slot 2 for (Δ⊗1), at new
            // slot 0 for (1⊗Δ)
            let pos = if slot == 0 { 2 } else { 0 };
            let mut slots = vec![Vec::new(), Vec::new(), Vec::new()];
            slots[pos] = kept;
            out.push(SymTensor { sign: term.sign, slots });
            continue;
        }
        let f = &term.slots[slot][0];
        let inner = coproduct(f.kind, f.index);
        for it in inner {
            // the inner coproduct's charges live at (slot, slot+1) of the
            // three-slot layout
            let embed = |g: &SymFactor| {
                let mut cs = vec![Coef::zero(); 3];
                cs[slot] = g.shift.cs[0];
                cs[slot + 1] = g.shift.cs[1];
                SymFactor {
                    shift: CShift { base: g.shift.base, cs },
                    ..g.clone()
                }
                // the outer argument shift is added below
            };
            let outer = f.shift.relabel(&map, 3);
            let mut slots = vec![Vec::new(), Vec::new(), Vec::new()];
            for (k, sl) in it.slots.iter().enumerate() {
                slots[slot + k] = sl
                    .iter()
                    .map(|g| {
                        let e = embed(g);
                        SymFactor { shift: e.shift.plus(&outer), ..e }
                    })
                    .collect();
            }
            let pos = if slot == 0 { 2 } else { 0 };
            slots[pos] = kept.clone();
            out.push(SymTensor { sign: term.sign * it.sign, slots });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coproduct_shapes() {
        let t = coproduct(CurrentKind::XPlus, 1);
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].slots[0].len(), 1);
        assert!(t[0].slots[1].is_empty());
        assert_eq!(t[1].slots[0][0].kind, CurrentKind::Phi);
        assert_eq!(t[1].slots[1][0].kind, CurrentKind::XPlus);
        assert_eq!(t[1].slots[1][0].shift.cs[0], Coef::new(1, 1));
    }

    #[test]
    fn antipode_composition_of_phi_is_a_cancelling_pair() {
        // M(1⊗a)Δ(φ) = φ(zq^{c/2})·φ(zq^{c/2})^{-1} after the c2 flip
        let terms = antipode_composition(CurrentKind::Phi, 1, 1);
        assert_eq!(terms.len(), 1);
        let (sign, fs) = &terms[0];
        assert_eq!(*sign, 1);
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0].shift.cs[1], Coef::new(1, 2)); // flipped from -1/2
        assert!(!fs[0].inverse && fs[1].inverse);
        assert_eq!(fs[1].shift.cs[0], Coef::new(1, 2));
        // bound at c1 = c2 = 1 the two arguments agree
        let one = [Coef::new(1, 1), Coef::new(1, 1)];
        assert_eq!(fs[0].shift.bind(&one), fs[1].shift.bind(&one));
    }

    #[test]
    fn coassociated_phi_matches_the_double_coproduct() {
        // both routes must give φ(zq^{(-c2-c3)/2}) ⊗ φ(zq^{(c1-c3)/2}) ⊗ φ(zq^{(c1+c2)/2})
        let phi = coproduct(CurrentKind::Phi, 1);
        let left = coassociate(&phi, 0);
        let right = coassociate(&phi, 1);
        assert_eq!(left.len(), 1);
        assert_eq!(right.len(), 1);
        let expect = [
            CShift { base: Coef::zero(), cs: vec![Coef::zero(), Coef::new(-1, 2), Coef::new(-1, 2)] },
            CShift { base: Coef::zero(), cs: vec![Coef::new(1, 2), Coef::zero(), Coef::new(-1, 2)] },
            CShift { base: Coef::zero(), cs: vec![Coef::new(1, 2), Coef::new(1, 2), Coef::zero()] },
        ];
        for side in [&left[0], &right[0]] {
            for (s, want) in side.slots.iter().zip(&expect) {
                assert_eq!(s.len(), 1);
                assert_eq!(&s[0].shift, want);
            }
        }
    }
}
