//! The Heisenberg algebra `[a_{i,k}, a_{j,l}] = δ_{k+l,0} [(α_i,α_j)k][k]/k`,
//! its dual combinations `a*`, and the level-one Fock modules
//! `F_i = C(q)[a_{j,-k}] ⊗ C(q)[Q̄] e^{Λ̄_i}`.
//!
//! States are finite linear combinations of basis vectors
//! `(boson creation monomial) ⊗ e^{lattice element}` with [`Scalar`]
//! coefficients. Creation modes multiply, annihilation modes contract by the
//! Leibniz rule, and the weight operators act diagonally; every operation
//! here is exact.

use crate::error::EngineError;
use crate::lattice::{Coef, LatticeElt, WeightVec};
use crate::scalar::{qint, QExp, QRat, Scalar};
use crate::{Engine, Mutation};
use num_rational::Ratio;
use std::collections::BTreeMap;
use std::fmt;

/// Multiset of creation labels `(j, k)` with `1 ≤ j ≤ n-1`, `k > 0`, each
/// entry standing for one factor `a_{j,-k}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BosonMono {
    factors: BTreeMap<(usize, i64), u32>,
}

impl BosonMono {
    pub fn one() -> Self {
        BosonMono::default()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn with(&self, j: usize, k: i64) -> Self {
        assert!(k > 0);
        let mut out = self.clone();
        *out.factors.entry((j, k)).or_insert(0) += 1;
        out
    }

    pub fn without(&self, j: usize, k: i64) -> Option<Self> {
        let mut out = self.clone();
        match out.factors.get_mut(&(j, k)) {
            Some(m) if *m > 1 => {
                *m -= 1;
                Some(out)
            }
            Some(_) => {
                out.factors.remove(&(j, k));
                Some(out)
            }
            None => None,
        }
    }

    pub fn factors(&self) -> impl Iterator<Item = (&(usize, i64), &u32)> {
        self.factors.iter()
    }

    /// Energy degree `Σ k · mult`.
    pub fn degree(&self) -> i64 {
        self.factors
            .iter()
            .map(|(&(_, k), &m)| k * i64::from(m))
            .sum()
    }
}

impl fmt::Display for BosonMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        let mut first = true;
        for (&(j, k), &m) in &self.factors {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if m == 1 {
                write!(f, "a({j},-{k})")?;
            } else {
                write!(f, "a({j},-{k})^{m}")?;
            }
        }
        write!(f, "]")
    }
}

/// Basis label of a Fock module: creation monomial ⊗ lattice exponent.
/// The cocycle sign of the lattice part is folded into coefficients, so keys
/// store only the free-basis exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockKey {
    pub bosons: BosonMono,
    pub lattice: Vec<i64>,
}

impl FockKey {
    pub fn degree(&self) -> i64 {
        self.bosons.degree()
    }
}

impl fmt::Display for FockKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let elt = LatticeElt::new(self.lattice.clone(), false);
        write!(f, "{} | e^{}", self.bosons, elt)
    }
}

/// Exact finite linear combination of [`FockKey`] basis vectors in one
/// sector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockState {
    sector: usize,
    terms: BTreeMap<FockKey, Scalar>,
}

impl FockState {
    pub fn zero(sector: usize) -> Self {
        FockState { sector, terms: BTreeMap::new() }
    }

    pub fn basis(sector: usize, key: FockKey) -> Self {
        let mut s = FockState::zero(sector);
        s.terms.insert(key, Scalar::one());
        s
    }

    pub fn sector(&self) -> usize {
        self.sector
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockKey, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, key: FockKey, c: Scalar) -> Result<(), EngineError> {
        if c.is_zero() {
            return Ok(());
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().add(&c)?;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, EngineError> {
        assert_eq!(self.sector, other.sector, "sector mismatch in state sum");
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, EngineError> {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return FockState::zero(self.sector);
        }
        FockState {
            sector: self.sector,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v.mul(c))).collect(),
        }
    }

    pub fn max_degree(&self) -> i64 {
        self.terms.keys().map(|k| k.degree()).max().unwrap_or(0)
    }

    /// Canonical dump: `coeff | [bosons] | e^±[exponents]` per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (k, c) in &self.terms {
            out.push_str(&format!("{} | {}\n", c, k));
        }
        if self.terms.is_empty() {
            out.push_str("0\n");
        }
        out
    }
}

impl Engine {
    /// `[a_{i,k}, a_{j,l}]`, a central scalar.
    pub fn boson_commutator(&self, i: usize, k: i64, j: usize, l: i64) -> QRat {
        assert!(k != 0 && l != 0, "boson modes are indexed by nonzero integers");
        assert!((1..self.n()).contains(&i) && (1..self.n()).contains(&j));
        if k + l != 0 {
            return QRat::zero();
        }
        let aij = self
            .lattice()
            .pairing(&self.lattice().alpha(i), &self.lattice().alpha(j));
        debug_assert!(aij.is_integer());
        let aij = *aij.numer();
        if aij == 0 {
            return QRat::zero();
        }
        let mut c = qint(aij * k)
            .mul(&qint(k))
            .mul(&QRat::from_ratio(Ratio::new(1, k)));
        if self.mutated(Mutation::BosonCommutator) {
            c = c.mul(&QRat::q_pow(QExp::from_integer(1)));
        }
        c
    }

    /// Expansion of `a*_{i,k}` over the plain modes `a_{j,k}`. Indices
    /// `i = 0` and `i = n` are allowed and expand to nothing.
    pub fn astar_expand(&self, i: usize, k: i64) -> Vec<(usize, QRat)> {
        assert!(k != 0);
        let n = self.n() as i64;
        if i == 0 || i == self.n() {
            return Vec::new();
        }
        assert!(i < self.n());
        let keff = if self.mutated(Mutation::AstarSign) { k.abs() } else { k };
        let i = i as i64;
        let denom = qint(keff).mul(&qint(keff)).mul(&qint(n * keff));
        let mut out = Vec::new();
        for j in 1..n {
            let c = qint(i.min(j) * keff).mul(&qint((n - i).min(n - j) * keff));
            let c = c.div(&denom).expect("q-integer denominators are nonzero");
            if !c.is_zero() {
                out.push((j as usize, c));
            }
        }
        out
    }

    /// Action of `a_{j,k}` (either sign of k) on a state.
    pub fn apply_boson(&self, j: usize, k: i64, s: &FockState) -> Result<FockState, EngineError> {
        assert!(k != 0);
        let mut out = FockState::zero(s.sector());
        for (key, c) in s.terms() {
            if k < 0 {
                out.add_term(
                    FockKey {
                        bosons: key.bosons.with(j, -k),
                        lattice: key.lattice.clone(),
                    },
                    c.clone(),
                )?;
            } else {
                for (&(j2, k2), &m) in key.bosons.factors() {
                    if k2 != k {
                        continue;
                    }
                    let comm = self.boson_commutator(j, k, j2, -k2);
                    if comm.is_zero() {
                        continue;
                    }
                    let reduced = key.bosons.without(j2, k2).expect("factor present");
                    let coef = c
                        .mul_qrat(&comm)
                        .mul_qrat(&QRat::from_int(i64::from(m)));
                    out.add_term(
                        FockKey { bosons: reduced, lattice: key.lattice.clone() },
                        coef,
                    )?;
                }
            }
        }
        Ok(out)
    }

    /// Action of the dual mode `a*_{j,k}` via its expansion.
    pub fn apply_astar(&self, j: usize, k: i64, s: &FockState) -> Result<FockState, EngineError> {
        let mut out = FockState::zero(s.sector());
        for (j2, c) in self.astar_expand(j, k) {
            out = out.add(&self.apply_boson(j2, k, s)?.scale(&Scalar::from_qrat(c)))?;
        }
        Ok(out)
    }

    /// `∂_γ`: multiply each term by the pairing eigenvalue `(γ, β)`.
    pub fn apply_partial(&self, gamma: &WeightVec, s: &FockState) -> Result<FockState, EngineError> {
        let mut out = FockState::zero(s.sector());
        for (key, c) in s.terms() {
            let beta = self.lattice().from_free_basis(&key.lattice);
            let ev = self.lattice().pairing(gamma, &beta);
            out.add_term(key.clone(), c.mul_qrat(&QRat::from_ratio(ev)))?;
        }
        Ok(out)
    }

    /// `q^{r·∂_γ}`: diagonal with eigenvalue `q^{r(γ,β)}`.
    pub fn apply_q_partial(
        &self,
        r: QExp,
        gamma: &WeightVec,
        s: &FockState,
    ) -> Result<FockState, EngineError> {
        let mut out = FockState::zero(s.sector());
        for (key, c) in s.terms() {
            let beta = self.lattice().from_free_basis(&key.lattice);
            let ev = self.lattice().pairing(gamma, &beta);
            out.add_term(key.clone(), c.mul_qrat(&QRat::q_pow(r * ev)))?;
        }
        Ok(out)
    }

    /// `(-1)^{r·∂_γ}`: diagonal phase `(-1)^{r(γ,β)}`.
    pub fn apply_phase_partial(
        &self,
        r: Coef,
        gamma: &WeightVec,
        s: &FockState,
    ) -> Result<FockState, EngineError> {
        let mut out = FockState::zero(s.sector());
        for (key, c) in s.terms() {
            let beta = self.lattice().from_free_basis(&key.lattice);
            let ev = self.lattice().pairing(gamma, &beta);
            out.add_term(key.clone(), c.mul_phase(r * ev))?;
        }
        Ok(out)
    }

    /// Left multiplication by a group-algebra element, with cocycle sign.
    pub fn apply_lattice(
        &self,
        elt: &LatticeElt,
        new_sector: usize,
        s: &FockState,
    ) -> Result<FockState, EngineError> {
        let mut out = FockState::zero(new_sector);
        for (key, c) in s.terms() {
            let ket_elt = LatticeElt::new(key.lattice.clone(), false);
            let prod = elt.mul(&ket_elt, self.lattice());
            let coef = if prod.is_negative() { c.neg() } else { c.clone() };
            out.add_term(
                FockKey {
                    bosons: key.bosons.clone(),
                    lattice: prod.exps().to_vec(),
                },
                coef,
            )?;
        }
        Ok(out)
    }

    /// Highest-weight vector `1 ⊗ e^{Λ̄_i}` of the sector-`i` module.
    pub fn vacuum_key(&self, sector: usize) -> FockKey {
        let w = self.lattice().lambda_bar(sector);
        FockKey {
            bosons: BosonMono::one(),
            lattice: self
                .lattice()
                .to_free_basis(&w)
                .expect("fundamental weights lie in the free span"),
        }
    }

    pub fn vacuum(&self, sector: usize) -> FockState {
        FockState::basis(sector % self.n(), self.vacuum_key(sector))
    }

    /// Coefficient of a basis vector; errors on a sector mismatch between
    /// the bra label and the state.
    pub fn matrix_element(
        &self,
        bra_sector: usize,
        bra: &FockKey,
        s: &FockState,
    ) -> Result<Scalar, EngineError> {
        if bra_sector % self.n() != s.sector() % self.n() {
            return Err(EngineError::domain(format!(
                "bra sector {} does not match state sector {}",
                bra_sector,
                s.sector()
            )));
        }
        Ok(s.terms.get(bra).cloned().unwrap_or_else(Scalar::zero))
    }

    /// All creation monomials of energy degree exactly `d`.
    pub fn boson_monomials(&self, d: i64) -> Vec<BosonMono> {
        fn is_canonical_extension(current: &BosonMono, j: usize, k: i64) -> bool {
            // avoid duplicates: each new part must be ≤ all existing parts
            current
                .factors()
                .all(|(&(j2, k2), _)| (k, j) <= (k2, j2))
        }
        fn rec(
            colors: usize,
            max_k: i64,
            remaining: i64,
            current: &BosonMono,
            out: &mut Vec<BosonMono>,
        ) {
            if remaining == 0 {
                out.push(current.clone());
                return;
            }
            for k in (1..=max_k.min(remaining)).rev() {
                for j in 1..=colors {
                    if is_canonical_extension(current, j, k) {
                        let next = current.with(j, k);
                        rec(colors, k, remaining - k, &next, out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        rec(self.n() - 1, d.max(0), d, &BosonMono::one(), &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// Basis labels of sector `i` with boson degree ≤ `deg` and lattice part
    /// `Λ̄_i + Σ m_j α_j`, `Σ |m_j| ≤ radius`.
    pub fn sector_basis(&self, sector: usize, deg: i64, radius: i64) -> Vec<FockKey> {
        let lat = self.lattice();
        let base = lat.lambda_bar(sector);
        let mut lattice_parts: Vec<Vec<i64>> = Vec::new();
        let r = lat.rank();
        let mut m = vec![0i64; r];
        enum_radius(&mut m, 0, radius, &mut |m| {
            let mut w = base.clone();
            for (j, &c) in m.iter().enumerate() {
                if c != 0 {
                    w = w.add(&lat.alpha(j + 1).scale(Coef::from_integer(c)));
                }
            }
            lattice_parts.push(lat.to_free_basis(&w).expect("coset point in free span"));
        });
        lattice_parts.sort();
        lattice_parts.dedup();
        let mut out = Vec::new();
        for d in 0..=deg {
            for mono in self.boson_monomials(d) {
                for lp in &lattice_parts {
                    out.push(FockKey { bosons: mono.clone(), lattice: lp.clone() });
                }
            }
        }
        out
    }
}

fn enum_radius(m: &mut Vec<i64>, idx: usize, budget: i64, f: &mut impl FnMut(&[i64])) {
    if idx == m.len() {
        f(m);
        return;
    }
    for v in -budget..=budget {
        m[idx] = v;
        enum_radius(m, idx + 1, budget - v.abs(), f);
    }
    m[idx] = 0;
}

/// Pure tensors of Fock basis vectors with scalar coefficients; the slot
/// sectors are fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorState {
    sectors: Vec<usize>,
    terms: BTreeMap<Vec<FockKey>, Scalar>,
}

impl TensorState {
    pub fn zero(sectors: Vec<usize>) -> Self {
        TensorState { sectors, terms: BTreeMap::new() }
    }

    pub fn basis(sectors: Vec<usize>, keys: Vec<FockKey>) -> Self {
        let mut s = TensorState::zero(sectors);
        s.terms.insert(keys, Scalar::one());
        s
    }

    pub fn sectors(&self) -> &[usize] {
        &self.sectors
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<FockKey>, &Scalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, keys: Vec<FockKey>, c: Scalar) -> Result<(), EngineError> {
        if c.is_zero() {
            return Ok(());
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(keys) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().add(&c)?;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, EngineError> {
        assert_eq!(self.sectors, other.sectors);
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, EngineError> {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return TensorState::zero(self.sectors.clone());
        }
        TensorState {
            sectors: self.sectors.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v.mul(c))).collect(),
        }
    }

    /// Apply a linear slot operation, given as a map from one basis key to a
    /// [`FockState`], possibly changing the slot sector.
    pub fn apply_slot<F>(
        &self,
        slot: usize,
        new_sector: usize,
        mut op: F,
    ) -> Result<Self, EngineError>
    where
        F: FnMut(&FockKey) -> Result<FockState, EngineError>,
    {
        let mut sectors = self.sectors.clone();
        sectors[slot] = new_sector;
        let mut out = TensorState::zero(sectors);
        for (keys, c) in &self.terms {
            let image = op(&keys[slot])?;
            for (k2, c2) in image.terms() {
                let mut new_keys = keys.clone();
                new_keys[slot] = k2.clone();
                out.add_term(new_keys, c.mul(c2))?;
            }
        }
        Ok(out)
    }

    pub fn max_degree(&self, slot: usize) -> i64 {
        self.terms
            .keys()
            .map(|ks| ks[slot].degree())
            .max()
            .unwrap_or(0)
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (keys, c) in &self.terms {
            let labels: Vec<String> = keys.iter().map(|k| k.to_string()).collect();
            out.push_str(&format!("{} | {}\n", c, labels.join(" (x) ")));
        }
        if self.terms.is_empty() {
            out.push_str("0\n");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qexp;

    fn engine(n: usize) -> Engine {
        Engine::new(n).unwrap()
    }

    #[test]
    fn commutator_examples() {
        let e = engine(2);
        // [a_{1,1}, a_{1,-1}] = [2][1]/1 = q + q^{-1}
        assert_eq!(e.boson_commutator(1, 1, 1, -1), qint(2));
        // Kronecker delta
        assert_eq!(e.boson_commutator(1, 1, 1, -2), QRat::zero());
        let e3 = engine(3);
        // [a_{1,2}, a_{2,-2}] = [-2][2]/2
        let expect = qint(-2)
            .mul(&qint(2))
            .mul(&QRat::from_ratio(Ratio::new(1, 2)));
        assert_eq!(e3.boson_commutator(1, 2, 2, -2), expect);
    }

    #[test]
    fn commutator_antisymmetry() {
        for n in [2usize, 3, 4] {
            let e = engine(n);
            for i in 1..n {
                for j in 1..n {
                    for k in 1..=4i64 {
                        let lhs = e.boson_commutator(i, k, j, -k);
                        let rhs = e.boson_commutator(j, -k, i, k).neg();
                        assert_eq!(lhs, rhs, "n={n} i={i} j={j} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn creation_and_annihilation_examples() {
        let e = engine(2);
        let vac = e.vacuum(0);
        // a_{1,1} annihilates the vacuum
        assert!(e.apply_boson(1, 1, &vac).unwrap().is_zero());
        // a_{1,-2} creates
        let s = e.apply_boson(1, -2, &vac).unwrap();
        assert_eq!(s.num_terms(), 1);
        let (k, c) = s.terms().next().unwrap();
        assert_eq!(k.bosons, BosonMono::one().with(1, 2));
        assert!(c.is_one());
        // a_{1,1} a_{1,-1} vac = (q+q^{-1}) vac
        let s = e.apply_boson(1, -1, &vac).unwrap();
        let s = e.apply_boson(1, 1, &s).unwrap();
        assert_eq!(s, vac.scale(&Scalar::from_qrat(qint(2))));
    }

    #[test]
    fn astar_rank_two_is_inverse_double_qint() {
        let e = engine(2);
        for k in [-3i64, -1, 1, 2, 5] {
            let exp = e.astar_expand(1, k);
            assert_eq!(exp.len(), 1);
            let (j, c) = &exp[0];
            assert_eq!(*j, 1);
            assert_eq!(c, &QRat::one().div(&qint(2 * k)).unwrap());
        }
    }

    #[test]
    fn astar_duality_identity() {
        // [a*_{i,k}, a_{j,l}] = δ_ij δ_{k+l,0} [k]/k
        for n in [2usize, 3, 4] {
            let e = engine(n);
            for i in 1..n {
                for j in 1..n {
                    for k in (-6i64..=6).filter(|&k| k != 0) {
                        let mut acc = QRat::zero();
                        for (m, c) in e.astar_expand(i, k) {
                            acc = acc.add(&c.mul(&e.boson_commutator(m, k, j, -k)));
                        }
                        let expect = if i == j {
                            qint(k).mul(&QRat::from_ratio(Ratio::new(1, k)))
                        } else {
                            QRat::zero()
                        };
                        assert_eq!(acc, expect, "n={n} i={i} j={j} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn heisenberg_representation_property() {
        // a_{i,k} a_{j,l} s − a_{j,l} a_{i,k} s = [a_{i,k}, a_{j,l}] s
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for n in [2usize, 3] {
            let e = engine(n);
            let keys = e.sector_basis(0, 4, 1);
            for _ in 0..25 {
                let mut s = FockState::zero(0);
                for _ in 0..3 {
                    let key = keys[rng.gen_range(0..keys.len())].clone();
                    let c = Scalar::from_int(rng.gen_range(-3i64..=3));
                    s.add_term(key, c).unwrap();
                }
                for i in 1..n {
                    for j in 1..n {
                        for k in [-2i64, 1, 3] {
                            for l in [-3i64, -1, 2] {
                                let ab = e
                                    .apply_boson(i, k, &e.apply_boson(j, l, &s).unwrap())
                                    .unwrap();
                                let ba = e
                                    .apply_boson(j, l, &e.apply_boson(i, k, &s).unwrap())
                                    .unwrap();
                                let comm = ab.sub(&ba).unwrap();
                                let expect =
                                    s.scale(&Scalar::from_qrat(e.boson_commutator(i, k, j, l)));
                                assert_eq!(comm, expect);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn weight_operator_eigenvalues() {
        let e = engine(2);
        // ∂_{α_1} on e^{Λ̄_1}: eigenvalue 1
        let v1 = e.vacuum(1);
        let s = e.apply_partial(&e.lattice().alpha(1), &v1).unwrap();
        assert_eq!(s, v1);
        // q^{-∂_{α_1}} on e^{Λ̄_0}: eigenvalue 1
        let v0 = e.vacuum(0);
        let s = e
            .apply_q_partial(QExp::from_integer(-1), &e.lattice().alpha(1), &v0)
            .unwrap();
        assert_eq!(s, v0);
        // (-1)^{∂_{Λ̄_1}} on e^{Λ̄_1} (n=2): phase (-1)^{1/2}
        let s = e
            .apply_phase_partial(Coef::from_integer(1), &e.lattice().lambda_bar(1), &v1)
            .unwrap();
        let (_, c) = s.terms().next().unwrap();
        assert_eq!(c.phase().exponent(), Ratio::new(1, 2));
    }

    #[test]
    fn matrix_element_extraction() {
        let e = engine(2);
        let vac = e.vacuum(0);
        assert!(e
            .matrix_element(0, &e.vacuum_key(0), &vac)
            .unwrap()
            .is_one());
        let s = e.apply_boson(1, -1, &vac).unwrap();
        assert!(e.matrix_element(0, &e.vacuum_key(0), &s).unwrap().is_zero());
        assert!(e.matrix_element(1, &e.vacuum_key(1), &s).is_err());
    }

    #[test]
    fn grading_shifts() {
        let e = engine(3);
        let vac = e.vacuum(2);
        let s = e.apply_boson(2, -3, &vac).unwrap();
        assert_eq!(s.max_degree(), 3);
        let s = e.apply_boson(1, -1, &s).unwrap();
        assert_eq!(s.max_degree(), 4);
        let s = e.apply_boson(1, 1, &s).unwrap();
        assert_eq!(s.max_degree(), 3);
    }

    #[test]
    fn monomial_enumeration_counts() {
        let e = engine(2);
        // partitions of 0,1,2,3 in one colour: 1,1,2,3
        assert_eq!(e.boson_monomials(0).len(), 1);
        assert_eq!(e.boson_monomials(1).len(), 1);
        assert_eq!(e.boson_monomials(2).len(), 2);
        assert_eq!(e.boson_monomials(3).len(), 3);
        let e3 = engine(3);
        // two colours: degree 2 -> {a1-2, a2-2, a1-1^2, a1-1 a2-1, a2-1^2}
        assert_eq!(e3.boson_monomials(2).len(), 5);
    }

    #[test]
    fn mutated_commutator_differs() {
        let e = Engine::with_mutation(2, Mutation::BosonCommutator).unwrap();
        assert_ne!(e.boson_commutator(1, 1, 1, -1), qint(2));
        let e = Engine::with_mutation(2, Mutation::AstarSign).unwrap();
        // at negative modes the sign flip is visible
        assert_ne!(
            e.astar_expand(1, -1)[0].1,
            QRat::one().div(&qint(-2)).unwrap()
        );
    }

    #[test]
    fn phases_survive_q_weight_products() {
        let e = engine(2);
        let v1 = e.vacuum(1);
        let s = e
            .apply_phase_partial(Coef::from_integer(1), &e.lattice().lambda_bar(1), &v1)
            .unwrap();
        let s = e
            .apply_q_partial(qexp(1, 2), &e.lattice().lambda_bar(1), &s)
            .unwrap();
        let (_, c) = s.terms().next().unwrap();
        assert_eq!(c.value(), &QRat::q_pow(qexp(1, 4)));
        assert!(!c.has_trivial_phase());
    }
}
