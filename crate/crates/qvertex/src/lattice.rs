//! The type-A weight lattice and its sign-cocycle group algebra.
//!
//! Weights are stored in the fundamental-weight basis `Λ̄_1, …, Λ̄_{n-1}`.
//! The symmetric pairing is fixed by `(α_i, α_j) = a_{ij}` (the Cartan
//! matrix) and `(Λ̄_i, α_j) = δ_{ij}`; the Gram matrix of the `Λ̄_i` is the
//! inverse Cartan matrix, computed once at construction.
//!
//! Group-algebra elements are normal-ordered words
//! `e^{m_2 α_2} ⋯ e^{m_{n-1} α_{n-1}} e^{m_n Λ̄_{n-1}}` over the free basis,
//! with a ±1 sign accumulating the two-cocycle
//! `e^{α_i} e^{α_j} = (-1)^{(α_i,α_j)} e^{α_j} e^{α_i}` and
//! `e^{α_i} e^{Λ̄_{n-1}} = (-1)^{δ_{i,n-1}} e^{Λ̄_{n-1}} e^{α_i}`.

use crate::error::EngineError;
use num_rational::Ratio;
use num_traits::Zero;
use std::fmt;

pub type Coef = Ratio<i64>;

/// A weight in the Λ̄-basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVec {
    coords: Vec<Coef>,
}

impl WeightVec {
    pub fn zero(n: usize) -> Self {
        WeightVec { coords: vec![Coef::zero(); n - 1] }
    }

    pub fn from_coords(coords: Vec<Coef>) -> Self {
        WeightVec { coords }
    }

    pub fn coords(&self) -> &[Coef] {
        &self.coords
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        WeightVec {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        WeightVec {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        WeightVec { coords: self.coords.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, c: Coef) -> Self {
        WeightVec { coords: self.coords.iter().map(|a| a * c).collect() }
    }
}

/// Per-rank lattice data: Cartan matrix, Gram matrix of the fundamental
/// weights, free-basis conversion, and the cached swap-sign form.
#[derive(Clone, Debug)]
pub struct WeightLattice {
    n: usize,
    /// `(Λ̄_i, Λ̄_j)`, 0-indexed as `gram[i-1][j-1]`.
    gram: Vec<Vec<Coef>>,
    /// Columns: the free generators expressed in the Λ̄-basis.
    free_in_lambda: Vec<Vec<Coef>>,
    /// Inverse of `free_in_lambda` (maps Λ̄-coords to free coords).
    lambda_in_free: Vec<Vec<Coef>>,
    /// `swap[i][j]`: parity picked up when `g_i` and `g_j` exchange places.
    swap: Vec<Vec<u8>>,
}

impl WeightLattice {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2);
        let r = n - 1;
        let cartan = |i: usize, j: usize| -> i64 {
            if i == j {
                2
            } else if i + 1 == j || j + 1 == i {
                -1
            } else {
                0
            }
        };
        // Gram = inverse Cartan, by Gaussian elimination over the rationals.
        let mut aug: Vec<Vec<Coef>> = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| Coef::from_integer(cartan(i + 1, j + 1)))
                    .chain((0..r).map(|j| Coef::from_integer((i == j) as i64)))
                    .collect()
            })
            .collect();
        gauss_invert(&mut aug, r);
        let gram: Vec<Vec<Coef>> = (0..r).map(|i| aug[i][r..].to_vec()).collect();

        // Free basis g_1..g_{r}: α_2, …, α_{n-1}, Λ̄_{n-1} in the Λ̄-basis.
        let mut free_in_lambda = vec![vec![Coef::zero(); r]; r];
        for (col, a) in (2..n).enumerate() {
            // α_a = Σ_k a_{ak} Λ̄_k
            for k in 1..n {
                free_in_lambda[k - 1][col] = Coef::from_integer(cartan(a, k));
            }
        }
        free_in_lambda[r - 1][r - 1] = Coef::from_integer(1); // Λ̄_{n-1}

        let mut aug2: Vec<Vec<Coef>> = (0..r)
            .map(|i| {
                free_in_lambda[i]
                    .iter()
                    .copied()
                    .chain((0..r).map(|j| Coef::from_integer((i == j) as i64)))
                    .collect()
            })
            .collect();
        gauss_invert(&mut aug2, r);
        let lambda_in_free: Vec<Vec<Coef>> = (0..r).map(|i| aug2[i][r..].to_vec()).collect();

        // Swap parities of the free generators.
        let mut swap = vec![vec![0u8; r]; r];
        for i in 0..r {
            for j in 0..r {
                let gi_alpha = i < r - 1; // g_i is α_{i+2}
                let gj_alpha = j < r - 1;
                swap[i][j] = match (gi_alpha, gj_alpha) {
                    (true, true) => (cartan(i + 2, j + 2).rem_euclid(2)) as u8,
                    (true, false) => u8::from(i + 2 == n - 1), // δ_{a, n-1}
                    (false, true) => u8::from(j + 2 == n - 1),
                    (false, false) => 0,
                };
            }
        }

        WeightLattice { n, gram, free_in_lambda, lambda_in_free, swap }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.n - 1
    }

    /// `α_i` for `1 ≤ i ≤ n-1`.
    pub fn alpha(&self, i: usize) -> WeightVec {
        assert!((1..self.n).contains(&i), "simple-root index out of range");
        let r = self.rank();
        let mut coords = vec![Coef::zero(); r];
        for k in 1..self.n {
            coords[k - 1] = Coef::from_integer(if k == i {
                2
            } else if k + 1 == i || i + 1 == k {
                -1
            } else {
                0
            });
        }
        WeightVec { coords }
    }

    /// `Λ̄_i` with the index taken modulo n (`Λ̄_0 = 0`).
    pub fn lambda_bar(&self, i: usize) -> WeightVec {
        let i = i % self.n;
        let mut w = WeightVec::zero(self.n);
        if i != 0 {
            w.coords[i - 1] = Coef::from_integer(1);
        }
        w
    }

    /// The symmetric bilinear pairing.
    pub fn pairing(&self, a: &WeightVec, b: &WeightVec) -> Coef {
        let r = self.rank();
        let mut acc = Coef::zero();
        for i in 0..r {
            if a.coords[i].is_zero() {
                continue;
            }
            for j in 0..r {
                acc += a.coords[i] * self.gram[i][j] * b.coords[j];
            }
        }
        acc
    }

    /// Coordinates over the free basis `(α_2, …, α_{n-1}, Λ̄_{n-1})`;
    /// errors when the weight is not an integer combination.
    pub fn to_free_basis(&self, w: &WeightVec) -> Result<Vec<i64>, EngineError> {
        let r = self.rank();
        let mut out = Vec::with_capacity(r);
        for i in 0..r {
            let mut acc = Coef::zero();
            for j in 0..r {
                acc += self.lambda_in_free[i][j] * w.coords[j];
            }
            if !acc.is_integer() {
                return Err(EngineError::domain(
                    "weight lies outside the free span of the group algebra",
                ));
            }
            out.push(*acc.numer());
        }
        Ok(out)
    }

    pub fn from_free_basis(&self, exps: &[i64]) -> WeightVec {
        let r = self.rank();
        assert_eq!(exps.len(), r);
        let mut coords = vec![Coef::zero(); r];
        for (col, &m) in exps.iter().enumerate() {
            for i in 0..r {
                coords[i] += self.free_in_lambda[i][col] * Coef::from_integer(m);
            }
        }
        WeightVec { coords }
    }

    /// Class of a lattice weight in `P̄/Q̄ ≅ Z/n` (`Λ̄_j ↦ j`).
    pub fn coset_class(&self, w: &WeightVec) -> Result<usize, EngineError> {
        let mut acc = Coef::zero();
        for (idx, c) in w.coords().iter().enumerate() {
            if !c.is_integer() {
                return Err(EngineError::domain("not a lattice weight"));
            }
            acc += *c * Coef::from_integer((idx + 1) as i64);
        }
        let n = self.n as i64;
        Ok(acc.numer().rem_euclid(n) as usize)
    }

    /// Parity of the cocycle picked up when the normal form of `a` is
    /// multiplied by the normal form of `b`:
    /// `B(a, b) = Σ_{i > j} a_i b_j · swap[i][j]  (mod 2)`.
    fn cocycle_parity(&self, a: &[i64], b: &[i64]) -> u8 {
        let r = self.rank();
        let mut acc: i64 = 0;
        for i in 0..r {
            if a[i] == 0 {
                continue;
            }
            for j in 0..i {
                if b[j] != 0 && self.swap[i][j] == 1 {
                    acc += a[i] * b[j];
                }
            }
        }
        (acc.rem_euclid(2)) as u8
    }
}

fn gauss_invert(aug: &mut [Vec<Coef>], r: usize) {
    for col in 0..r {
        let pivot = (col..r)
            .find(|&row| !aug[row][col].is_zero())
            .expect("singular matrix");
        aug.swap(col, pivot);
        let p = aug[col][col];
        for x in aug[col].iter_mut() {
            *x /= p;
        }
        for row in 0..r {
            if row != col && !aug[row][col].is_zero() {
                let f = aug[row][col];
                for k in 0..2 * r {
                    let v = aug[col][k];
                    aug[row][k] -= f * v;
                }
            }
        }
    }
}

/// Normal-form group-algebra element `± e^{m_2 α_2} ⋯ e^{m_n Λ̄_{n-1}}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeElt {
    exps: Vec<i64>,
    negative: bool,
}

impl LatticeElt {
    pub fn identity(n: usize) -> Self {
        LatticeElt { exps: vec![0; n - 1], negative: false }
    }

    pub fn new(exps: Vec<i64>, negative: bool) -> Self {
        LatticeElt { exps, negative }
    }

    /// `e^w` for a weight in the free span, with positive sign.
    pub fn from_weight(lat: &WeightLattice, w: &WeightVec) -> Result<Self, EngineError> {
        Ok(LatticeElt { exps: lat.to_free_basis(w)?, negative: false })
    }

    pub fn exps(&self) -> &[i64] {
        &self.exps
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn weight(&self, lat: &WeightLattice) -> WeightVec {
        lat.from_free_basis(&self.exps)
    }

    pub fn negate(&self) -> Self {
        LatticeElt { exps: self.exps.clone(), negative: !self.negative }
    }

    pub fn mul(&self, other: &Self, lat: &WeightLattice) -> Self {
        let parity = lat.cocycle_parity(&self.exps, &other.exps);
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| a + b)
            .collect();
        LatticeElt {
            exps,
            negative: self.negative ^ other.negative ^ (parity == 1),
        }
    }
}

impl fmt::Display for LatticeElt {
    /// `±[m_2,…,m_n]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", if self.negative { '-' } else { '+' })?;
        for (k, m) in self.exps.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "]")
    }
}
