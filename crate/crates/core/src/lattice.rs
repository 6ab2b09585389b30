//! Integer lattices given by Gram matrices, and linear maps between them.

use crate::arith::{Q, Z};
use crate::error::{LatticeError, Result};
use crate::matrix::{dot, QMatrix, ZMatrix};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub name: String,
    gram: ZMatrix,
    labels: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Invariants {
    #[serde(with = "crate::arith::as_str")]
    pub det: Z,
    /// (s+, s-); None for a degenerate form.
    pub signature: Option<(usize, usize)>,
    pub even: bool,
    pub degenerate: bool,
}

impl Lattice {
    pub fn new(name: impl Into<String>, gram: ZMatrix) -> Result<Self> {
        if !gram.is_symmetric() {
            return Err(LatticeError::NotSymmetric);
        }
        Ok(Lattice { name: name.into(), gram, labels: None })
    }

    pub fn from_i64(name: impl Into<String>, rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(name, ZMatrix::from_i64(rows))
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.rank());
        self.labels = Some(labels);
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn gram(&self) -> &ZMatrix {
        &self.gram
    }

    pub fn gram_q(&self) -> QMatrix {
        self.gram.to_q()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label_index(&self, name: &str) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|l| l == name)
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn det(&self) -> Z {
        self.gram.det()
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[(i, i)].is_even())
    }

    pub fn is_degenerate(&self) -> bool {
        self.det().is_zero()
    }

    pub fn require_nondegenerate(&self) -> Result<()> {
        if self.is_degenerate() {
            Err(LatticeError::Degenerate)
        } else {
            Ok(())
        }
    }

    pub fn require_even(&self) -> Result<()> {
        match (0..self.rank()).find(|&i| self.gram[(i, i)].is_odd()) {
            Some(i) => Err(LatticeError::NotEven(i)),
            None => Ok(()),
        }
    }

    /// (s+, s-, s0) by congruent diagonalization over Q.
    pub fn inertia(&self) -> (usize, usize, usize) {
        inertia(&self.gram_q())
    }

    pub fn signature(&self) -> Option<(usize, usize)> {
        let (p, n, z) = self.inertia();
        (z == 0).then_some((p, n))
    }

    pub fn invariants(&self) -> Invariants {
        let det = self.det();
        let degenerate = det.is_zero();
        Invariants { det, signature: self.signature(), even: self.is_even(), degenerate }
    }

    /// +1 positive definite, -1 negative definite, None otherwise.
    pub fn definiteness(&self) -> Option<i8> {
        let (p, n, z) = self.inertia();
        if z > 0 || self.rank() == 0 {
            None
        } else if n == 0 {
            Some(1)
        } else if p == 0 {
            Some(-1)
        } else {
            None
        }
    }

    pub fn is_indefinite(&self) -> bool {
        let (p, n, _) = self.inertia();
        p > 0 && n > 0
    }

    pub fn pair(&self, x: &[Q], y: &[Q]) -> Q {
        self.gram_q().form(x, y)
    }

    pub fn pair_z(&self, x: &[Z], y: &[Z]) -> Z {
        self.gram.form(x, y)
    }

    pub fn norm(&self, x: &[Q]) -> Q {
        self.pair(x, x)
    }

    pub fn direct_sum(&self, o: &Lattice) -> Lattice {
        let gram = ZMatrix::block_diag(&[self.gram.clone(), o.gram.clone()]);
        let labels = match (&self.labels, &o.labels) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
            _ => None,
        };
        Lattice { name: format!("{}+{}", self.name, o.name), gram, labels }
    }

    pub fn sum_all(parts: &[Lattice]) -> Lattice {
        let mut it = parts.iter();
        let first = it.next().expect("non-empty direct sum").clone();
        it.fold(first, |a, b| a.direct_sum(b))
    }

    /// L(n): the form multiplied by n.
    pub fn scaled(&self, n: i64) -> Lattice {
        Lattice {
            name: format!("{}({})", self.name, n),
            gram: self.gram.scale(&Z::from(n)),
            labels: self.labels.clone(),
        }
    }

    /// Gram of the rows of `basis` (ambient coordinates).
    pub fn gram_of(&self, basis: &QMatrix) -> QMatrix {
        basis.mul(&self.gram_q()).mul(&basis.transpose())
    }
}

/// Inertia of a rational symmetric matrix. Zero diagonals fall back to a
/// hyperbolic 2x2 pivot block.
pub fn inertia(g: &QMatrix) -> (usize, usize, usize) {
    let n = g.rows();
    let mut a = g.clone();
    let mut active: Vec<usize> = (0..n).collect();
    let (mut pos, mut neg) = (0, 0);
    while !active.is_empty() {
        if let Some(k) = active.iter().position(|&i| !a[(i, i)].is_zero()) {
            let i = active.remove(k);
            let piv = a[(i, i)].clone();
            if piv.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            for &r in &active {
                if a[(r, i)].is_zero() {
                    continue;
                }
                let f = &a[(r, i)] / &piv;
                for &c in &active {
                    let v = &a[(r, c)] - &f * &a[(i, c)];
                    a[(r, c)] = v;
                }
            }
            continue;
        }
        let pair = active.iter().enumerate().find_map(|(x, &i)| {
            active[x + 1..].iter().find(|&&j| !a[(i, j)].is_zero()).map(|&j| (i, j))
        });
        let Some((i, j)) = pair else { break };
        active.retain(|&k| k != i && k != j);
        pos += 1;
        neg += 1;
        let b = a[(i, j)].clone();
        for &r in &active {
            for &c in &active {
                let v = &a[(r, c)] - (&a[(r, i)] * &a[(j, c)] + &a[(r, j)] * &a[(i, c)]) / &b;
                a[(r, c)] = v;
            }
        }
    }
    (pos, neg, n - pos - neg)
}

/// Linear map between lattices. `matrix` acts on column vectors: column j is
/// the image of source basis vector j in target coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeMap {
    pub matrix: QMatrix,
    pub form_scale: Option<Q>,
}

impl LatticeMap {
    pub fn new(matrix: QMatrix) -> Self {
        LatticeMap { matrix, form_scale: None }
    }

    /// Builds the map from the images of the basis vectors.
    pub fn from_images(images: &[Vec<Q>], target_rank: usize) -> Self {
        LatticeMap::new(QMatrix::from_rows(images.to_vec(), target_rank).transpose())
    }

    pub fn apply(&self, x: &[Q]) -> Vec<Q> {
        self.matrix.apply(x)
    }

    pub fn compose(&self, inner: &LatticeMap) -> LatticeMap {
        let s = match (&self.form_scale, &inner.form_scale) {
            (Some(a), Some(b)) => Some(a * b),
            _ => None,
        };
        LatticeMap { matrix: self.matrix.mul(&inner.matrix), form_scale: s }
    }

    /// Returns s with Mᵀ·G_t·M = s·G_s when such s exists.
    pub fn similarity_factor(&self, source: &QMatrix, target: &QMatrix) -> Option<Q> {
        let lhs = self.matrix.transpose().mul(target).mul(&self.matrix);
        let (i, j) = (0..source.rows())
            .flat_map(|i| (0..source.cols()).map(move |j| (i, j)))
            .find(|&(i, j)| !source[(i, j)].is_zero())?;
        let s = &lhs[(i, j)] / &source[(i, j)];
        (lhs == source.scale(&s)).then_some(s)
    }

    /// Declares the map a similarity after checking the scaling identity.
    pub fn declare_similarity(mut self, source: &QMatrix, target: &QMatrix) -> Result<Self> {
        match self.similarity_factor(source, target) {
            Some(s) => {
                self.form_scale = Some(s);
                Ok(self)
            }
            None => Err(LatticeError::SelfCheck("map is not a similarity".into())),
        }
    }
}

/// Pairing of two rational vectors under a rational Gram matrix.
pub fn pairing(g: &QMatrix, x: &[Q], y: &[Q]) -> Q {
    dot(&g.left_apply(x), y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::z;

    #[test]
    fn hyperbolic_plane() {
        let u = Lattice::from_i64("U", &[vec![0, 1], vec![1, 0]]).unwrap();
        let inv = u.invariants();
        assert_eq!(inv.det, z(-1));
        assert_eq!(inv.signature, Some((1, 1)));
        assert!(inv.even);
    }

    #[test]
    fn degenerate_is_reported() {
        let l = Lattice::from_i64("D", &[vec![2, 2], vec![2, 2]]).unwrap();
        let inv = l.invariants();
        assert!(inv.degenerate);
        assert_eq!(inv.signature, None);
        assert_eq!(l.inertia(), (1, 0, 1));
    }

    #[test]
    fn zero_diagonal_blocks() {
        let g = QMatrix::from_i64(&[
            vec![0, 1, 0, 0],
            vec![1, 0, 0, 0],
            vec![0, 0, 0, 3],
            vec![0, 0, 3, 0],
        ]);
        assert_eq!(inertia(&g), (2, 2, 0));
    }
}
