//! Sublattices given by generator rows, saturation and orthogonal complements.

use crate::arith::{Q, Z};
use crate::error::{LatticeError, Result};
use crate::lattice::Lattice;
use crate::matrix::{QMatrix, ZMatrix};
use crate::normal_form::{left_kernel, row_basis, smith_normal_form};
use num_traits::{One, Signed};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct Sublattice {
    pub ambient: Arc<Lattice>,
    /// One generator per row, in ambient coordinates.
    pub coords: QMatrix,
}

impl Sublattice {
    pub fn new(ambient: Arc<Lattice>, coords: QMatrix) -> Result<Self> {
        if coords.cols() != ambient.rank() {
            return Err(LatticeError::Dimension(format!(
                "generators have {} coordinates, ambient rank is {}",
                coords.cols(),
                ambient.rank()
            )));
        }
        Ok(Sublattice { ambient, coords })
    }

    pub fn from_rows(ambient: Arc<Lattice>, rows: Vec<Vec<Q>>) -> Result<Self> {
        let n = ambient.rank();
        Self::new(ambient, QMatrix::from_rows(rows, n))
    }

    pub fn generators(&self) -> usize {
        self.coords.rows()
    }

    pub fn rank(&self) -> usize {
        self.coords.rank()
    }

    pub fn gram(&self) -> QMatrix {
        self.ambient.gram_of(&self.coords)
    }

    /// Generators lie in the ambient lattice itself.
    pub fn is_integral(&self) -> bool {
        self.coords.is_integral()
    }

    /// Generators pair integrally with the ambient lattice.
    pub fn in_dual(&self) -> bool {
        self.coords.mul(&self.ambient.gram_q()).is_integral()
    }

    /// A Z-basis of the span of the generators (Hermite reduced).
    pub fn basis(&self) -> Sublattice {
        let (d, a) = self.coords.clear_denominators();
        let b = row_basis(&a).to_q().scale(&Q::new(Z::one(), d));
        Sublattice { ambient: self.ambient.clone(), coords: b }
    }

    /// The sublattice as an abstract lattice on a basis of its span.
    pub fn lattice(&self, name: &str) -> Result<Lattice> {
        let b = self.basis();
        let g = b.gram().to_z().ok_or_else(|| {
            LatticeError::NotIntegral(format!("gram of {name} has non-integral entries"))
        })?;
        Lattice::new(name, g)
    }

    /// Coordinates of v in terms of the generator rows (generators must be independent).
    pub fn coordinates_of(&self, v: &[Q]) -> Option<Vec<Q>> {
        self.coords.solve_left(v)
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        let b = self.basis();
        b.coords.solve_left(v).is_some_and(|x| x.iter().all(|c| c.is_integer()))
    }

    pub fn with_rows(&self, extra: &QMatrix) -> Sublattice {
        Sublattice { ambient: self.ambient.clone(), coords: self.coords.vstack(extra) }
    }
}

#[derive(Clone, Debug)]
pub struct Saturation {
    pub sub: Sublattice,
    /// [sat(S) : S], a positive rational (an integer when S is integral).
    pub index: Q,
}

/// Primitive closure of the span of S in the ambient lattice (whose basis is Z^n).
pub fn saturation(s: &Sublattice) -> Saturation {
    let n = s.ambient.rank();
    let (d, a) = s.coords.clear_denominators();
    let b = row_basis(&a);
    let r = b.rows();
    if r == 0 {
        return Saturation {
            sub: Sublattice { ambient: s.ambient.clone(), coords: QMatrix::zeros(0, n) },
            index: Q::one(),
        };
    }
    let snf = smith_normal_form(&b);
    let vinv = snf.v.to_q().inverse().and_then(|m| m.to_z()).expect("unimodular transform");
    let p = row_basis(&vinv.select_rows(&(0..r).collect::<Vec<_>>())).to_q();
    let bq = b.to_q().scale(&Q::new(Z::one(), d));
    let pt = p.transpose();
    let x = bq.mul(&pt).mul(&p.mul(&pt).inverse().expect("full row rank"));
    let index = x.det().abs();
    Saturation { sub: Sublattice { ambient: s.ambient.clone(), coords: p }, index }
}

/// All ambient vectors orthogonal to every generator of S; primitive by construction.
pub fn orthogonal_complement(s: &Sublattice) -> Sublattice {
    let n = s.ambient.rank();
    let gc = s.ambient.gram_q().mul(&s.coords.transpose());
    let (_, a) = gc.clear_denominators();
    let k = if a.cols() == 0 { ZMatrix::identity(n) } else { left_kernel(&a) };
    let k = if k.rows() == 0 { k } else { row_basis(&k) };
    Sublattice { ambient: s.ambient.clone(), coords: k.to_q() }
}

pub fn is_primitive(s: &Sublattice) -> bool {
    s.is_integral() && saturation(s).index.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;

    fn u() -> Arc<Lattice> {
        Arc::new(Lattice::from_i64("U", &[vec![0, 1], vec![1, 0]]).unwrap())
    }

    #[test]
    fn saturation_of_twice_u1() {
        let s = Sublattice::from_rows(u(), vec![vec![q(2), q(0)]]).unwrap();
        let sat = saturation(&s);
        assert_eq!(sat.index, q(2));
        assert_eq!(sat.sub.coords, QMatrix::from_i64(&[vec![1, 0]]));
    }

    #[test]
    fn primitive_is_unchanged() {
        let s = Sublattice::from_rows(u(), vec![vec![q(1), q(1)]]).unwrap();
        let sat = saturation(&s);
        assert_eq!(sat.index, q(1));
        assert!(is_primitive(&s));
    }

    #[test]
    fn complement_in_u_plus_u() {
        let l = Arc::new(u().direct_sum(&u()));
        let s = Sublattice::from_rows(l, vec![vec![q(1), q(0), q(0), q(0)]]).unwrap();
        let c = orthogonal_complement(&s);
        assert_eq!(c.rank(), 3);
        assert!(c.coords.mul(&c.ambient.gram_q()).mul(&s.coords.transpose()).is_zero());
    }
}
