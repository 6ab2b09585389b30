//! Finite index overlattices from glue vectors in the dual.

use crate::arith::{fmt_q, Q, Z};
use crate::error::{LatticeError, Result};
use crate::lattice::Lattice;
use crate::matrix::QMatrix;
use crate::normal_form::row_basis;
use num_traits::{One, Signed};

#[derive(Clone, Debug)]
pub struct Overlattice {
    pub lattice: Lattice,
    /// Rows: the new basis in coordinates of the original lattice.
    pub base_change: QMatrix,
    pub index: Z,
}

impl Overlattice {
    /// Coordinates in the new basis of a vector given in old coordinates.
    pub fn to_new(&self, v: &[Q]) -> Vec<Q> {
        self.base_change.solve_left(v).expect("vector in the rational span")
    }

    pub fn to_old(&self, v: &[Q]) -> Vec<Q> {
        self.base_change.left_apply(v)
    }
}

fn show(v: &[Q]) -> String {
    format!("({})", v.iter().map(fmt_q).collect::<Vec<_>>().join(","))
}

pub fn overlattice(l: &Lattice, glue: &[Vec<Q>]) -> Result<Overlattice> {
    l.require_nondegenerate()?;
    let n = l.rank();
    let g = l.gram_q();
    for (i, v) in glue.iter().enumerate() {
        if v.len() != n {
            return Err(LatticeError::Dimension(format!("glue vector {i} has length {}", v.len())));
        }
        if !g.left_apply(v).iter().all(|x| x.is_integer()) {
            return Err(LatticeError::GlueNotInDual { index: i, vector: show(v) });
        }
    }
    for i in 0..glue.len() {
        for j in 0..=i {
            let p = g.form(&glue[i], &glue[j]);
            if !p.is_integer() {
                return Err(LatticeError::NonIntegralPair(i, j, fmt_q(&p)));
            }
            if i == j && l.is_even() && !(&p / Q::from_integer(Z::from(2))).is_integer() {
                return Err(LatticeError::OddGlue(i, fmt_q(&p)));
            }
        }
    }
    let mut gens = QMatrix::identity(n);
    if !glue.is_empty() {
        gens = gens.vstack(&QMatrix::from_rows(glue.to_vec(), n));
    }
    let (d, a) = gens.clear_denominators();
    let basis = row_basis(&a).to_q().scale(&Q::new(Z::one(), d));
    let gram = l.gram_of(&basis).to_z().ok_or_else(|| {
        LatticeError::NotIntegral("overlattice gram is not integral".into())
    })?;
    let index = basis.det().abs().recip();
    debug_assert!(index.is_integer());
    let lattice = Lattice::new(format!("{}'", l.name), gram)?;
    Ok(Overlattice { lattice, base_change: basis, index: index.to_integer() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qf, z};

    fn a1a1m4() -> Lattice {
        Lattice::from_i64("A1+A1+<-4>", &[vec![-2, 0, 0], vec![0, -2, 0], vec![0, 0, -4]]).unwrap()
    }

    #[test]
    fn glue_to_a3() {
        let l = a1a1m4();
        let o = overlattice(&l, &[vec![qf(1, 2), qf(1, 2), qf(1, 2)]]).unwrap();
        assert_eq!(o.index, z(2));
        assert_eq!(o.lattice.det(), z(-4));
        assert!(o.lattice.is_even());
    }

    #[test]
    fn empty_glue_is_identity() {
        let l = a1a1m4();
        let o = overlattice(&l, &[]).unwrap();
        assert_eq!(o.index, z(1));
        assert_eq!(o.lattice.gram(), l.gram());
    }

    #[test]
    fn glue_outside_dual_is_named() {
        let l = a1a1m4();
        let e = overlattice(&l, &[vec![qf(1, 3), q(0), q(0)]]).unwrap_err();
        assert!(matches!(e, LatticeError::GlueNotInDual { index: 0, .. }));
        let e = overlattice(&l, &[vec![qf(1, 2), q(0), q(0)]]).unwrap_err();
        assert!(matches!(e, LatticeError::NonIntegralPair(0, 0, _)));
    }
}
