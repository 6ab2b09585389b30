//! Hermite and Smith normal forms with unimodular transforms.

use crate::arith::Z;
use crate::matrix::ZMatrix;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Row-style Hermite form: `u · a = h`, with the first `rank` rows of `h`
/// in echelon shape (positive pivots, entries above pivots reduced) and the rest zero.
#[derive(Clone, Debug)]
pub struct Hnf {
    pub h: ZMatrix,
    pub u: ZMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

pub fn hnf(a: &ZMatrix) -> Hnf {
    let m = a.rows();
    let n = a.cols();
    let mut h = a.clone();
    let mut u = ZMatrix::identity(m);
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..m {
                if !h[(i, c)].is_zero()
                    && best.is_none_or(|b| h[(i, c)].abs() < h[(b, c)].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(b, r);
            u.swap_rows(b, r);
            let mut done = true;
            for i in r + 1..m {
                if !h[(i, c)].is_zero() {
                    let f = -h[(i, c)].div_floor(&h[(r, c)]);
                    h.add_row_multiple(i, r, &f);
                    u.add_row_multiple(i, r, &f);
                    if !h[(i, c)].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let f = -h[(i, c)].div_floor(&h[(r, c)]);
            h.add_row_multiple(i, r, &f);
            u.add_row_multiple(i, r, &f);
        }
        pivots.push(c);
        r += 1;
    }
    Hnf { h, u, rank: r, pivots }
}

/// Nonzero rows of the Hermite form: a canonical basis of the row module.
pub fn row_basis(a: &ZMatrix) -> ZMatrix {
    let f = hnf(a);
    f.h.select_rows(&(0..f.rank).collect::<Vec<_>>())
}

/// Z-basis (rows) of {x : x·a = 0}.
pub fn left_kernel(a: &ZMatrix) -> ZMatrix {
    let f = hnf(a);
    f.u.select_rows(&(f.rank..a.rows()).collect::<Vec<_>>())
}

/// `u · a · v = d` with d diagonal, d_i | d_{i+1}, d_i ≥ 0.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: ZMatrix,
    pub d: ZMatrix,
    pub v: ZMatrix,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<Z> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).collect()
    }

    /// Nonzero diagonal entries.
    pub fn invariant_factors(&self) -> Vec<Z> {
        self.diagonal().into_iter().filter(|x| !x.is_zero()).collect()
    }
}

pub fn smith_normal_form(a: &ZMatrix) -> Snf {
    let m = a.rows();
    let n = a.cols();
    let mut d = a.clone();
    let mut u = ZMatrix::identity(m);
    let mut v = ZMatrix::identity(n);
    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !d[(i, j)].is_zero()
                        && best.is_none_or(|(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish(u, d, v);
            };
            d.swap_rows(t, bi);
            u.swap_rows(t, bi);
            d.swap_cols(t, bj);
            v.swap_cols(t, bj);
            let mut clean = true;
            for i in t + 1..m {
                if !d[(i, t)].is_zero() {
                    let f = -d[(i, t)].div_floor(&d[(t, t)]);
                    d.add_row_multiple(i, t, &f);
                    u.add_row_multiple(i, t, &f);
                    if !d[(i, t)].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                if !d[(t, j)].is_zero() {
                    let f = -d[(t, j)].div_floor(&d[(t, t)]);
                    d.add_col_multiple(j, t, &f);
                    v.add_col_multiple(j, t, &f);
                    if !d[(t, j)].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !d[(i, j)].is_multiple_of(&d[(t, t)]));
            match bad {
                Some((i, _)) => {
                    let one = Z::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    finish(u, d, v)
}

fn finish(u: ZMatrix, d: ZMatrix, v: ZMatrix) -> Snf {
    Snf { u, d, v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::z;
    use proptest::prelude::*;

    fn check_snf(a: &ZMatrix) {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert!(s.u.is_unimodular());
        assert!(s.v.is_unimodular());
        let diag = s.diagonal();
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d[(i, j)].is_zero());
                }
            }
        }
        for w in diag.windows(2) {
            if !w[1].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]));
            } else {
                assert!(w[0].is_zero() || w[1].is_zero());
            }
        }
    }

    #[test]
    fn snf_of_a3() {
        let a = ZMatrix::from_i64(&[vec![-2, 1, 0], vec![1, -2, 1], vec![0, 1, -2]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.invariant_factors(), vec![z(1), z(1), z(4)]);
        check_snf(&a);
    }

    #[test]
    fn hnf_transform_is_consistent() {
        let a = ZMatrix::from_i64(&[vec![4, 6, 2], vec![2, 3, 1], vec![0, 2, 8], vec![1, 1, 1]]);
        let f = hnf(&a);
        assert_eq!(f.u.mul(&a), f.h);
        assert!(f.u.is_unimodular());
        assert_eq!(f.rank, 3);
        let k = left_kernel(&a);
        assert_eq!(k.rows(), 1);
        assert!(k.mul(&a).is_zero());
    }

    proptest! {
        #[test]
        fn snf_and_hnf_random(rows in 1usize..5, cols in 1usize..5,
                              seed in proptest::collection::vec(-9i64..10, 16)) {
            let data: Vec<Vec<i64>> = (0..rows)
                .map(|i| (0..cols).map(|j| seed[(i * 4 + j) % 16]).collect())
                .collect();
            let a = ZMatrix::from_i64(&data);
            check_snf(&a);
            let f = hnf(&a);
            prop_assert_eq!(f.u.mul(&a), f.h.clone());
            prop_assert!(f.u.is_unimodular());
            for i in f.rank..rows {
                prop_assert!(f.h.row(i).iter().all(|x| x.is_zero()));
            }
        }
    }
}
