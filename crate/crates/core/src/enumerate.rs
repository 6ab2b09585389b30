//! Definite lattices: reduction, short vectors, root systems and isometry search.

use crate::arith::{Q, Z};
use crate::error::{LatticeError, Result};
use crate::lattice::Lattice;
use crate::matrix::{QMatrix, ZMatrix};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// Gram-Schmidt data of a positive definite gram: H = M·diag(b)·Mᵀ, M unit lower triangular.
fn gso(h: &QMatrix) -> (QMatrix, Vec<Q>) {
    let n = h.rows();
    let mut mu = QMatrix::identity(n);
    let mut b: Vec<Q> = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..i {
            let mut s = h[(i, j)].clone();
            for l in 0..j {
                s -= &mu[(j, l)] * &mu[(i, l)] * &b[l];
            }
            mu[(i, j)] = s / &b[j];
        }
        let mut s = h[(i, i)].clone();
        for l in 0..i {
            s -= &mu[(i, l)] * &mu[(i, l)] * &b[l];
        }
        b.push(s);
    }
    (mu, b)
}

fn round_q(x: &Q) -> Z {
    (x + Q::new(Z::one(), Z::from(2))).floor().to_integer()
}

/// Exact LLL (δ = 3/4) on a positive definite integer gram.
/// Returns (P, P·G·Pᵀ) with P unimodular.
pub fn lll_gram(g: &ZMatrix) -> (ZMatrix, ZMatrix) {
    let n = g.rows();
    let mut p = ZMatrix::identity(n);
    let mut h = g.clone();
    if n < 2 {
        return (p, h);
    }
    let delta = Q::new(Z::from(3), Z::from(4));
    let mut k = 1;
    while k < n {
        let (mu, _) = gso(&h.to_q());
        let mut mu = mu;
        for j in (0..k).rev() {
            let r = round_q(&mu[(k, j)]);
            if r.is_zero() {
                continue;
            }
            let f = -r.clone();
            p.add_row_multiple(k, j, &f);
            h.add_row_multiple(k, j, &f);
            h.add_col_multiple(k, j, &f);
            let rq = Q::from_integer(r);
            for l in 0..=j {
                let v = &mu[(k, l)] - &rq * &mu[(j, l)];
                mu[(k, l)] = v;
            }
        }
        let (mu, b) = gso(&h.to_q());
        let m = &mu[(k, k - 1)];
        if b[k] >= (&delta - m * m) * &b[k - 1] {
            k += 1;
        } else {
            p.swap_rows(k, k - 1);
            h.swap_rows(k, k - 1);
            h.swap_cols(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    (p, h)
}

/// Sign +1 or -1 of a definite lattice.
fn definite_sign(l: &Lattice) -> Result<i64> {
    match l.definiteness() {
        Some(s) => Ok(s as i64),
        None => Err(LatticeError::Indefinite),
    }
}

fn normalize_sign(v: &mut [Z]) {
    if let Some(x) = v.iter().find(|x| !x.is_zero()) {
        if x.is_negative() {
            for y in v.iter_mut() {
                *y = -y.clone();
            }
        }
    }
}

/// All nonzero v with |v²| ≤ bound, one per ± pair, first nonzero coordinate positive,
/// sorted by |norm| then lexicographically.
pub fn short_vectors(l: &Lattice, bound: &Z) -> Result<Vec<Vec<Z>>> {
    Ok(short_vectors_with_norms(l, bound)?.into_iter().map(|(v, _)| v).collect())
}

/// As `short_vectors`, paired with the (signed) norms.
pub fn short_vectors_with_norms(l: &Lattice, bound: &Z) -> Result<Vec<(Vec<Z>, Z)>> {
    let n = l.rank();
    if n == 0 {
        return Ok(Vec::new());
    }
    let sign = definite_sign(l)?;
    let g = l.gram().scale(&Z::from(sign));
    let (p, h) = lll_gram(&g);
    let (mu, b) = gso(&h.to_q());
    let mut found: Vec<Vec<Z>> = Vec::new();
    let mut x = vec![Z::zero(); n];
    let r = Q::from_integer(bound.clone());
    enumerate(n, &mu, &b, &mut x, r, true, &mut found);
    let mut out: Vec<(Vec<Z>, Z)> = found
        .into_iter()
        .map(|y| {
            let mut v = p.left_apply(&y);
            normalize_sign(&mut v);
            let nv = l.pair_z(&v, &v);
            (v, nv)
        })
        .collect();
    out.sort_by(|(a, na), (b, nb)| na.abs().cmp(&nb.abs()).then_with(|| b.cmp(a)));
    Ok(out)
}

fn enumerate(
    level: usize,
    mu: &QMatrix,
    b: &[Q],
    x: &mut Vec<Z>,
    remaining: Q,
    top: bool,
    out: &mut Vec<Vec<Z>>,
) {
    if level == 0 {
        if !top {
            out.push(x.clone());
        }
        return;
    }
    let j = level - 1;
    let n = x.len();
    let mut c = Q::zero();
    for i in j + 1..n {
        if !x[i].is_zero() {
            c -= Q::from_integer(x[i].clone()) * &mu[(i, j)];
        }
    }
    let cf = c.to_f64().unwrap_or(0.0);
    let rad = (remaining.to_f64().unwrap_or(0.0) / b[j].to_f64().unwrap_or(1.0)).max(0.0).sqrt();
    let lo = Z::from((cf - rad).floor() as i64 - 1);
    let hi = Z::from((cf + rad).ceil() as i64 + 1);
    let mut t = if top { lo.clone().max(Z::zero()) } else { lo };
    while t <= hi {
        let d = Q::from_integer(t.clone()) - &c;
        let cost = &b[j] * &d * &d;
        if cost <= remaining {
            x[j] = t.clone();
            let still_top = top && t.is_zero();
            enumerate(level - 1, mu, b, x, &remaining - &cost, still_top, out);
        }
        t += 1;
    }
    x[j] = Z::zero();
}

/// ADE decomposition: (letter, rank) → multiplicity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RootType {
    pub components: BTreeMap<(char, std::cmp::Reverse<usize>), usize>,
}

impl RootType {
    pub fn add(&mut self, letter: char, rank: usize, count: usize) {
        if count > 0 {
            *self.components.entry((letter, std::cmp::Reverse(rank))).or_default() += count;
        }
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|((_, r), m)| r.0 * m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// |det| of the root lattice.
    pub fn det_abs(&self) -> Z {
        let mut d = Z::one();
        for ((c, r), m) in &self.components {
            let f = match c {
                'A' => Z::from(r.0 as i64 + 1),
                'D' => Z::from(4),
                'E' => Z::from(9 - r.0 as i64),
                _ => unreachable!(),
            };
            d *= num_traits::pow(f, *m);
        }
        d
    }

    /// Parses "A7+A3^3+A1^2"; "0" or "" is the empty type.
    pub fn parse(s: &str) -> Option<RootType> {
        let mut rt = RootType::default();
        let s = s.trim();
        if s.is_empty() || s == "0" {
            return Some(rt);
        }
        for part in s.split('+') {
            let part = part.trim();
            let (body, mult) = match part.split_once('^') {
                Some((b, m)) => (b, m.parse().ok()?),
                None => (part, 1),
            };
            let letter = body.chars().next()?;
            if !matches!(letter, 'A' | 'D' | 'E') {
                return None;
            }
            let rank: usize = body[1..].parse().ok()?;
            rt.add(letter, rank, mult);
        }
        Some(rt)
    }

    /// Number of components of type A_r, summed over r with given rank.
    pub fn count(&self, letter: char, rank: usize) -> usize {
        self.components.get(&(letter, std::cmp::Reverse(rank))).copied().unwrap_or(0)
    }
}

impl fmt::Display for RootType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|((c, r), m)| if *m == 1 { format!("{c}{}", r.0) } else { format!("{c}{}^{m}", r.0) })
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// Classifies an irreducible simply laced root system by (number of roots, rank).
pub fn classify_component(roots: usize, rank: usize) -> Option<(char, usize)> {
    let r = rank;
    if roots == r * (r + 1) {
        return Some(('A', r));
    }
    if r >= 4 && roots == 2 * r * (r - 1) {
        return Some(('D', r));
    }
    match (roots, r) {
        (72, 6) => Some(('E', 6)),
        (126, 7) => Some(('E', 7)),
        (240, 8) => Some(('E', 8)),
        _ => None,
    }
}

/// Roots (vectors of norm ±2), one per ± pair.
pub fn roots(l: &Lattice) -> Result<Vec<Vec<Z>>> {
    let two = Z::from(2);
    Ok(short_vectors_with_norms(l, &two)?
        .into_iter()
        .filter(|(_, n)| n.abs() == two)
        .map(|(v, _)| v)
        .collect())
}

/// Connected components of the non-orthogonality graph on the roots.
pub fn root_components(l: &Lattice, rs: &[Vec<Z>]) -> Vec<Vec<usize>> {
    let n = rs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut i = i;
        while p[i] != r {
            let nx = p[i];
            p[i] = r;
            i = nx;
        }
        r
    }
    let gv: Vec<Vec<Z>> = rs.iter().map(|v| l.gram().left_apply(v)).collect();
    for i in 0..n {
        for j in i + 1..n {
            if !crate::matrix::dot(&gv[i], &rs[j]).is_zero() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

pub fn root_type(l: &Lattice) -> Result<RootType> {
    let rs = roots(l)?;
    let mut rt = RootType::default();
    for comp in root_components(l, &rs) {
        let m = ZMatrix::from_rows(comp.iter().map(|&i| rs[i].clone()).collect(), l.rank());
        let rank = m.to_q().rank();
        let (c, r) = classify_component(2 * comp.len(), rank).ok_or_else(|| {
            LatticeError::SelfCheck(format!("unclassifiable root component: {} roots, rank {rank}", 2 * comp.len()))
        })?;
        rt.add(c, r, 1);
    }
    Ok(rt)
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum IsometryVerdict {
    /// Rows: images of the basis of the first lattice, in coordinates of the second.
    Isometric { witness: Vec<Vec<String>> },
    NotIsometric { reason: String },
    Inconclusive { reason: String },
}

impl IsometryVerdict {
    pub fn is_isometric(&self) -> bool {
        matches!(self, IsometryVerdict::Isometric { .. })
    }
}

pub const DEFAULT_ISOMETRY_RANK: usize = 12;
const ISO_BUDGET: u64 = 5_000_000;

pub fn definite_isometric(l1: &Lattice, l2: &Lattice) -> Result<IsometryVerdict> {
    definite_isometric_bounded(l1, l2, DEFAULT_ISOMETRY_RANK)
}

pub fn definite_isometric_bounded(l1: &Lattice, l2: &Lattice, max_rank: usize) -> Result<IsometryVerdict> {
    let s1 = definite_sign(l1)?;
    let s2 = definite_sign(l2)?;
    if l1.rank() != l2.rank() {
        return Ok(IsometryVerdict::NotIsometric { reason: "ranks differ".into() });
    }
    if s1 != s2 {
        return Ok(IsometryVerdict::NotIsometric { reason: "signatures differ".into() });
    }
    if l1.det() != l2.det() {
        return Ok(IsometryVerdict::NotIsometric { reason: "determinants differ".into() });
    }
    let n = l1.rank();
    if n > max_rank {
        return Ok(IsometryVerdict::Inconclusive { reason: format!("rank {n} exceeds bound {max_rank}") });
    }
    if n == 0 {
        return Ok(IsometryVerdict::Isometric { witness: vec![] });
    }
    let sign = Z::from(s1);
    let (p1, h1) = lll_gram(&l1.gram().scale(&sign));
    let h1 = h1.scale(&sign);
    let maxn = (0..n).map(|i| h1[(i, i)].abs()).max().unwrap();
    let mut cands: BTreeMap<Z, Vec<Vec<Z>>> = BTreeMap::new();
    for (v, nv) in short_vectors_with_norms(l2, &maxn)? {
        let neg: Vec<Z> = v.iter().map(|x| -x.clone()).collect();
        let e = cands.entry(nv).or_default();
        e.push(v);
        e.push(neg);
    }
    let g2 = l2.gram();
    let mut chosen: Vec<Vec<Z>> = Vec::new();
    let mut nodes = 0u64;
    let res = iso_search(&h1, g2, &cands, &mut chosen, &mut nodes);
    match res {
        None => Ok(IsometryVerdict::Inconclusive { reason: "isometry search budget exhausted".into() }),
        Some(false) => Ok(IsometryVerdict::NotIsometric { reason: "exhaustive search found no isometry".into() }),
        Some(true) => {
            let w = ZMatrix::from_rows(chosen, n);
            let pinv = p1.to_q().inverse().and_then(|m| m.to_z()).expect("unimodular");
            let x = pinv.mul(&w);
            if x.mul(g2).mul(&x.transpose()) != *l1.gram() || !x.det().abs().is_one() {
                return Err(LatticeError::SelfCheck("isometry witness failed".into()));
            }
            Ok(IsometryVerdict::Isometric {
                witness: x.to_rows().iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect(),
            })
        }
    }
}

fn iso_search(
    h1: &ZMatrix,
    g2: &ZMatrix,
    cands: &BTreeMap<Z, Vec<Vec<Z>>>,
    chosen: &mut Vec<Vec<Z>>,
    nodes: &mut u64,
) -> Option<bool> {
    let i = chosen.len();
    if i == h1.rows() {
        return Some(true);
    }
    let Some(list) = cands.get(&h1[(i, i)]) else { return Some(false) };
    let prev: Vec<Vec<Z>> = chosen.iter().map(|c| g2.left_apply(c)).collect();
    for v in list {
        *nodes += 1;
        if *nodes > ISO_BUDGET {
            return None;
        }
        if (0..i).all(|j| crate::matrix::dot(&prev[j], v) == h1[(i, j)]) {
            chosen.push(v.clone());
            match iso_search(h1, g2, cands, chosen, nodes) {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            chosen.pop();
        }
    }
    Some(false)
}

/// Even, indefinite, and rank ≥ length(A_L) + 2.
pub fn uniqueness_criterion(l: &Lattice) -> bool {
    if !l.is_even() || l.is_degenerate() || !l.is_indefinite() {
        return false;
    }
    let snf = crate::normal_form::smith_normal_form(l.gram());
    let length = snf.invariant_factors().iter().filter(|d| !d.is_one()).count();
    l.rank() >= length + 2
}

/// gcd of the entries, for divisibility bookkeeping.
pub fn content(v: &[Z]) -> Z {
    v.iter().fold(Z::zero(), |a, b| a.gcd(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cartan_a(n: usize) -> Lattice {
        let g = ZMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Z::from(-2)
            } else if i.abs_diff(j) == 1 {
                Z::one()
            } else {
                Z::zero()
            }
        });
        Lattice::new(format!("A{n}"), g).unwrap()
    }

    #[test]
    fn a1_roots() {
        let l = cartan_a(1);
        assert_eq!(short_vectors(&l, &Z::from(2)).unwrap(), vec![vec![Z::one()]]);
    }

    #[test]
    fn a_n_root_counts() {
        for n in 1..6 {
            let rt = root_type(&cartan_a(n)).unwrap();
            assert_eq!(rt.to_string(), format!("A{n}"));
        }
    }

    #[test]
    fn root_type_parse_roundtrip() {
        let rt = RootType::parse("A7+A3^3+A1^2").unwrap();
        assert_eq!(rt.to_string(), "A7+A3^3+A1^2");
        assert_eq!(rt.rank(), 7 + 9 + 2);
        assert_eq!(RootType::parse("A1^2+A3^3+A7").unwrap(), rt);
    }

    #[test]
    fn lll_preserves_lattice() {
        let g = ZMatrix::from_i64(&[vec![10, 7, 3], vec![7, 6, 2], vec![3, 2, 5]]);
        let (p, h) = lll_gram(&g);
        assert!(p.is_unimodular());
        assert_eq!(p.mul(&g).mul(&p.transpose()), h);
    }

    #[test]
    fn sums_of_a1() {
        let l1 = Lattice::from_i64("A1A1", &[vec![-2, 0], vec![0, -2]]).unwrap();
        let l2 = Lattice::from_i64("x", &[vec![-2, 2], vec![2, -4]]).unwrap();
        assert!(definite_isometric(&l1, &l2).unwrap().is_isometric());
        let a = Lattice::from_i64("a", &[vec![-2, 0], vec![0, -8]]).unwrap();
        let b = Lattice::from_i64("b", &[vec![-4, 0], vec![0, -4]]).unwrap();
        assert!(matches!(definite_isometric(&a, &b).unwrap(), IsometryVerdict::NotIsometric { .. }));
    }
}
