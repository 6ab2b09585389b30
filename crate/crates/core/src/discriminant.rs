//! Discriminant groups with their finite quadratic forms, and isomorphism testing.

use crate::arith::{factor, inv_mod, pow, q_mod, valuation, Q, Z};
use crate::error::{LatticeError, Result};
use crate::lattice::Lattice;
use crate::matrix::{QMatrix, ZMatrix};
use crate::normal_form::smith_normal_form;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::HashMap;

/// A finite abelian group ⊕ Z/d_i with q valued in Q/2Z and b in Q/Z.
#[derive(Clone, Debug, Serialize)]
pub struct FiniteQuadraticForm {
    #[serde(with = "crate::arith::as_str::vec_z")]
    pub invariant_factors: Vec<Z>,
    #[serde(with = "crate::arith::as_str::vec_q")]
    pub q: Vec<Q>,
    pub b: QMatrix,
    /// Generators as rational vectors in the lattice basis, when known.
    #[serde(skip)]
    pub generators: Option<QMatrix>,
}

impl FiniteQuadraticForm {
    pub fn new(invariant_factors: Vec<Z>, q: Vec<Q>, b: QMatrix) -> Result<Self> {
        let n = invariant_factors.len();
        if q.len() != n || b.rows() != n || b.cols() != n {
            return Err(LatticeError::Dimension("finite form data".into()));
        }
        let one = Q::one();
        let two = Q::from_integer(Z::from(2));
        let q: Vec<Q> = q.iter().map(|x| q_mod(x, &two)).collect();
        let b = b.map(|x| q_mod(x, &one));
        for i in 0..n {
            if q_mod(&q[i], &one) != b[(i, i)] {
                return Err(LatticeError::SelfCheck(format!("q and b disagree on generator {i}")));
            }
        }
        Ok(FiniteQuadraticForm { invariant_factors, q, b, generators: None })
    }

    /// u(n): (Z/n)² with q = 0 on the generators and pairing 1/n.
    pub fn u(n: i64) -> Self {
        let h = Q::new(Z::one(), Z::from(n));
        let b = QMatrix::from_rows(vec![vec![Q::zero(), h.clone()], vec![h, Q::zero()]], 2);
        Self::new(vec![Z::from(n); 2], vec![Q::zero(); 2], b).unwrap()
    }

    /// Z/n with q(g) = value.
    pub fn cyclic(n: i64, value: Q) -> Self {
        let b = QMatrix::from_rows(vec![vec![value.clone()]], 1);
        Self::new(vec![Z::from(n)], vec![value], b).unwrap()
    }

    pub fn direct_sum(&self, o: &Self) -> Self {
        let mut f = self.invariant_factors.clone();
        f.extend(o.invariant_factors.iter().cloned());
        let mut q = self.q.clone();
        q.extend(o.q.iter().cloned());
        FiniteQuadraticForm {
            invariant_factors: f,
            q,
            b: QMatrix::block_diag(&[self.b.clone(), o.b.clone()]),
            generators: None,
        }
    }

    pub fn power(&self, k: usize) -> Self {
        (1..k).fold(self.clone(), |a, _| a.direct_sum(self))
    }

    pub fn order(&self) -> Z {
        self.invariant_factors.iter().product()
    }

    /// Minimal number of generators.
    pub fn length(&self) -> usize {
        let mut best = 0;
        for (p, _) in factor(&self.order()) {
            best = best.max(self.invariant_factors.iter().filter(|d| d.is_multiple_of(&p)).count());
        }
        best
    }

    /// q of Σ x_i g_i, reduced mod 2.
    pub fn value(&self, x: &[Z]) -> Q {
        let mut s = Q::zero();
        for i in 0..x.len() {
            if x[i].is_zero() {
                continue;
            }
            let xi = Q::from_integer(x[i].clone());
            s += &xi * &xi * &self.q[i];
            for j in i + 1..x.len() {
                s += Q::from_integer(Z::from(2)) * &xi * Q::from_integer(x[j].clone()) * &self.b[(i, j)];
            }
        }
        q_mod(&s, &Q::from_integer(Z::from(2)))
    }

    pub fn bilinear(&self, x: &[Z], y: &[Z]) -> Q {
        let mut s = Q::zero();
        for i in 0..x.len() {
            for j in 0..y.len() {
                if !x[i].is_zero() && !y[j].is_zero() {
                    s += Q::from_integer(&x[i] * &y[j]) * &self.b[(i, j)];
                }
            }
        }
        q_mod(&s, &Q::one())
    }
}

/// A_L = L*/L with its quadratic form, generators g_i = (column i of V)/d_i from U·G·V = D.
pub fn discriminant_form(l: &Lattice) -> Result<FiniteQuadraticForm> {
    l.require_nondegenerate()?;
    l.require_even()?;
    let snf = smith_normal_form(l.gram());
    let n = l.rank();
    let mut facs = Vec::new();
    let mut gens = Vec::new();
    for i in 0..n {
        let d = snf.d[(i, i)].clone();
        if d > Z::one() {
            let inv = Q::new(Z::one(), d.clone());
            gens.push(snf.v.col(i).into_iter().map(|x| Q::from_integer(x) * &inv).collect());
            facs.push(d);
        }
    }
    let g = QMatrix::from_rows(gens, n);
    let gram = l.gram_of(&g);
    let q = (0..g.rows()).map(|i| gram[(i, i)].clone()).collect();
    let mut f = FiniteQuadraticForm::new(facs, q, gram)?;
    f.generators = Some(g);
    Ok(f)
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FqfVerdict {
    /// Row i is the image of generator i of the first form, in the generators of the second.
    Isomorphic { witness: Vec<Vec<String>> },
    NotIsomorphic { reason: String },
    Inconclusive { reason: String },
}

impl FqfVerdict {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, FqfVerdict::Isomorphic { .. })
    }
    pub fn is_inconclusive(&self) -> bool {
        matches!(self, FqfVerdict::Inconclusive { .. })
    }
}

pub const DEFAULT_FQF_BOUND: u64 = 100_000;
const NODE_BUDGET: u64 = 2_000_000;

pub fn fqf_bound() -> u64 {
    std::env::var("K3LAT_FQF_BOUND").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_FQF_BOUND)
}

pub fn fqf_isomorphic(a: &FiniteQuadraticForm, b: &FiniteQuadraticForm) -> FqfVerdict {
    fqf_isomorphic_bounded(a, b, fqf_bound())
}

/// One p-primary component, in integer-scaled form: values q·N mod 2N and b·N mod N.
struct PPart {
    p: u64,
    orders: Vec<u64>,
    /// global generator index and multiplier for each local generator
    origin: Vec<(usize, Z)>,
    qv: Vec<i64>,
    bv: Vec<Vec<i64>>,
    level: i64,
}

impl PPart {
    fn size(&self) -> u64 {
        self.orders.iter().product()
    }

    fn decode(&self, mut idx: u64) -> Vec<u64> {
        self.orders
            .iter()
            .map(|&o| {
                let c = idx % o;
                idx /= o;
                c
            })
            .collect()
    }

    fn encode(&self, c: &[u64]) -> u64 {
        let mut idx = 0;
        for (k, &o) in self.orders.iter().enumerate().rev() {
            idx = idx * o + c[k] % o;
        }
        idx
    }

    fn add(&self, x: &[u64], y: &[u64], t: u64) -> Vec<u64> {
        x.iter().zip(y).zip(&self.orders).map(|((a, b), o)| (a + t * b) % o).collect()
    }

    fn qval(&self, c: &[u64]) -> i64 {
        let m = 2 * self.level;
        let mut s: i128 = 0;
        for i in 0..c.len() {
            let ci = c[i] as i128;
            s += ci * ci * self.qv[i] as i128;
            for j in i + 1..c.len() {
                s += 2 * ci * c[j] as i128 * self.bv[i][j] as i128;
            }
        }
        s.rem_euclid(m as i128) as i64
    }

    fn bval(&self, x: &[u64], y: &[u64]) -> i64 {
        let mut s: i128 = 0;
        for i in 0..x.len() {
            if x[i] == 0 {
                continue;
            }
            for j in 0..y.len() {
                s += x[i] as i128 * y[j] as i128 * self.bv[i][j] as i128;
            }
        }
        s.rem_euclid(self.level as i128) as i64
    }

    fn order_of(&self, c: &[u64]) -> u64 {
        c.iter()
            .zip(&self.orders)
            .map(|(&x, &o)| if x == 0 { 1 } else { o / gcd(x, o) })
            .max()
            .unwrap_or(1)
    }

    fn height(&self, c: &[u64]) -> u32 {
        c.iter()
            .filter(|&&x| x != 0)
            .map(|&x| {
                let mut k = 0;
                let mut x = x;
                while x % self.p == 0 {
                    x /= self.p;
                    k += 1;
                }
                k
            })
            .min()
            .unwrap_or(u32::MAX)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

fn p_part(f: &FiniteQuadraticForm, p: &Z, level: &Z) -> PPart {
    let mut orders = Vec::new();
    let mut origin = Vec::new();
    for (i, d) in f.invariant_factors.iter().enumerate() {
        let a = valuation(d, p);
        if a > 0 {
            let pa = pow(p, a);
            orders.push(pa.to_u64().unwrap());
            origin.push((i, d / pa));
        }
    }
    let n = Q::from_integer(level.clone());
    let k = origin.len();
    let mut qv = Vec::with_capacity(k);
    let mut bv = vec![vec![0i64; k]; k];
    for j in 0..k {
        let (ij, mj) = &origin[j];
        let mq = Q::from_integer(mj.clone());
        let v = &mq * &mq * &f.q[*ij] * &n;
        qv.push(v.to_integer().mod_floor(&(level * 2)).to_i64().unwrap());
        for l in 0..k {
            let (il, ml) = &origin[l];
            let w = &mq * Q::from_integer(ml.clone()) * &f.b[(*ij, *il)] * &n;
            bv[j][l] = w.to_integer().mod_floor(level).to_i64().unwrap();
        }
    }
    PPart { p: p.to_u64().unwrap(), orders, origin, qv, bv, level: level.to_i64().unwrap() }
}

type Key = (u64, i64, u32);

pub fn fqf_isomorphic_bounded(
    a: &FiniteQuadraticForm,
    b: &FiniteQuadraticForm,
    bound: u64,
) -> FqfVerdict {
    let oa = a.order();
    let ob = b.order();
    if oa != ob {
        return FqfVerdict::NotIsomorphic { reason: format!("group orders differ: {oa} vs {ob}") };
    }
    let mut fa: Vec<Z> = a.invariant_factors.iter().filter(|d| !d.is_one()).cloned().collect();
    let mut fb: Vec<Z> = b.invariant_factors.iter().filter(|d| !d.is_one()).cloned().collect();
    if oa > Z::from(bound) {
        return FqfVerdict::Inconclusive {
            reason: format!("fqf order bound exceeded: order {oa} > {bound}"),
        };
    }
    fa.sort();
    fb.sort();
    let level = fa.iter().chain(&fb).fold(Z::one(), |acc, d| acc.lcm(d));
    let mut images: Vec<Vec<Q>> = vec![vec![Q::zero(); b.invariant_factors.len()]; a.invariant_factors.len()];
    for (p, _) in factor(&oa) {
        let pa = p_part(a, &p, &level);
        let pb = p_part(b, &p, &level);
        let mut ea = pa.orders.clone();
        let mut eb = pb.orders.clone();
        ea.sort();
        eb.sort();
        if ea != eb {
            return FqfVerdict::NotIsomorphic {
                reason: format!("{p}-primary groups differ: {ea:?} vs {eb:?}"),
            };
        }
        let mut hist_a: HashMap<Key, u64> = HashMap::new();
        let mut by_key: HashMap<Key, Vec<u64>> = HashMap::new();
        for idx in 0..pa.size() {
            let c = pa.decode(idx);
            *hist_a.entry((pa.order_of(&c), pa.qval(&c), pa.height(&c))).or_default() += 1;
        }
        let mut hist_b: HashMap<Key, u64> = HashMap::new();
        for idx in 0..pb.size() {
            let c = pb.decode(idx);
            let key = (pb.order_of(&c), pb.qval(&c), pb.height(&c));
            *hist_b.entry(key).or_default() += 1;
            by_key.entry(key).or_default().push(idx);
        }
        if hist_a != hist_b {
            return FqfVerdict::NotIsomorphic {
                reason: format!("{p}-primary value distributions differ"),
            };
        }
        let mut order_idx: Vec<usize> = (0..pa.orders.len()).collect();
        order_idx.sort_by_key(|&j| {
            let c = unit(pa.orders.len(), j);
            let key = (pa.orders[j], pa.qval(&c), 0);
            (std::cmp::Reverse(pa.orders[j]), by_key.get(&key).map_or(0, |v| v.len()))
        });
        let mut search = Search { pa: &pa, pb: &pb, by_key: &by_key, order: &order_idx, nodes: 0, chosen: vec![None; pa.orders.len()] };
        let mut sub = vec![false; pb.size() as usize];
        sub[0] = true;
        match search.dfs(0, &sub, &[0]) {
            Some(true) => {}
            Some(false) => {
                return FqfVerdict::NotIsomorphic {
                    reason: format!("no isometry of the {p}-primary parts (exhaustive search)"),
                }
            }
            None => {
                return FqfVerdict::Inconclusive {
                    reason: format!("search budget exhausted on the {p}-primary part"),
                }
            }
        }
        // CRT: the p-component of g_i is t·h with t = m⁻¹ mod p^a
        for (j, (ia, m)) in pa.origin.iter().enumerate() {
            let pj = Z::from(pa.orders[j]);
            let t = inv_mod(m, &pj).expect("coprime cofactor");
            let y = pb.decode(search.chosen[j].unwrap());
            for (k, (ib, mb)) in pb.origin.iter().enumerate() {
                images[*ia][*ib] += Q::from_integer(&t * Z::from(y[k]) * mb);
            }
        }
    }
    let witness: Vec<Vec<Z>> = images
        .iter()
        .map(|row| {
            row.iter()
                .zip(&b.invariant_factors)
                .map(|(x, d)| x.to_integer().mod_floor(d))
                .collect()
        })
        .collect();
    if let Err(e) = verify_witness(a, b, &witness) {
        return FqfVerdict::Inconclusive { reason: format!("witness verification failed: {e}") };
    }
    FqfVerdict::Isomorphic {
        witness: witness.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
    }
}

fn unit(n: usize, j: usize) -> Vec<u64> {
    let mut c = vec![0; n];
    c[j] = 1;
    c
}

struct Search<'a> {
    pa: &'a PPart,
    pb: &'a PPart,
    by_key: &'a HashMap<Key, Vec<u64>>,
    order: &'a [usize],
    nodes: u64,
    chosen: Vec<Option<u64>>,
}

impl Search<'_> {
    /// Some(true) found, Some(false) exhausted, None budget hit.
    fn dfs(&mut self, depth: usize, sub: &[bool], elems: &[u64]) -> Option<bool> {
        if depth == self.order.len() {
            return Some(true);
        }
        let j = self.order[depth];
        let n = self.pa.orders.len();
        let gj = unit(n, j);
        let ord = self.pa.orders[j];
        let key = (ord, self.pa.qval(&gj), 0);
        let Some(cands) = self.by_key.get(&key) else { return Some(false) };
        for &y in cands {
            self.nodes += 1;
            if self.nodes > NODE_BUDGET {
                return None;
            }
            let yc = self.pb.decode(y);
            let ok = self.order[..depth].iter().all(|&k| {
                let prev = self.pb.decode(self.chosen[k].unwrap());
                self.pb.bval(&yc, &prev) == self.pa.bval(&gj, &unit(n, k))
            });
            if !ok {
                continue;
            }
            // ⟨y⟩ ∩ H = 0 iff the order-p element of ⟨y⟩ avoids H
            let low: Vec<u64> = yc.iter().map(|&x| x * (ord / self.pa.p)).collect();
            if sub[self.pb.encode(&low) as usize] {
                continue;
            }
            let mut sub2 = sub.to_vec();
            let mut elems2 = Vec::with_capacity(elems.len() * ord as usize);
            for &h in elems {
                let hc = self.pb.decode(h);
                for t in 0..ord {
                    let e = self.pb.encode(&self.pb.add(&hc, &yc, t));
                    if !sub2[e as usize] {
                        sub2[e as usize] = true;
                    }
                    elems2.push(e);
                }
            }
            self.chosen[j] = Some(y);
            match self.dfs(depth + 1, &sub2, &elems2) {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            self.chosen[j] = None;
        }
        Some(false)
    }
}

fn verify_witness(a: &FiniteQuadraticForm, b: &FiniteQuadraticForm, w: &[Vec<Z>]) -> Result<()> {
    for i in 0..w.len() {
        let d = &a.invariant_factors[i];
        if !w[i].iter().zip(&b.invariant_factors).all(|(x, e)| (x * d).is_multiple_of(e)) {
            return Err(LatticeError::SelfCheck(format!("image of generator {i} has wrong order")));
        }
        if b.value(&w[i]) != a.q[i] {
            return Err(LatticeError::SelfCheck(format!("q differs on generator {i}")));
        }
        for j in 0..w.len() {
            if b.bilinear(&w[i], &w[j]) != a.b[(i, j)] {
                return Err(LatticeError::SelfCheck(format!("b differs on ({i},{j})")));
            }
        }
    }
    Ok(())
}

/// Convenience: rational matrix of witness strings.
pub fn witness_matrix(w: &[Vec<String>]) -> ZMatrix {
    let cols = w.first().map_or(0, |r| r.len());
    ZMatrix::from_rows(w.iter().map(|r| r.iter().map(|s| s.parse().unwrap()).collect()).collect(), cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{qf, z};

    #[test]
    fn cyclic_form_of_rank_one() {
        let l = Lattice::from_i64("<6>", &[vec![6]]).unwrap();
        let f = discriminant_form(&l).unwrap();
        assert_eq!(f.invariant_factors, vec![z(6)]);
        assert_eq!(f.q[0], qf(1, 6));
    }

    #[test]
    fn u2_sums_reordered() {
        let a = FiniteQuadraticForm::u(2).power(2);
        let mut b = a.clone();
        b.b.swap_rows(0, 3);
        b.b.swap_cols(0, 3);
        b.q.swap(0, 3);
        assert!(fqf_isomorphic(&a, &b).is_isomorphic());
    }

    #[test]
    fn u2_vs_odd_values() {
        let a = FiniteQuadraticForm::u(2);
        let b = FiniteQuadraticForm::cyclic(2, qf(1, 1)).direct_sum(&FiniteQuadraticForm::cyclic(2, qf(1, 1)));
        assert!(matches!(fqf_isomorphic(&a, &b), FqfVerdict::NotIsomorphic { .. }));
    }

    #[test]
    fn bound_is_respected() {
        let a = FiniteQuadraticForm::u(2).power(4);
        assert!(fqf_isomorphic_bounded(&a, &a, 100).is_inconclusive());
    }

    #[test]
    fn mixed_primes_combine() {
        // Z/6 with q = 1/6 against Z/2(1/2) ⊕ Z/3(2/3)
        let a = FiniteQuadraticForm::cyclic(6, qf(1, 6));
        let b = FiniteQuadraticForm::cyclic(2, qf(3, 2)).direct_sum(&FiniteQuadraticForm::cyclic(3, qf(2, 3)));
        assert!(fqf_isomorphic(&a, &b).is_isomorphic());
        assert!(fqf_isomorphic(&b, &a).is_isomorphic());
        let c = FiniteQuadraticForm::cyclic(2, qf(1, 2)).direct_sum(&FiniteQuadraticForm::cyclic(3, qf(2, 3)));
        assert!(!fqf_isomorphic(&a, &c).is_isomorphic());
    }
}
