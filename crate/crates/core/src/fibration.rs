//! Bookkeeping for elliptic fibrations: trivial lattice, Mordell-Weil discriminant,
//! heights, and the A_{n-1} + A_{n-1} + <-2n> -> A_{2n-1} gluing.

use crate::arith::{q, qf, Q, Z};
use crate::atlas;
use crate::error::{LatticeError, Result};
use crate::lattice::Lattice;
use crate::matrix::QMatrix;
use crate::overlattice::overlattice;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Fiber {
    I(u32),
    III,
}

impl Fiber {
    pub fn root_rank(self) -> usize {
        match self {
            Fiber::I(n) => n.saturating_sub(1) as usize,
            Fiber::III => 1,
        }
    }

    /// Number of components.
    pub fn components(self) -> u32 {
        match self {
            Fiber::I(n) => n,
            Fiber::III => 2,
        }
    }

    pub fn euler(self) -> u32 {
        match self {
            Fiber::I(n) => n,
            Fiber::III => 3,
        }
    }

    /// |det| of the root lattice, 1 for irreducible fibres.
    pub fn det(self) -> Z {
        Z::from(self.components())
    }

    /// Local height correction at component i (0 = the component met by the zero section).
    pub fn contr(self, i: u32) -> Result<Q> {
        let n = self.components();
        if i >= n {
            return Err(LatticeError::Param(format!("component {i} does not exist on {self}")));
        }
        Ok(match self {
            Fiber::I(n) => qf((i * (n - i)) as i64, n as i64),
            Fiber::III => qf(i as i64, 2),
        })
    }

    /// Correction for the pairing of sections meeting components i and j.
    pub fn contr_pair(self, i: u32, j: u32) -> Result<Q> {
        let n = self.components();
        if i >= n || j >= n {
            return Err(LatticeError::Param(format!("component index out of range on {self}")));
        }
        if i == 0 || j == 0 {
            return Ok(Q::zero());
        }
        Ok(match self {
            Fiber::I(n) => {
                let (a, b) = (i.min(j), i.max(j));
                qf((a * (n - b)) as i64, n as i64)
            }
            Fiber::III => qf(1, 2),
        })
    }

    pub fn parse(s: &str) -> Result<Fiber> {
        let s = s.trim();
        if s == "III" {
            return Ok(Fiber::III);
        }
        s.strip_prefix('I')
            .and_then(|n| n.parse().ok())
            .filter(|&n: &u32| n >= 1)
            .map(Fiber::I)
            .ok_or_else(|| LatticeError::Parse(format!("unknown fibre type {s:?}")))
    }
}

impl fmt::Display for Fiber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fiber::I(n) => write!(f, "I{n}"),
            Fiber::III => write!(f, "III"),
        }
    }
}

/// A section through its intersection with the zero section and, for every reducible
/// fibre of the configuration (in order), the component it meets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectionData {
    pub dot_zero: i64,
    pub contacts: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FibrationConfig {
    pub fibers: Vec<Fiber>,
    /// Invariant factors of the torsion subgroup.
    pub mw_torsion: Vec<u32>,
    pub mw_rank: usize,
    /// Picard number when known; Shioda-Tate is then an equality.
    pub rho: Option<usize>,
}

impl FibrationConfig {
    /// "8I2+8I1" style description.
    pub fn parse_fibers(s: &str) -> Result<Vec<Fiber>> {
        let mut out = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            let k = part.find(|c: char| !c.is_ascii_digit()).unwrap_or(part.len());
            let count: usize = if k == 0 { 1 } else { part[..k].parse().unwrap() };
            let f = Fiber::parse(&part[k..])?;
            out.extend(std::iter::repeat_n(f, count));
        }
        Ok(out)
    }

    pub fn new(fibers: &str, torsion: &[u32], mw_rank: usize, rho: Option<usize>) -> Result<Self> {
        let cfg = FibrationConfig { fibers: Self::parse_fibers(fibers)?, mw_torsion: torsion.to_vec(), mw_rank, rho };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn root_rank(&self) -> usize {
        self.fibers.iter().map(|f| f.root_rank()).sum()
    }

    pub fn reducible(&self) -> Vec<Fiber> {
        self.fibers.iter().copied().filter(|f| f.root_rank() > 0).collect()
    }

    pub fn torsion_order(&self) -> Z {
        self.mw_torsion.iter().fold(Z::one(), |acc, &t| acc * Z::from(t))
    }

    /// |det Tr| for Tr = U + (fibre root lattices).
    pub fn tr_det(&self) -> Z {
        self.fibers.iter().fold(Z::one(), |acc, f| acc * f.det())
    }

    pub fn validate(&self) -> Result<()> {
        let st = 2 + self.root_rank() + self.mw_rank;
        match self.rho {
            Some(r) if r != st => {
                return Err(LatticeError::Param(format!("Shioda-Tate: 2 + roots + rank = {st} but rho = {r}")))
            }
            None if st > 20 => return Err(LatticeError::Param(format!("Shioda-Tate: rank {st} > 20"))),
            _ => {}
        }
        let e: u32 = self.fibers.iter().map(|f| f.euler()).sum();
        if e > 24 {
            return Err(LatticeError::Param(format!("fibres have total Euler number {e} > 24")));
        }
        Ok(())
    }
}

/// |d(MWL)| = |d(NS)| |MW_tors|^2 / |d(Tr)|.
pub fn mwl_discriminant(cfg: &FibrationConfig, ns_det: &Z) -> Result<Q> {
    cfg.validate()?;
    let t = cfg.torsion_order();
    let v = Q::new(ns_det.abs() * &t * &t, cfg.tr_det());
    if !v.is_positive() {
        return Err(LatticeError::Param("non-positive Mordell-Weil discriminant".into()));
    }
    if !v.is_integer() {
        return Err(LatticeError::Param(format!("Mordell-Weil discriminant {v} is not an integer")));
    }
    if cfg.mw_rank == 0 && !v.is_one() {
        return Err(LatticeError::Param(format!("rank 0 but |d(MWL)| = {v}")));
    }
    Ok(v)
}

/// h(P) = 4 + 2 P.O - sum of local corrections.
pub fn height(cfg: &FibrationConfig, s: &SectionData) -> Result<Q> {
    let red = cfg.reducible();
    if red.len() != s.contacts.len() {
        return Err(LatticeError::Param(format!(
            "{} contacts for {} reducible fibres",
            s.contacts.len(),
            red.len()
        )));
    }
    let mut h = q(4) + q(2 * s.dot_zero);
    for (f, &i) in red.iter().zip(&s.contacts) {
        h -= f.contr(i)?;
    }
    Ok(h)
}

/// <P, Q> = 2 + P.O + Q.O - P.Q - sum of local corrections.
pub fn height_pairing(cfg: &FibrationConfig, p: &SectionData, r: &SectionData, p_dot_r: i64) -> Result<Q> {
    let red = cfg.reducible();
    if red.len() != p.contacts.len() || red.len() != r.contacts.len() {
        return Err(LatticeError::Param("contact lists do not match the fibres".into()));
    }
    let mut h = q(2 + p.dot_zero + r.dot_zero - p_dot_r);
    for ((f, &i), &j) in red.iter().zip(&p.contacts).zip(&r.contacts) {
        h -= f.contr_pair(i, j)?;
    }
    Ok(h)
}

/// Orthogonal projection of v onto the span of the rows of b, for the form g.
pub fn project(g: &QMatrix, b: &QMatrix, v: &[Q]) -> Vec<Q> {
    if b.rows() == 0 {
        return vec![Q::zero(); v.len()];
    }
    let gb = b.mul(g).mul(&b.transpose());
    let rhs = b.mul(g).apply(v);
    let x = gb.inverse().expect("projection onto a degenerate subspace").apply(&rhs);
    b.transpose().apply(&x)
}

/// Height as minus the norm of the part of P orthogonal to the trivial lattice.
pub fn height_by_projection(g: &QMatrix, tr: &QMatrix, p: &[Q]) -> Q {
    let pr = project(g, tr, p);
    let w: Vec<Q> = p.iter().zip(&pr).map(|(a, b)| a - b).collect();
    -g.form(&w, &w)
}

// ------------------------------------------------------------------ gluing

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// A_{n-1} + A_{n-1} + <-2n> plus a glue class -> A_{2n-1}
    Forward,
    /// A_{2n-1} -> a^(1), a^(2), v
    Backward,
}

#[derive(Clone, Debug, Serialize)]
pub struct GlueChain {
    pub n: usize,
    /// Rows b_1..b_{2n-1} in the basis a^(1)_1.., a^(2)_1.., v.
    pub b_in_a: QMatrix,
    /// Rows a^(1)_1.., a^(2)_1.., v in the basis b_1..b_{2n-1}.
    pub a_in_b: QMatrix,
    /// w^(1) + w^(2) + v/n in the a-basis.
    pub epsilon: Vec<Q>,
    pub epsilon_norm: Q,
    pub index: Z,
    pub det_small: Z,
    pub det_big: Z,
}

/// Gram of A_{n-1} + A_{n-1} + <-2n> with the chain sign convention (+1 between neighbours).
fn small_gram(n: usize) -> Lattice {
    atlas::a_n(n - 1).direct_sum(&atlas::a_n(n - 1)).direct_sum(&atlas::rank1(-2 * n as i64))
}

pub fn glue_chain(n: usize, direction: Direction) -> Result<GlueChain> {
    if !(2..=8).contains(&n) {
        return Err(LatticeError::Param(format!("glue_chain needs 2 <= n <= 8, got {n}")));
    }
    let m = 2 * n - 1;
    // a_in_b from the chain b: a^(1)_i = b_{2i-1} + b_{2i}, a^(2)_i = b_{2i} + b_{2i+1}, v = sum b_{2i-1}
    let mut a_in_b = QMatrix::zeros(m, m);
    for i in 0..n - 1 {
        a_in_b[(i, 2 * i)] = q(1);
        a_in_b[(i, 2 * i + 1)] = q(1);
        a_in_b[(n - 1 + i, 2 * i + 1)] = q(1);
        a_in_b[(n - 1 + i, 2 * i + 2)] = q(1);
    }
    for i in 0..n {
        a_in_b[(m - 1, 2 * i)] = q(1);
    }
    let b_in_a = a_in_b.inverse().ok_or_else(|| LatticeError::SelfCheck("gluing change of basis is singular".into()))?;
    let small = small_gram(n);
    let big = atlas::a_n(m);
    let sg = small.gram_q();
    let bg = big.gram_q();
    let mut epsilon = vec![Q::zero(); m];
    // the two copies meet the chain from opposite ends, so their weights run in opposite directions
    for i in 0..n - 1 {
        epsilon[i] = qf((n - 1 - i) as i64, n as i64);
        epsilon[n - 1 + i] = qf(i as i64 + 1, n as i64);
    }
    epsilon[m - 1] = qf(1, n as i64);
    let epsilon_norm = sg.form(&epsilon, &epsilon);
    let over = overlattice(&small, &[epsilon.clone()])?;
    let index = over.index.clone();
    let check = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(LatticeError::SelfCheck(format!("glue_chain({n}): {what}")))
        }
    };
    match direction {
        Direction::Forward => {
            // the b's lie in the overlattice and form a standard chain
            for i in 0..m {
                let nb = over.to_new(b_in_a.row(i));
                check(nb.iter().all(|x| x.is_integer()), "b_i outside the overlattice")?;
            }
            check(b_in_a.mul(&sg).mul(&b_in_a.transpose()) == bg, "b_i do not form an A chain")?;
        }
        Direction::Backward => {
            check(a_in_b.mul(&bg).mul(&a_in_b.transpose()) == sg, "a^(j), v do not have the expected Gram")?;
        }
    }
    check(epsilon_norm == q(-2), "glue class is not a root")?;
    check(index == Z::from(n as i64), "index is not n")?;
    check(over.lattice.det().abs() * Z::from((n * n) as i64) == small.det().abs(), "det identity")?;
    check(b_in_a.mul(&a_in_b) == QMatrix::identity(m), "round trip")?;
    Ok(GlueChain {
        n,
        b_in_a,
        a_in_b,
        epsilon,
        epsilon_norm,
        index,
        det_small: small.det(),
        det_big: big.det(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contributions() {
        assert_eq!(Fiber::I(4).contr(2).unwrap(), q(1));
        assert_eq!(Fiber::I(2).contr(1).unwrap(), qf(1, 2));
        assert_eq!(Fiber::III.contr(1).unwrap(), qf(1, 2));
        assert!(Fiber::I(2).contr(2).is_err());
    }

    #[test]
    fn parse_config() {
        let c = FibrationConfig::new("I4+7I2+6I1", &[2], 0, Some(12)).unwrap();
        assert_eq!(c.root_rank(), 10);
        assert_eq!(c.tr_det(), Z::from(4 * 128));
        assert!(FibrationConfig::new("9I2+6I1", &[2], 1, Some(11)).is_err());
    }
}
