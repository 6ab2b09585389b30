//! Elliptic K3 surfaces y^2 = x(x^2 + a(t)x + b(t)) with a 2-torsion section (0,0),
//! deg a <= 4 and deg b <= 8 on the affine chart of P^1.
//!
//! The discriminant is 16 b^2 (a^2 - 4b). At a root of b the section (0,0) meets the
//! singular point of the fibre; at a root of a^2 - 4b it meets the smooth part.

use crate::arith::{q, qf, Q};
use crate::error::{LatticeError, Result};
use crate::poly::Poly;
use num_traits::Zero;
use serde::Serialize;
use std::collections::BTreeMap;

/// Which factor of the discriminant a fibre comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// root of b: the torsion section passes through the node
    B,
    /// root of a^2 - 4b
    Disc,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberSite {
    /// Monic square-free factor whose roots carry the fibre; "inf" at t = infinity.
    pub factor: String,
    #[serde(skip)]
    pub poly: Option<Poly>,
    pub roots: usize,
    pub side: Side,
    /// Vanishing order of the discriminant, i.e. n for a fibre I_n.
    pub order: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberPattern {
    /// n -> number of I_n fibres (n >= 1).
    pub counts: BTreeMap<usize, usize>,
    pub sites: Vec<FiberSite>,
    /// a and b have a common zero: the fibre there is additive (III or worse), not I_n.
    pub shared_root: bool,
}

impl FiberPattern {
    pub fn euler(&self) -> usize {
        self.counts.iter().map(|(n, c)| n * c).sum()
    }

    /// "I4+7I2+6I1"
    pub fn label(&self) -> String {
        let parts: Vec<String> = self
            .counts
            .iter()
            .rev()
            .map(|(n, c)| if *c == 1 { format!("I{n}") } else { format!("{c}I{n}") })
            .collect();
        parts.join("+")
    }
}

fn check_degrees(a: &Poly, b: &Poly) -> Result<()> {
    if a.degree().unwrap_or(0) > 4 || b.degree().unwrap_or(0) > 8 {
        return Err(LatticeError::Param(format!(
            "need deg a <= 4 and deg b <= 8, got {:?} and {:?}",
            a.degree(),
            b.degree()
        )));
    }
    Ok(())
}

/// (a, b) -> (-2a, a^2 - 4b): the isogenous surface obtained by dividing by (0,0).
pub fn quotient_weierstrass(a: &Poly, b: &Poly) -> Result<(Poly, Poly)> {
    check_degrees(a, b)?;
    Ok((a.scale(&q(-2)), &(a * a) - &b.scale(&q(4))))
}

/// Order at infinity of a section of O(k) given by p.
fn order_at_infinity(p: &Poly, k: usize) -> usize {
    k - p.degree().unwrap_or(0)
}

pub fn discriminant_multiplicities(a: &Poly, b: &Poly) -> Result<FiberPattern> {
    check_degrees(a, b)?;
    let disc = &(a * a) - &b.scale(&q(4));
    if b.is_zero() || disc.is_zero() {
        return Err(LatticeError::Param("discriminant vanishes identically".into()));
    }
    let delta = &(b * b) * &disc;
    let mut sites = Vec::new();
    for (g, k) in delta.square_free() {
        // split by the side the roots lie on
        let gb = g.gcd(b);
        let rest = g.div_exact(&gb);
        for (part, side) in [(gb, Side::B), (rest, Side::Disc)] {
            if part.degree().unwrap_or(0) > 0 {
                sites.push(FiberSite {
                    factor: part.to_string(),
                    roots: part.degree().unwrap(),
                    poly: Some(part),
                    side,
                    order: k,
                });
            }
        }
    }
    let ob = order_at_infinity(b, 8);
    let od = order_at_infinity(&disc, 8);
    let oinf = 2 * ob + od;
    if oinf > 0 {
        sites.push(FiberSite {
            factor: "inf".into(),
            poly: None,
            roots: 1,
            side: if ob > 0 { Side::B } else { Side::Disc },
            order: oinf,
        });
    }
    let mut counts = BTreeMap::new();
    for s in &sites {
        *counts.entry(s.order).or_insert(0) += s.roots;
    }
    let shared_root = a.gcd(b).degree().unwrap_or(0) > 0 || (a.degree().unwrap_or(0) < 4 && ob > 0) || a.is_zero();
    Ok(FiberPattern { counts, sites, shared_root })
}

/// Fibre exchange under the quotient: a B-site of order 2m becomes a Disc-site of order m at
/// the same points, and a Disc-site of order k becomes a B-site of order 2k.
pub fn fibers_exchange(x: &FiberPattern, y: &FiberPattern) -> bool {
    let key = |s: &FiberSite| (s.factor.clone(), s.side, s.order);
    let mut want: Vec<_> = x
        .sites
        .iter()
        .map(|s| match s.side {
            Side::B => (s.factor.clone(), Side::Disc, s.order / 2),
            Side::Disc => (s.factor.clone(), Side::B, 2 * s.order),
        })
        .collect();
    let mut got: Vec<_> = y.sites.iter().map(key).collect();
    want.sort();
    got.sort();
    x.sites.iter().all(|s| s.side == Side::Disc || s.order % 2 == 0) && want == got
}

/// a = 2 alpha(t^2), b = alpha(t^2)^2/2 + t beta(t^2): the quotient is the same surface with
/// t -> -t, and disc = (1/2) p(t)^2 p(-t) up to a constant with p = alpha(t^2)^2 + 2t beta(t^2).
pub fn cm_family(alpha: &Poly, beta: &Poly) -> Result<(Poly, Poly)> {
    if alpha.degree().unwrap_or(0) > 2 || beta.degree().unwrap_or(0) > 3 {
        return Err(LatticeError::Param("need deg alpha <= 2 and deg beta <= 3".into()));
    }
    let al = alpha.in_square();
    let a = al.scale(&q(2));
    let b = &(&al * &al).scale(&qf(1, 2)) + &beta.in_square().shift(1);
    Ok((a, b))
}

/// beta = b0 + b1 s + b2 s^2 + b3 s^3 with b0, b1 solved so that p has a double root at r != 0.
pub fn cm_double_root_beta(alpha: &Poly, b2: &Q, b3: &Q, r: &Q) -> Result<Poly> {
    if r.is_zero() {
        return Err(LatticeError::Param("the double root must be non-zero".into()));
    }
    let al = alpha.in_square();
    let a2 = &al * &al;
    let rest = Poly::new(vec![Q::zero(), Q::zero(), b2.clone(), b3.clone()]).in_square().shift(1).scale(&q(2));
    let base = &a2 + &rest;
    // p(r) = base(r) + 2 r b0 + 2 r^3 b1, p'(r) = base'(r) + 2 b0 + 6 r^2 b1
    let (c0, c1) = (base.eval(r), base.derivative().eval(r));
    let r2 = r * r;
    let det = q(12) * r * &r2 - q(4) * r * &r2;
    let b0 = (-&c0 * q(6) * &r2 + &c1 * q(2) * r * &r2) / &det;
    let b1 = (-&c1 * q(2) * r + &c0 * q(2)) / &det;
    let beta = Poly::new(vec![b0, b1, b2.clone(), b3.clone()]);
    let (_, b) = cm_family(alpha, &beta)?;
    let p = &b.scale(&q(2));
    debug_assert!(p.eval(r).is_zero() && p.derivative().eval(r).is_zero());
    Ok(beta)
}

/// (a2, b2) = (l^2 a, l^4 b): isomorphic via x -> l^2 x, y -> l^3 y.
pub fn is_rescaling(a: &Poly, b: &Poly, a2: &Poly, b2: &Poly, l: &Q) -> bool {
    let l2 = l * l;
    *a2 == a.scale(&l2) && *b2 == b.scale(&(&l2 * &l2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_twice_rescales() {
        let a = Poly::from_i64(&[1, 2, 0, -1, 3]);
        let b = Poly::from_i64(&[5, 0, 1, 1, -2, 0, 0, 1, 7]);
        let (a1, b1) = quotient_weierstrass(&a, &b).unwrap();
        let (a2, b2) = quotient_weierstrass(&a1, &b1).unwrap();
        assert!(is_rescaling(&a, &b, &a2, &b2, &q(2)));
    }

    #[test]
    fn low_degree_b_counts_infinity() {
        let a = Poly::from_i64(&[1, 0, 0, 0, 1]);
        let b = Poly::from_i64(&[2, 1, 0, 0, 0, 0, 3]);
        let f = discriminant_multiplicities(&a, &b).unwrap();
        assert_eq!(f.euler(), 24);
    }
}
