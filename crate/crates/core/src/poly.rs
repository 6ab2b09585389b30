//! Dense univariate polynomials over Q, enough for square-free factorization.

use crate::arith::{fmt_q, parse_q, q, Q};
use crate::error::{LatticeError, Result};
use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Coefficients from the constant term up; never has a zero leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    c: Vec<Q>,
}

impl Poly {
    pub fn new(mut c: Vec<Q>) -> Poly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn from_i64(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn zero() -> Poly {
        Poly { c: vec![] }
    }

    pub fn constant(x: Q) -> Poly {
        Poly::new(vec![x])
    }

    /// t - r
    pub fn linear_root(r: &Q) -> Poly {
        Poly::new(vec![-r.clone(), Q::one()])
    }

    /// Parses "1, 0, -1/2" or "[1,0,-1/2]" (constant term first).
    pub fn parse(s: &str) -> Result<Poly> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']');
        if s.trim().is_empty() {
            return Ok(Poly::zero());
        }
        let c: Option<Vec<Q>> = s.split(',').map(parse_q).collect();
        c.map(Poly::new).ok_or_else(|| LatticeError::Parse(format!("bad coefficient list {s:?}")))
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> Q {
        self.c.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.c.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn scale(&self, s: &Q) -> Poly {
        Poly::new(self.c.iter().map(|x| x * s).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Q::one() / self.lead()))
    }

    pub fn eval(&self, t: &Q) -> Q {
        self.c.iter().rev().fold(Q::zero(), |acc, x| acc * t + x)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.c.iter().enumerate().skip(1).map(|(i, x)| x * q(i as i64)).collect())
    }

    /// p(-t)
    pub fn reflect(&self) -> Poly {
        Poly::new(self.c.iter().enumerate().map(|(i, x)| if i % 2 == 1 { -x } else { x.clone() }).collect())
    }

    /// p(t^2)
    pub fn in_square(&self) -> Poly {
        let mut c = vec![Q::zero(); 2 * self.c.len()];
        for (i, x) in self.c.iter().enumerate() {
            c[2 * i] = x.clone();
        }
        Poly::new(c)
    }

    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Q::zero(); k];
        c.extend(self.c.iter().cloned());
        Poly::new(c)
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::constant(Q::one()), |acc, _| &acc * self)
    }

    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut r = self.c.clone();
        let dd = d.c.len() - 1;
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quo = vec![Q::zero(); r.len() - dd];
        let inv = Q::one() / d.lead();
        for i in (0..quo.len()).rev() {
            let f = &r[i + dd] * &inv;
            if !f.is_zero() {
                for (j, x) in d.c.iter().enumerate() {
                    r[i + j] = &r[i + j] - &f * x;
                }
            }
            quo[i] = f;
        }
        r.truncate(dd);
        (Poly::new(quo), Poly::new(r))
    }

    /// Exact division; panics on a non-zero remainder.
    pub fn div_exact(&self, d: &Poly) -> Poly {
        let (qu, r) = self.div_rem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        qu
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's algorithm: monic square-free factors with their multiplicities.
    pub fn square_free(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.div_exact(&a0);
        let mut c = fp.div_exact(&a0);
        let mut d = &c - &b.derivative();
        let mut i = 1;
        loop {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_exact(&a);
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_exact(&a);
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.c.iter().map(|x| -x).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in o.c.iter().enumerate() {
                c[i + j] = &c[i + j] + x * y;
            }
        }
        Poly::new(c)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, x) in self.c.iter().enumerate().rev() {
            if x.is_zero() {
                continue;
            }
            let neg = x < &Q::zero();
            let a = if neg { -x } else { x.clone() };
            let sign = match (first, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            let coef = if a.is_one() && i > 0 { String::new() } else { fmt_q(&a) };
            let var = match i {
                0 => String::new(),
                1 => "t".into(),
                _ => format!("t^{i}"),
            };
            write!(f, "{sign}{coef}{var}")?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn yun_on_a_known_product() {
        // (t-1)^3 (t+2)^2 (t^2+1)
        let p = &(&Poly::from_i64(&[-1, 1]).pow(3) * &Poly::from_i64(&[2, 1]).pow(2)) * &Poly::from_i64(&[1, 0, 1]);
        let sf = p.square_free();
        assert_eq!(sf, vec![(Poly::from_i64(&[1, 0, 1]), 1), (Poly::from_i64(&[2, 1]), 2), (Poly::from_i64(&[-1, 1]), 3)]);
    }

    #[test]
    fn division_and_display() {
        let p = Poly::from_i64(&[-1, 0, 1]);
        let (qu, r) = p.div_rem(&Poly::from_i64(&[1, 1]));
        assert_eq!(qu, Poly::from_i64(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(format!("{}", Poly::parse("[1, -3/2, 0, 1]").unwrap()), "t^3 - 3/2t + 1");
    }
}
