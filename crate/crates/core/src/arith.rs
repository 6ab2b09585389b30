//! Scalar helpers over arbitrary precision integers and rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Z = BigInt;
pub type Q = BigRational;

pub fn z(n: i64) -> Z {
    Z::from(n)
}

pub fn q(n: i64) -> Q {
    Q::from_integer(Z::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(Z::from(n), Z::from(d))
}

pub fn zq(n: &Z) -> Q {
    Q::from_integer(n.clone())
}

/// Parses "p", "-p" or "p/q".
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let n: Z = a.trim().parse().ok()?;
        let d: Z = b.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Q::new(n, d))
    } else {
        Some(Q::from_integer(s.parse().ok()?))
    }
}

pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Least common multiple of the denominators.
pub fn common_denom<'a>(xs: impl IntoIterator<Item = &'a Q>) -> Z {
    xs.into_iter().fold(Z::one(), |acc, x| acc.lcm(x.denom()))
}

/// Representative of x modulo m in [0, m).
pub fn q_mod(x: &Q, m: &Q) -> Q {
    let k = (x / m).floor();
    x - m * k
}

pub fn z_mod(x: &Z, m: &Z) -> Z {
    x.mod_floor(m)
}

pub fn is_int(x: &Q) -> bool {
    x.is_integer()
}

pub fn to_i64(x: &Z) -> Option<i64> {
    i64::try_from(x).ok()
}

/// Inverse of a modulo m, when it exists.
pub fn inv_mod(a: &Z, m: &Z) -> Option<Z> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Prime factorization by trial division; inputs here are small.
pub fn factor(n: &Z) -> Vec<(Z, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = z(2);
    while &p * &p <= n {
        let mut e = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += 1;
    }
    if n > Z::one() {
        out.push((n, 1));
    }
    out
}

/// Largest k with p^k | n (n nonzero).
pub fn valuation(n: &Z, p: &Z) -> u32 {
    let mut n = n.clone();
    let mut k = 0;
    while !n.is_zero() && (&n % p).is_zero() {
        n /= p;
        k += 1;
    }
    k
}

pub fn pow(b: &Z, e: u32) -> Z {
    num_traits::pow(b.clone(), e as usize)
}

/// Exact floor of a rational.
pub fn floor_q(x: &Q) -> Z {
    x.floor().to_integer()
}

pub fn ceil_q(x: &Q) -> Z {
    x.ceil().to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("-3/6").unwrap(), qf(-1, 2));
        assert_eq!(fmt_q(&qf(4, 2)), "2");
        assert_eq!(fmt_q(&qf(-7, 3)), "-7/3");
        assert!(parse_q("1/0").is_none());
    }

    #[test]
    fn modular_helpers() {
        assert_eq!(q_mod(&qf(-1, 3), &q(2)), qf(5, 3));
        assert_eq!(inv_mod(&z(3), &z(8)), Some(z(3)));
        assert_eq!(inv_mod(&z(2), &z(8)), None);
        assert_eq!(factor(&z(73728)), vec![(z(2), 13), (z(3), 2)]);
        assert_eq!(valuation(&z(48), &z(2)), 4);
    }
}

/// Serde adapters writing integers and rationals as decimal strings ("-12", "3/4").
pub mod as_str {
    use super::{fmt_q, parse_q, Q, Z};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Z, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(x)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Z, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }

    pub mod vec_z {
        use super::*;
        pub fn serialize<S: Serializer>(xs: &[Z], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(xs.iter().map(|x| x.to_string()))
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Z>, D::Error> {
            Vec::<String>::deserialize(d)?.iter().map(|x| x.parse().map_err(D::Error::custom)).collect()
        }
    }

    pub mod vec_q {
        use super::*;
        pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(xs.iter().map(fmt_q))
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|x| parse_q(x).ok_or_else(|| D::Error::custom(format!("bad rational {x:?}"))))
                .collect()
        }
    }
}
