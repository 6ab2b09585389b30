//! Named lattices with frozen basis orderings.
//!
//! Root lattices are negative definite: simple roots have norm -2 and
//! adjacent nodes pair to 1.
//!
//! | family         | basis                                                        |
//! |----------------|--------------------------------------------------------------|
//! | `U`            | u1, u2                                                       |
//! | `A_n`, `D_n`   | chain r1..; D_n attaches r_n to r_{n-2}                      |
//! | `E6`           | e1-e2-e3-e4-e5 with e6 on e3                                 |
//! | `E8`           | e1-...-e7 with e8 on e3                                      |
//! | `N`            | N_1..N_7, N_hat = (N_1+..+N_8)/2                             |
//! | `M`            | M1_1, M2_1, .., M1_5, M2_5, M_hat, M2_6                      |
//! | `LambdaK3`     | u1_1, u2_1, u1_2, u2_2, u1_3, u2_3, e1_1..e8_1, e1_2..e8_2    |
//! | `UN`, `UM`     | F, S followed by N or M (gram of F, S is [[0,1],[1,-2]])     |
//! | `T_X_std`      | t1..t12                                                      |
//! | `T_X3_std`     | v1, v2, u1, u2, a1, a2, b1, b2                               |
//! | `Lambda_d`     | F, S, N basis, w with w^2 = -2d                              |
//! | `Prime_2d_E82` | h, x1..x8 before gluing (<2d> + E8(2))                       |
//! | `Prime_2d_N`   | h, N basis before gluing                                     |

use crate::arith::{q, qf, Q};
use crate::error::{LatticeError, Result};
use crate::lattice::Lattice;
use crate::matrix::{QMatrix, ZMatrix};
use crate::overlattice::overlattice;
use num_traits::Zero;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NamedLatticeId {
    U,
    UScaled(i64),
    Rank1(i64),
    A(usize),
    D(usize),
    E6,
    E6Twice,
    E8,
    E8Twice,
    Nikulin,
    M,
    K12Tilde,
    K12,
    LambdaK3,
    LambdaD(i64),
    LambdaDA(i64),
    LambdaDB(i64),
    PrimeE82(i64),
    PrimeN(i64),
    UN,
    UM,
    TX,
    TX3,
}

impl fmt::Display for NamedLatticeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use NamedLatticeId::*;
        match self {
            U => write!(f, "U"),
            UScaled(n) => write!(f, "U({n})"),
            Rank1(n) => write!(f, "<{n}>"),
            A(n) => write!(f, "A{n}"),
            D(n) => write!(f, "D{n}"),
            E6 => write!(f, "E6"),
            E6Twice => write!(f, "E6(2)"),
            E8 => write!(f, "E8"),
            E8Twice => write!(f, "E8(2)"),
            Nikulin => write!(f, "N"),
            M => write!(f, "M"),
            K12Tilde => write!(f, "K12tilde"),
            K12 => write!(f, "K12"),
            LambdaK3 => write!(f, "LambdaK3"),
            LambdaD(d) => write!(f, "Lambda_{d}"),
            LambdaDA(d) => write!(f, "Lambda_{d}_a"),
            LambdaDB(d) => write!(f, "Lambda_{d}_b"),
            PrimeE82(d) => write!(f, "Prime_2d_E82:{d}"),
            PrimeN(d) => write!(f, "Prime_2d_N:{d}"),
            UN => write!(f, "UN"),
            UM => write!(f, "UM"),
            TX => write!(f, "T_X_std"),
            TX3 => write!(f, "T_X3_std"),
        }
    }
}

fn bad(s: &str) -> LatticeError {
    LatticeError::Parse(format!("unknown lattice name {s:?}"))
}

fn int(s: &str, whole: &str) -> Result<i64> {
    s.trim().parse().map_err(|_| bad(whole))
}

impl FromStr for NamedLatticeId {
    type Err = LatticeError;

    /// Accepts `family[:params]` as well as the sugar `A3`, `U(2)`, `<-4>`,
    /// `Lambda_6`, `Lambda_6_a`, `Lambda_8_b`.
    fn from_str(s: &str) -> Result<Self> {
        use NamedLatticeId::*;
        let t = s.trim();
        let (fam, par) = match t.split_once(':') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (t, None),
        };
        let p = || -> Result<i64> { int(par.ok_or_else(|| bad(s))?, s) };
        let id = match fam {
            "U" => match par {
                None => U,
                Some(n) => UScaled(int(n, s)?),
            },
            "<n>" | "rank1" => Rank1(p()?),
            "A_n" | "A" => A(p()? as usize),
            "D_n" | "D" => D(p()? as usize),
            "E6" => E6,
            "E6(2)" => E6Twice,
            "E8" => E8,
            "E8(2)" => E8Twice,
            "N" => Nikulin,
            "M" => M,
            "K12tilde" => K12Tilde,
            "K12" => K12,
            "LambdaK3" => LambdaK3,
            "Lambda_d" => LambdaD(p()?),
            "Lambda_d_a" => LambdaDA(p()?),
            "Lambda_d_b" => LambdaDB(p()?),
            "Prime_2d_E82" => PrimeE82(p()?),
            "Prime_2d_N" => PrimeN(p()?),
            "UN" => UN,
            "UM" => UM,
            "T_X_std" => TX,
            "T_X3_std" => TX3,
            _ if par.is_none() => return sugar(fam).ok_or_else(|| bad(s)),
            _ => return Err(bad(s)),
        };
        id.check()?;
        Ok(id)
    }
}

fn sugar(s: &str) -> Option<NamedLatticeId> {
    use NamedLatticeId::*;
    if let Some(inner) = s.strip_prefix("U(").and_then(|r| r.strip_suffix(')')) {
        return inner.parse().ok().map(UScaled);
    }
    if let Some(inner) = s.strip_prefix('<').and_then(|r| r.strip_suffix('>')) {
        return inner.parse().ok().map(Rank1);
    }
    if let Some(rest) = s.strip_prefix("Lambda_") {
        let parts: Vec<&str> = rest.split('_').collect();
        let d: i64 = parts[0].parse().ok()?;
        let id = match parts.get(1).copied() {
            None => LambdaD(d),
            Some("a") => LambdaDA(d),
            Some("b") => LambdaDB(d),
            _ => return None,
        };
        return id.check().ok().map(|_| id);
    }
    let (c, n) = s.split_at(1);
    let n: usize = n.parse().ok()?;
    match c {
        "A" => Some(A(n)),
        "D" => Some(D(n)),
        _ => None,
    }
}

impl NamedLatticeId {
    pub fn parse(s: &str) -> Result<Self> {
        s.parse()
    }

    /// Parameter constraints.
    pub fn check(&self) -> Result<()> {
        use NamedLatticeId::*;
        let err = |m: String| Err(LatticeError::Param(m));
        match *self {
            UScaled(n) | Rank1(n) if n == 0 => err("scale must be nonzero".into()),
            A(n) if n == 0 => err("A_n needs n >= 1".into()),
            D(n) if n < 4 => err("D_n needs n >= 4".into()),
            LambdaD(d) if d < 1 => err(format!("Lambda_d needs d >= 1, got {d}")),
            LambdaDA(d) if d < 1 || d % 4 != 2 => err(format!("Lambda_d_a needs d = 2 mod 4, got {d}")),
            LambdaDB(d) if d < 1 || d % 4 != 0 => err(format!("Lambda_d_b needs d = 0 mod 4, got {d}")),
            PrimeE82(d) | PrimeN(d) if d < 1 || d % 2 != 0 => {
                err(format!("the index 2 overlattice needs d even, got {d}"))
            }
            _ => Ok(()),
        }
    }
}

/// Glue data used by `make` for an overlattice family.
#[derive(Clone, Debug)]
pub struct GlueDescription {
    pub base: Lattice,
    pub glue: Vec<Vec<Q>>,
    /// Each glue vector written in the base labels.
    pub glue_text: Vec<String>,
    pub note: String,
}

pub fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn named(name: &str, g: ZMatrix, l: Vec<String>) -> Lattice {
    Lattice::new(name, g).expect("symmetric").with_labels(l)
}

fn chain_gram(n: usize, edges: &[(usize, usize)]) -> ZMatrix {
    let mut g = ZMatrix::zeros(n, n);
    for i in 0..n {
        g[(i, i)] = (-2).into();
    }
    for &(a, b) in edges {
        g[(a, b)] = 1.into();
        g[(b, a)] = 1.into();
    }
    g
}

pub fn u() -> Lattice {
    named("U", ZMatrix::from_i64(&[vec![0, 1], vec![1, 0]]), labels("u", 2))
}

pub fn rank1(n: i64) -> Lattice {
    named(&format!("<{n}>"), ZMatrix::from_i64(&[vec![n]]), vec!["w".into()])
}

pub fn a_n(n: usize) -> Lattice {
    let e: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    named(&format!("A{n}"), chain_gram(n, &e), labels("r", n))
}

pub fn d_n(n: usize) -> Lattice {
    let mut e: Vec<_> = (0..n - 2).map(|i| (i, i + 1)).collect();
    e.push((n - 3, n - 1));
    named(&format!("D{n}"), chain_gram(n, &e), labels("r", n))
}

pub fn e6() -> Lattice {
    named("E6", chain_gram(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (2, 5)]), labels("e", 6))
}

pub fn e8() -> Lattice {
    let e = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)];
    named("E8", chain_gram(8, &e), labels("e", 8))
}

pub fn nikulin() -> Lattice {
    let mut g = ZMatrix::zeros(8, 8);
    for i in 0..7 {
        g[(i, i)] = (-2).into();
        g[(i, 7)] = (-1).into();
        g[(7, i)] = (-1).into();
    }
    g[(7, 7)] = (-4).into();
    let mut l = labels("N_", 7);
    l.push("N_hat".into());
    named("N", g, l)
}

/// Coordinates of N_8 = 2 N_hat - (N_1+..+N_7) in the N basis.
pub fn nikulin_n8() -> Vec<Q> {
    let mut v = vec![q(-1); 8];
    v[7] = q(2);
    v
}

pub fn a2_sixfold() -> Lattice {
    let a2 = a_n(2);
    let parts: Vec<Lattice> = (0..6).map(|_| a2.clone()).collect();
    let mut l = Vec::new();
    for j in 1..=6 {
        l.push(format!("M1_{j}"));
        l.push(format!("M2_{j}"));
    }
    Lattice::sum_all(&parts).renamed("A2^6").with_labels(l)
}

/// M_hat = Σ (M1_j + 2 M2_j)/3 in A2^6 coordinates.
pub fn m_hat_glue() -> Vec<Q> {
    (0..12).map(|i| if i % 2 == 0 { qf(1, 3) } else { qf(2, 3) }).collect()
}

/// Basis rows of M in A2^6 coordinates: M1_6 is replaced by M_hat.
pub fn m_basis_in_a2() -> QMatrix {
    let mut rows = Vec::new();
    for i in 0..12 {
        if i == 10 {
            rows.push(m_hat_glue());
        } else {
            rows.push(crate::matrix::unit(12, i));
        }
    }
    QMatrix::from_rows(rows, 12)
}

pub fn lattice_m() -> Lattice {
    let base = a2_sixfold();
    let b = m_basis_in_a2();
    let g = base.gram_of(&b).to_z().expect("M_hat glue is integral");
    let mut l: Vec<String> = base.labels().unwrap().to_vec();
    l[10] = "M_hat".into();
    named("M", g, l)
}

pub fn k12_tilde() -> Lattice {
    let e = e6().gram().clone();
    let e2 = e.scale(&2.into());
    let top = e2.hstack(&e);
    let bottom = e.hstack(&e2);
    let mut l = labels("k", 6);
    l.extend(labels("k'", 6));
    named("K12tilde", top.vstack(&bottom), l)
}

pub fn lambda_k3() -> Lattice {
    let parts = [u(), u(), u(), e8(), e8()];
    let mut l = Vec::new();
    for j in 1..=3 {
        l.push(format!("u1_{j}"));
        l.push(format!("u2_{j}"));
    }
    for h in 1..=2 {
        for k in 1..=8 {
            l.push(format!("e{k}_{h}"));
        }
    }
    Lattice::sum_all(&parts).renamed("LambdaK3").with_labels(l)
}

pub fn fs_plane() -> Lattice {
    named("U", ZMatrix::from_i64(&[vec![0, 1], vec![1, -2]]), vec!["F".into(), "S".into()])
}

pub fn un() -> Lattice {
    fs_plane().direct_sum(&nikulin()).renamed("UN")
}

pub fn um() -> Lattice {
    fs_plane().direct_sum(&lattice_m()).renamed("UM")
}

pub fn t_x_std() -> Lattice {
    let mut g = ZMatrix::zeros(12, 12);
    for i in 0..7 {
        g[(i, i)] = (-2).into();
        g[(i, 7)] = (-1).into();
        g[(7, i)] = (-1).into();
    }
    g[(7, 7)] = (-4).into();
    for (a, b) in [(8, 9), (10, 11)] {
        g[(a, b)] = 1.into();
        g[(b, a)] = 1.into();
    }
    named("T_X", g, labels("t", 12))
}

pub fn t_x3_std() -> Lattice {
    let parts = [u(), u().scaled(3), a_n(2), a_n(2)];
    let l = ["v1", "v2", "u1", "u2", "a1", "a2", "b1", "b2"].map(String::from).to_vec();
    Lattice::sum_all(&parts).renamed("T_X3").with_labels(l)
}

fn lambda_d_base(d: i64) -> Lattice {
    un().direct_sum(&rank1(-2 * d)).renamed(format!("U+N+<{}>", -2 * d))
}

/// delta1 = (N1+N3+N5+N7)/2 and delta2 = (N2+N3+N5+N7)/2: a u(2) pair in A_N.
pub fn nikulin_delta(which: usize) -> Vec<Q> {
    let idx: &[usize] = if which == 1 { &[0, 2, 4, 6] } else { &[1, 2, 4, 6] };
    let mut v = vec![Q::zero(); 8];
    for &i in idx {
        v[i] = qf(1, 2);
    }
    v
}

fn lambda_glue(d: i64, with_delta2: bool) -> Vec<Q> {
    let mut v = vec![Q::zero(); 11];
    let d1 = nikulin_delta(1);
    let d2 = nikulin_delta(2);
    for i in 0..8 {
        v[2 + i] = if with_delta2 { &d1[i] + &d2[i] } else { d1[i].clone() };
    }
    // d * delta7 with delta7 = w/(2d)
    v[10] = qf(1, 2);
    let _ = d;
    v
}

/// epsilon of the glue (h + x1 + eps*x3)/2: 1 when d = 0 mod 4.
pub fn prime_e82_eps(d: i64) -> i64 {
    i64::from(d % 4 == 0)
}

fn e82_base(d: i64) -> Lattice {
    let mut l = vec!["h".to_string()];
    l.extend(labels("x", 8));
    rank1(2 * d).direct_sum(&e8().scaled(2)).renamed(format!("<{}>+E8(2)", 2 * d)).with_labels(l)
}

fn n_base(d: i64) -> Lattice {
    let mut l = vec!["h".to_string()];
    l.extend(nikulin().labels().unwrap().iter().cloned());
    rank1(2 * d).direct_sum(&nikulin()).renamed(format!("<{}>+N", 2 * d)).with_labels(l)
}

pub fn glue_description(id: &NamedLatticeId) -> Result<GlueDescription> {
    use NamedLatticeId::*;
    id.check()?;
    Ok(match *id {
        M => GlueDescription {
            base: a2_sixfold(),
            glue: vec![m_hat_glue()],
            glue_text: vec!["(M1_1+2M2_1+M1_2+2M2_2+M1_3+2M2_3+M1_4+2M2_4+M1_5+2M2_5+M1_6+2M2_6)/3".into()],
            note: "index 3 overlattice of A2^6; M_hat replaces M1_6 in the basis".into(),
        },
        LambdaDA(d) => GlueDescription {
            base: lambda_d_base(d),
            glue: vec![lambda_glue(d, true)],
            glue_text: vec!["delta1+delta2+d*delta7 = (N_1+N_2)/2+N_3+N_5+N_7+w/2".into()],
            note: "delta1=(N1+N3+N5+N7)/2, delta2=(N2+N3+N5+N7)/2, delta7=w/(2d); d = 2 mod 4".into(),
        },
        LambdaDB(d) => GlueDescription {
            base: lambda_d_base(d),
            glue: vec![lambda_glue(d, false)],
            glue_text: vec!["delta1+d*delta7 = (N_1+N_3+N_5+N_7)/2+w/2".into()],
            note: "delta1=(N1+N3+N5+N7)/2, delta7=w/(2d); d = 0 mod 4".into(),
        },
        PrimeE82(d) => {
            let eps = prime_e82_eps(d);
            let mut v = vec![Q::zero(); 9];
            v[0] = qf(1, 2);
            v[1] = qf(1, 2);
            v[3] = qf(eps, 2);
            let text = if eps == 1 { "(h+x1+x3)/2" } else { "(h+x1)/2" };
            GlueDescription {
                base: e82_base(d),
                glue: vec![v],
                glue_text: vec![text.into()],
                note: "x1, x3 taken in E8(2); the x3 term is present iff d = 0 mod 4".into(),
            }
        }
        PrimeN(d) => {
            let mut v = vec![qf(1, 2)];
            if d % 4 == 0 {
                v.extend(nikulin_delta(1));
            } else {
                let (a, b) = (nikulin_delta(1), nikulin_delta(2));
                v.extend((0..8).map(|i| &a[i] + &b[i]));
            }
            let text = if d % 4 == 0 { "h/2+delta1" } else { "h/2+delta1+delta2" };
            GlueDescription {
                base: n_base(d),
                glue: vec![v],
                glue_text: vec![text.into()],
                note: "q(h/2) = d/2 is matched by an isotropic (d = 0 mod 4) or norm 1 class of u(2)^3".into(),
            }
        }
        UN | UM | LambdaD(_) | U | UScaled(_) | Rank1(_) | A(_) | D(_) | E6 | E6Twice | E8
        | E8Twice | Nikulin | K12Tilde | LambdaK3 | TX | TX3 => GlueDescription {
            base: make(id)?,
            glue: vec![],
            glue_text: vec![],
            note: "direct sum, no glue".into(),
        },
        K12 => {
            return Err(LatticeError::Param(
                "K12 is computed as a saturated complement, not from glue".into(),
            ))
        }
    })
}

pub fn make(id: &NamedLatticeId) -> Result<Lattice> {
    use NamedLatticeId::*;
    id.check()?;
    let name = id.to_string();
    Ok(match *id {
        U => u(),
        UScaled(n) => u().scaled(n),
        Rank1(n) => rank1(n),
        A(n) => a_n(n),
        D(n) => d_n(n),
        E6 => e6(),
        E6Twice => e6().scaled(2),
        E8 => e8(),
        E8Twice => e8().scaled(2),
        Nikulin => nikulin(),
        M => lattice_m(),
        K12Tilde => k12_tilde(),
        K12 => crate::order3::k12()?,
        LambdaK3 => lambda_k3(),
        LambdaD(d) => lambda_d_base(d),
        UN => un(),
        UM => um(),
        TX => t_x_std(),
        TX3 => t_x3_std(),
        LambdaDA(_) | LambdaDB(_) | PrimeE82(_) | PrimeN(_) => {
            let g = glue_description(id)?;
            overlattice(&g.base, &g.glue)?.lattice
        }
    }
    .renamed(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::z;

    #[test]
    fn parse_round_trip() {
        for s in ["U", "U(2)", "<-4>", "A3", "D4", "E8(2)", "Lambda_6_a", "Lambda_8_b", "Lambda_3", "T_X_std"] {
            let id: NamedLatticeId = s.parse().unwrap();
            let again: NamedLatticeId = id.to_string().parse().unwrap();
            assert_eq!(id, again, "{s}");
        }
        assert_eq!("Lambda_d_a:6".parse::<NamedLatticeId>().unwrap(), NamedLatticeId::LambdaDA(6));
        assert!("Lambda_4_a".parse::<NamedLatticeId>().is_err());
        assert!("Prime_2d_N:3".parse::<NamedLatticeId>().is_err());
    }

    #[test]
    fn basic_determinants() {
        assert_eq!(e8().det(), z(1));
        assert_eq!(e6().det(), z(3));
        assert_eq!(nikulin().det(), z(64));
        assert_eq!(lattice_m().det(), z(81));
        assert_eq!(lambda_k3().det(), z(-1));
        assert_eq!(t_x_std().det(), z(64));
        assert_eq!(t_x3_std().det(), z(81));
    }
}
