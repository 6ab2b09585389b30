//! Order 2: the embeddings of U+N and T_X into the K3 lattice, the involution,
//! the quotient maps and the lattices of the resolved quotient Y.
//!
//! Coordinates. Λ_K3 uses the atlas order (u1_j, u2_j for j = 1..3, then e1_1..e8_1,
//! e1_2..e8_2). The quotient base is U(2)^3 + E8 + <-2>^8 with labels
//! U1_j, U2_j, E1..E8, n1..n8; H²(Y) is its index 2^7 overlattice.

use crate::arith::{fmt_q, q, qf, Q, Z};
use crate::atlas::{self, lambda_k3};
use crate::error::{LatticeError, Result};
use crate::expr::Symbols;
use crate::lattice::{Lattice, LatticeMap};
use crate::matrix::{unit, vadd, vscale, vsub, QMatrix, ZMatrix};
use crate::overlattice::{overlattice, Overlattice};
use crate::sublattice::{orthogonal_complement, saturation, Sublattice};
use num_traits::{Signed, Zero};
use std::sync::{Arc, OnceLock};

pub const NS_LABELS: [&str; 10] = ["F", "S", "N_1", "N_2", "N_3", "N_4", "N_5", "N_6", "N_7", "N_hat"];

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(LatticeError::SelfCheck(what()))
    }
}

fn show(v: &[Q]) -> String {
    format!("({})", v.iter().map(fmt_q).collect::<Vec<_>>().join(","))
}

/// A Λ_K3 vector from its two E8 patterns and the (u1_3, u2_3) coefficients.
fn lam(c1: [i64; 8], c2: [i64; 8], u3: (i64, i64)) -> Vec<Q> {
    let mut v = vec![Q::zero(); 22];
    v[4] = q(u3.0);
    v[5] = q(u3.1);
    for k in 0..8 {
        v[6 + k] = q(c1[k]);
        v[14 + k] = q(c2[k]);
    }
    v
}

fn sym(p: [i64; 8], u3: (i64, i64)) -> Vec<Q> {
    lam(p, p, u3)
}

const F_PAT: [i64; 8] = [-4, -7, -10, -8, -6, -4, -2, -5];

/// Table of φ on F, S, N_1..N_7, N_hat.
fn phi_ns_rows() -> Vec<Vec<Q>> {
    let mut s = vec![Q::zero(); 22];
    s[14] = q(1);
    let n1 = lam([-2, -3, -4, -3, -2, -1, 0, -2], [-2, -4, -6, -5, -4, -3, -2, -3], (1, 1));
    let n2 = lam([-2, -3, -4, -3, -2, -1, -1, -2], [-2, -4, -6, -5, -4, -3, -1, -3], (1, 1));
    let n3 = lam([-2, -3, -4, -3, -2, -2, -1, -2], [-2, -4, -6, -5, -4, -2, -1, -3], (1, 1));
    let n4 = lam([-2, -3, -4, -3, -3, -2, -1, -2], [-2, -4, -6, -5, -3, -2, -1, -3], (1, 1));
    let n5 = lam([-2, -3, -4, -4, -3, -2, -1, -2], [-2, -4, -6, -4, -3, -2, -1, -3], (1, 1));
    let n6 = lam([-2, -3, -5, -4, -3, -2, -1, -2], [-2, -4, -5, -4, -3, -2, -1, -3], (1, 1));
    let n7 = lam([-2, -3, -5, -4, -3, -2, -1, -3], [-2, -4, -5, -4, -3, -2, -1, -2], (1, 1));
    let nh = lam([-9, -14, -20, -16, -12, -8, -4, -10], [-7, -14, -20, -16, -12, -8, -4, -10], (4, 4));
    vec![sym(F_PAT, (2, 2)), s, n1, n2, n3, n4, n5, n6, n7, nh]
}

/// φ_T on t1..t12.
fn phi_t_rows() -> Vec<Vec<Q>> {
    let pats: [[i64; 8]; 7] = [
        [2, 4, 6, 5, 4, 3, 2, 3],
        [2, 4, 6, 5, 4, 3, 1, 3],
        [2, 4, 6, 5, 4, 2, 1, 3],
        [2, 4, 6, 5, 3, 2, 1, 3],
        [2, 4, 6, 4, 3, 2, 1, 3],
        [2, 4, 5, 4, 3, 2, 1, 3],
        [2, 4, 5, 4, 3, 2, 1, 2],
    ];
    let mut rows: Vec<Vec<Q>> = pats.iter().map(|p| sym(*p, (-1, -1))).collect();
    rows.push(sym([7, 14, 20, 16, 12, 8, 4, 10], (-3, -4)));
    for i in 0..4 {
        rows.push(unit(22, i));
    }
    rows
}

/// The six classes completing NS+T to H²(X,Z), written in (F,S,N,t) names.
pub const H2X_GLUE: [&str; 6] = [
    "(N_1+N_2+t1+t2)/2",
    "(N_2+N_7+t2+t7)/2",
    "(N_3+N_4+t3+t4)/2",
    "(N_1+N_2+N_4+N_7+t1+t2+t4+t7)/2",
    "(N_5+N_6+t5+t6)/2",
    "(N_6+N_8+2t8-t1-t2-t3-t4-t5-t7)/2",
];

/// Symbols over the 22-dim (F,S,N_1..N_7,N_hat,t1..t12) coordinates.
fn ns_t_symbols() -> Symbols {
    let mut l: Vec<String> = NS_LABELS.iter().map(|s| s.to_string()).collect();
    l.extend(atlas::labels("t", 12));
    let mut s = Symbols::from_labels(&l);
    s.define("N_8", "2N_hat-N_1-N_2-N_3-N_4-N_5-N_6-N_7").unwrap();
    s
}

#[derive(Clone, Debug)]
pub struct K3Frame {
    pub lambda: Arc<Lattice>,
    pub phi_ns: Sublattice,
    pub phi_t: Sublattice,
    /// Glue classes in NS+T coordinates (22 entries).
    pub h2x_glue: Vec<Vec<Q>>,
    /// H²(X,Z) rebuilt as the overlattice of (U+N)+T_X.
    pub h2x: Overlattice,
    /// Names F, S, N_1..N_8, N_hat, t1..t12 and the Λ labels, valued in Λ coordinates.
    pub syms: Symbols,
}

impl K3Frame {
    pub fn build() -> Result<K3Frame> {
        let lambda = Arc::new(lambda_k3());
        let phi_ns = Sublattice::from_rows(lambda.clone(), phi_ns_rows())?;
        let phi_t = Sublattice::from_rows(lambda.clone(), phi_t_rows())?;
        let un = atlas::un();
        let tx = atlas::t_x_std();
        check(phi_ns.gram() == un.gram_q(), || "φ(U+N) does not reproduce the U+N gram".into())?;
        check(phi_t.gram() == tx.gram_q(), || "φ_T does not reproduce the T_X gram".into())?;
        let cross = phi_ns.coords.mul(&lambda.gram_q()).mul(&phi_t.coords.transpose());
        check(cross.is_zero(), || "φ(U+N) and φ_T are not orthogonal".into())?;

        let nt = ns_t_symbols();
        let glue: Vec<Vec<Q>> = H2X_GLUE.iter().map(|e| nt.eval(e)).collect::<Result<_>>()?;
        let both = phi_ns.coords.vstack(&phi_t.coords);
        for (g, e) in glue.iter().zip(H2X_GLUE) {
            let img = both.left_apply(g);
            check(img.iter().all(|x| x.is_integer()), || format!("glue {e} is not integral in Λ"))?;
        }
        let h2x = overlattice(&un.direct_sum(&tx), &glue)?;
        let l = &h2x.lattice;
        check(l.det() == Z::from(-1) && l.is_even() && l.signature() == Some((3, 19)), || {
            format!("assembled H²(X) has det {} signature {:?}", l.det(), l.signature())
        })?;

        let mut syms = Symbols::from_labels(lambda.labels().unwrap());
        for (i, name) in NS_LABELS.iter().enumerate() {
            syms.insert(name, phi_ns.coords.row(i).to_vec());
        }
        for i in 0..12 {
            syms.insert(&format!("t{}", i + 1), phi_t.coords.row(i).to_vec());
        }
        syms.define("N_8", "2N_hat-N_1-N_2-N_3-N_4-N_5-N_6-N_7")?;
        Ok(K3Frame { lambda, phi_ns, phi_t, h2x_glue: glue, h2x, syms })
    }

    /// Λ coordinates of a class given in t coordinates.
    pub fn t_to_lambda(&self, v: &[Q]) -> Vec<Q> {
        self.phi_t.coords.left_apply(v)
    }

    pub fn ns_to_lambda(&self, v: &[Q]) -> Vec<Q> {
        self.phi_ns.coords.left_apply(v)
    }

    pub fn eval(&self, e: &str) -> Result<Vec<Q>> {
        self.syms.eval(e)
    }

    pub fn pair(&self, a: &[Q], b: &[Q]) -> Q {
        self.lambda.pair(a, b)
    }
}

pub fn frame() -> &'static K3Frame {
    static F: OnceLock<K3Frame> = OnceLock::new();
    F.get_or_init(|| K3Frame::build().expect("K3 frame self-check"))
}

/// Symbols naming t1..t12 in t coordinates.
pub fn t_symbols() -> Symbols {
    Symbols::from_labels(&atlas::labels("t", 12))
}

/// σ*: swaps the two copies of E8 and fixes u.
pub fn sigma_star() -> LatticeMap {
    let images: Vec<Vec<Q>> = (0..22)
        .map(|i| match i {
            0..=5 => unit(22, i),
            6..=13 => unit(22, i + 8),
            _ => unit(22, i - 8),
        })
        .collect();
    LatticeMap::from_images(&images, 22)
}

/// σ* on U+N in the (F,S,N_1..N_7,N_hat) basis: F ↦ F, S ↦ 2F+S-N_hat, N_i ↦ F-N_i.
pub fn sigma_ns() -> LatticeMap {
    let mut images = Vec::new();
    images.push(unit(10, 0));
    let mut t = vec![q(2), q(1)];
    t.extend(vec![Q::zero(); 7]);
    t.push(q(-1));
    images.push(t);
    for i in 0..7 {
        let mut v = unit(10, 0);
        v[2 + i] = q(-1);
        images.push(v);
    }
    // N_hat = (N_1+..+N_8)/2 goes to 4F - N_hat
    let mut v = vec![Q::zero(); 10];
    v[0] = q(4);
    v[9] = q(-1);
    images.push(v);
    LatticeMap::from_images(&images, 10)
}

/// The eight anti-invariant classes of U+N in E8 diagram order (chain e1..e7, e8 on e3).
pub const E82_DIAGRAM: [&str; 8] =
    ["2F-N_hat", "-F+N_6+N_7", "N_5-N_6", "N_4-N_5", "N_3-N_4", "N_2-N_3", "N_1-N_2", "N_6-N_7"];

pub fn sigma_eigenlattices() -> (Sublattice, Sublattice) {
    let f = frame();
    let s = sigma_star().matrix;
    let id = QMatrix::identity(22);
    let plus = s.sub(&id).kernel();
    let minus = s.add(&id).kernel();
    let inv = saturation(&Sublattice::new(f.lambda.clone(), plus).unwrap()).sub;
    let anti = saturation(&Sublattice::new(f.lambda.clone(), minus).unwrap()).sub;
    (inv, anti)
}

// ---------------------------------------------------------------- quotient side

pub fn y_base() -> Lattice {
    let mut parts: Vec<Lattice> = (0..3).map(|_| atlas::u().scaled(2)).collect();
    parts.push(atlas::e8());
    parts.extend((0..8).map(|_| atlas::rank1(-2)));
    let mut l = Vec::new();
    for j in 1..=3 {
        l.push(format!("U1_{j}"));
        l.push(format!("U2_{j}"));
    }
    l.extend(atlas::labels("E", 8));
    l.extend(atlas::labels("n", 8));
    Lattice::sum_all(&parts).renamed("U(2)^3+E8+<-2>^8").with_labels(l)
}

/// π_*: (u, x, y) ↦ (u, x+y, 0).
pub fn pi_star(v: &[Q]) -> Vec<Q> {
    let mut w = vec![Q::zero(); 22];
    for i in 0..6 {
        w[i] = v[i].clone();
    }
    for k in 0..8 {
        w[6 + k] = &v[6 + k] + &v[14 + k];
    }
    w
}

/// π^*: (u, x, n) ↦ (2u, x, x); exceptional classes have no image in Λ.
pub fn pi_upper_star(w: &[Q]) -> Vec<Q> {
    let mut v = vec![Q::zero(); 22];
    for i in 0..6 {
        v[i] = &w[i] * q(2);
    }
    for k in 0..8 {
        v[6 + k] = w[6 + k].clone();
        v[14 + k] = w[6 + k].clone();
    }
    v
}

/// Λ + <-1>^8: the blow-up of X at the eight fixed points.
pub fn x_tilde() -> Lattice {
    let parts: Vec<Lattice> = std::iter::once(lambda_k3()).chain((0..8).map(|_| atlas::rank1(-1))).collect();
    Lattice::sum_all(&parts).renamed("LambdaK3+<-1>^8")
}

/// π_* on the blow-up: (u, x, y, z) ↦ (u, x+y, z).
pub fn pi_star_tilde(v: &[Q]) -> Vec<Q> {
    let mut w = pi_star(&v[..22]);
    for i in 0..8 {
        w[14 + i] = v[22 + i].clone();
    }
    w
}

/// π^* on the blow-up: (u, x, n) ↦ (2u, x, x, 2n).
pub fn pi_upper_star_tilde(w: &[Q]) -> Vec<Q> {
    let mut v = pi_upper_star(w);
    v.extend((0..8).map(|i| &w[14 + i] * q(2)));
    v
}

pub fn pi_star_map() -> LatticeMap {
    LatticeMap::from_images(&(0..22).map(|i| pi_star(&unit(22, i))).collect::<Vec<_>>(), 22)
}

pub fn pi_upper_star_map() -> LatticeMap {
    LatticeMap::from_images(&(0..22).map(|i| pi_upper_star(&unit(22, i))).collect::<Vec<_>>(), 22)
}

/// The seven classes completing the base to H²(Y,Z).
pub const H2Y_GLUE: [&str; 7] = [
    "(n1+n2+n3+n4+n5+n6+n7+n8)/2",
    "(tau11+n1+n2+n3+n4)/2",
    "(tau12+n1+n2+n3+n5)/2",
    "(tau9+n1+n2+n6+n7)/2",
    "(tau10+n1+n2+n6+n8)/2",
    "(tau1+n1+n2)/2",
    "(tau8+n2+n3+n7+n8)/2",
];

/// The intersection matrix of τ1..τ8.
pub fn matrix_m() -> ZMatrix {
    let mut rows = vec![vec![-4, -2, 0, 0, 0, 0, 0, -2], vec![-2, -2, -1, 0, 0, 0, 0, -2]];
    for i in 2..7 {
        let mut r = vec![0i64; 8];
        r[i - 1] = -1;
        r[i] = -2;
        if i + 1 < 7 {
            r[i + 1] = -1;
        }
        r[7] = -2;
        rows.push(r);
    }
    rows.push(vec![-2, -2, -2, -2, -2, -2, -2, -8]);
    ZMatrix::from_i64(&rows)
}

#[derive(Clone, Debug)]
pub struct QuotientFrame {
    pub base: Arc<Lattice>,
    pub h2y: Overlattice,
    pub h2y_lattice: Arc<Lattice>,
    /// τ1..τ12 in base coordinates.
    pub tau: Vec<Vec<Q>>,
    pub f_y: Vec<Q>,
    pub s_y: Vec<Q>,
    pub glue: Vec<Vec<Q>>,
    /// Names U.., E.., n.., tau1..tau12, F_Y, S_Y in base coordinates.
    pub syms: Symbols,
}

impl QuotientFrame {
    pub fn build(x: &K3Frame) -> Result<QuotientFrame> {
        let base = Arc::new(y_base());
        let pt: Vec<Vec<Q>> = (0..12).map(|i| pi_star(x.phi_t.coords.row(i))).collect();
        let mut tau = vec![pt[0].clone()];
        for i in 1..7 {
            tau.push(vscale(&vadd(&pt[i - 1], &pt[i]), &qf(1, 2)));
        }
        tau.extend(pt[7..].iter().cloned());
        let mut syms = Symbols::from_labels(base.labels().unwrap());
        for (i, t) in tau.iter().enumerate() {
            check(t.iter().all(|c| c.is_integer()), || format!("tau{} is not integral", i + 1))?;
            syms.insert(&format!("tau{}", i + 1), t.clone());
        }
        let f_y = vscale(&pi_star(x.phi_ns.coords.row(0)), &qf(1, 2));
        let s_y = pi_star(x.phi_ns.coords.row(1));
        check(f_y.iter().all(|c| c.is_integer()), || "F_Y = π_*(F)/2 is not integral".into())?;
        syms.insert("F_Y", f_y.clone());
        syms.insert("S_Y", s_y.clone());
        let glue: Vec<Vec<Q>> = H2Y_GLUE.iter().map(|e| syms.eval(e)).collect::<Result<_>>()?;
        let h2y = overlattice(&base, &glue)?;
        let l = &h2y.lattice;
        check(l.det() == Z::from(-1) && l.is_even() && l.signature() == Some((3, 19)), || {
            format!("assembled H²(Y) has det {} signature {:?}", l.det(), l.signature())
        })?;
        let h2y_lattice = Arc::new(l.clone().renamed("H2(Y)"));
        let qf = QuotientFrame { base, h2y, h2y_lattice, tau, f_y, s_y, glue, syms };
        check(qf.tau_gram().select_rows(&(0..8).collect::<Vec<_>>()).select_cols(&(0..8).collect::<Vec<_>>())
            == matrix_m().to_q(), || "τ1..τ8 do not reproduce the matrix M".into())?;
        Ok(qf)
    }

    pub fn tau_gram(&self) -> QMatrix {
        self.base.gram_of(&QMatrix::from_rows(self.tau.clone(), 22))
    }

    /// Coordinates in the H²(Y) basis of a base-coordinate vector.
    pub fn to_h2y(&self, v: &[Q]) -> Vec<Q> {
        self.h2y.to_new(v)
    }

    pub fn from_h2y(&self, v: &[Q]) -> Vec<Q> {
        self.h2y.to_old(v)
    }

    pub fn in_h2y(&self, v: &[Q]) -> bool {
        self.to_h2y(v).iter().all(|x| x.is_integer())
    }

    pub fn n(&self, i: usize) -> Vec<Q> {
        unit(22, 14 + i)
    }

    /// π_* of a Λ vector, in H²(Y) coordinates.
    pub fn push(&self, v: &[Q]) -> Vec<Q> {
        self.to_h2y(&pi_star(v))
    }
}

pub fn quotient_frame() -> &'static QuotientFrame {
    static F: OnceLock<QuotientFrame> = OnceLock::new();
    F.get_or_init(|| QuotientFrame::build(frame()).expect("quotient frame self-check"))
}

fn sub_lattice(s: &Sublattice, name: &str) -> Result<Lattice> {
    let g = s.gram().to_z().ok_or_else(|| LatticeError::NotIntegral(name.into()))?;
    Lattice::new(name, g)
}

/// T_Y for a sublattice of T_X given in t coordinates.
#[derive(Clone, Debug)]
pub struct QuotientTranscendental {
    /// Saturation of π_*(T_sub) in H²(Y) coordinates.
    pub sub: Sublattice,
    pub lattice: Lattice,
    /// [sat : π_*(T_sub)]
    pub index: Q,
    /// Gram on the τ basis, when T_sub is all of T_X and the τ's span T_Y.
    pub tau_gram: Option<QMatrix>,
}

pub fn compute_quotient_transcendental(t_sub: &[Vec<Q>]) -> Result<QuotientTranscendental> {
    let x = frame();
    let y = quotient_frame();
    let rows: Vec<Vec<Q>> = t_sub.iter().map(|v| x.t_to_lambda(v)).collect();
    let s = Sublattice::from_rows(x.lambda.clone(), rows.clone())?;
    if s.generators() > 0 {
        check(crate::sublattice::is_primitive(&s.basis()), || "T_sub is not primitive in H²(X)".into())
            .map_err(|_| LatticeError::NotPrimitive("T_sub in H²(X,Z)".into()))?;
    }
    let pushed: Vec<Vec<Q>> = rows.iter().map(|v| y.push(v)).collect();
    let ps = Sublattice::from_rows(y.h2y_lattice.clone(), pushed)?;
    let sat = saturation(&ps.basis());
    let lattice = sub_lattice(&sat.sub, "T_Y")?;
    let tau_gram = (t_sub.len() == 12 && QMatrix::from_rows(t_sub.to_vec(), 12).rank() == 12)
        .then(|| {
            let taus: Vec<Vec<Q>> = y.tau.iter().map(|t| y.to_h2y(t)).collect();
            let ts = Sublattice::from_rows(y.h2y_lattice.clone(), taus).unwrap();
            let same = ts.gram().det().abs() == sat.sub.gram().det().abs()
                && (0..12).all(|i| sat.sub.contains(ts.coords.row(i)));
            same.then(|| y.tau_gram())
        })
        .flatten();
    Ok(QuotientTranscendental { sub: sat.sub, lattice, index: sat.index, tau_gram })
}

/// NS and T of X and of the quotient Y for a given algebraic part.
#[derive(Clone, Debug)]
pub struct QuotientNs {
    pub ns_x: Lattice,
    pub t_x: Lattice,
    pub ns_y: Lattice,
    pub t_y: Lattice,
    /// Saturated NS(X) in Λ coordinates.
    pub ns_x_sub: Sublattice,
    pub t_x_sub: Sublattice,
    /// In H²(Y) coordinates.
    pub ns_y_sub: Sublattice,
    pub t_y_sub: Sublattice,
    /// [NS(X) : generators].
    pub ns_x_index: Q,
    /// sat(π_*NS(X) + n_i) equals (sat π_*T_X)^⊥.
    pub routes_agree: bool,
}

fn same_primitive(a: &Sublattice, b: &Sublattice) -> bool {
    a.rank() == b.rank() && a.coords.vstack(&b.coords).rank() == a.rank()
}

/// Generators of NS(X) given in Λ coordinates.
pub fn quotient_ns_lambda(gens: &[Vec<Q>]) -> Result<QuotientNs> {
    let x = frame();
    let y = quotient_frame();
    let gs = Sublattice::from_rows(x.lambda.clone(), gens.to_vec())?;
    let sat = saturation(&gs.basis());
    let ns_x_sub = sat.sub;
    let t_x_sub = orthogonal_complement(&ns_x_sub);
    let pushed: Vec<Vec<Q>> = (0..t_x_sub.generators()).map(|i| y.push(t_x_sub.coords.row(i))).collect();
    let t_y_sub = saturation(&Sublattice::from_rows(y.h2y_lattice.clone(), pushed)?.basis()).sub;
    let ns_y_sub = orthogonal_complement(&t_y_sub);

    let mut direct: Vec<Vec<Q>> = (0..ns_x_sub.generators()).map(|i| y.push(ns_x_sub.coords.row(i))).collect();
    direct.extend((0..8).map(|i| y.to_h2y(&y.n(i))));
    let direct = saturation(&Sublattice::from_rows(y.h2y_lattice.clone(), direct)?.basis()).sub;
    let routes_agree = same_primitive(&direct, &ns_y_sub);
    Ok(QuotientNs {
        ns_x: sub_lattice(&ns_x_sub, "NS(X)")?,
        t_x: sub_lattice(&t_x_sub, "T(X)")?,
        ns_y: sub_lattice(&ns_y_sub, "NS(Y)")?,
        t_y: sub_lattice(&t_y_sub, "T(Y)")?,
        ns_x_index: sat.index,
        ns_x_sub,
        t_x_sub,
        ns_y_sub,
        t_y_sub,
        routes_agree,
    })
}

/// NS(X) = sat(φ(U+N) + extras), extras in t coordinates and negative definite.
pub fn quotient_ns(extras: &[Vec<Q>]) -> Result<QuotientNs> {
    let x = frame();
    if !extras.is_empty() {
        let g = atlas::t_x_std().gram_of(&QMatrix::from_rows(extras.to_vec(), 12));
        let l = Lattice::new("extras", g.to_z().ok_or_else(|| LatticeError::NotIntegral("extras".into()))?)?;
        if l.definiteness() != Some(-1) {
            return Err(LatticeError::Indefinite);
        }
    }
    let mut gens = x.phi_ns.coords.to_rows();
    gens.extend(extras.iter().map(|v| x.t_to_lambda(v)));
    quotient_ns_lambda(&gens)
}

// ------------------------------------------------------------ Picard 10, 11, 12

/// Generators of NS(X) for the rank 10 family with X ≅ Y: h (h² = 4d), the anti-invariant
/// classes e_k^(1) - e_k^(2), and D = -u1_2 + d u2_2.
pub fn rank10_generators(d: i64) -> Vec<Vec<Q>> {
    let eps = i64::from(d % 2 == 0);
    let mut h = vec![Q::zero(); 22];
    h[0] = q(2);
    h[1] = q(d + 1 + eps);
    h[6] = q(1);
    h[14] = q(1);
    h[8] = q(eps);
    h[16] = q(eps);
    let mut rows = vec![h];
    for k in 0..8 {
        let mut v = vec![Q::zero(); 22];
        v[6 + k] = q(1);
        v[14 + k] = q(-1);
        rows.push(v);
    }
    let mut dd = vec![Q::zero(); 22];
    dd[2] = q(-1);
    dd[3] = q(d);
    rows.push(dd);
    rows
}

/// (<4d> + E8(2))' + <-2d>
pub fn rank10_target(d: i64) -> Result<Lattice> {
    let a = atlas::make(&atlas::NamedLatticeId::PrimeE82(2 * d))?;
    Ok(a.direct_sum(&atlas::rank1(-2 * d)).renamed(format!("(<{}>+E8(2))'+<{}>", 4 * d, -2 * d)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Family {
    /// Λ_d
    L,
    /// Λ_d^(a), d = 2 mod 4
    A,
    /// Λ_d^(b), d = 0 mod 4
    B,
}

impl Family {
    pub fn admits(self, d: i64) -> bool {
        match self {
            Family::L => d >= 1,
            Family::A => d % 4 == 2,
            Family::B => d % 4 == 0 && d > 0,
        }
    }

    pub fn id(self, d: i64) -> atlas::NamedLatticeId {
        use atlas::NamedLatticeId::*;
        match self {
            Family::L => LambdaD(d),
            Family::A => LambdaDA(d),
            Family::B => LambdaDB(d),
        }
    }

    /// The family of the quotient.
    pub fn quotient(self, d: i64) -> (Family, i64) {
        match self {
            Family::L if d % 2 == 1 => (Family::A, 2 * d),
            Family::L => (Family::B, 2 * d),
            Family::A | Family::B => (Family::L, d / 2),
        }
    }
}

/// The extra class V (t coordinates) of the rank 11 families.
pub fn rank11_extra(fam: Family, d: i64) -> Result<Vec<Q>> {
    if !fam.admits(d) {
        return Err(LatticeError::Param(format!("{fam:?} does not admit d = {d}")));
    }
    let s = t_symbols();
    let e = match fam {
        Family::L => format!("t11-{d}t12"),
        Family::A => format!("t1+t2+2t11-{}t12", 2 * ((d - 2) / 4)),
        Family::B => format!("t1+t2+t3+t4+2t11-{}t12", 2 * ((d - 4) / 4)),
    };
    s.eval(&e)
}

/// Extras of the rank 12 family with d = 2e: the rank 11 class of Λ_d^(a or b) and W = t9 - e t10.
pub fn rank12_extras(e: i64) -> Result<Vec<Vec<Q>>> {
    let d = 2 * e;
    let fam = if e % 2 == 1 { Family::A } else { Family::B };
    let w = t_symbols().eval(&format!("t9-{e}t10"))?;
    Ok(vec![rank11_extra(fam, d)?, w])
}

// ------------------------------------------------------------------ Γ and γ

/// V_i and W_i of the five specializations, in t coordinates.
pub const THETA: [(&str, &str); 5] = [
    ("-t1-t2-t3-t4-t5-t6-t7+2t8-t9", "-2t1-2t3-2t4-t5-t6+2t8-2t9-2t10"),
    ("t5", "t1+t2+t3+t4+t5+t6-2t8+2t10"),
    ("t11-t12", "t1-t3"),
    ("-t6+t7-t9-t11-t12", "t2+t4"),
    ("t6+t7-t9", "t1+t2+t3-t4"),
];

/// Nikulin pairs (a, b) glued with W_i into an I4 fibre, steps 1..4.
pub const I4_PAIRS: [(usize, usize); 4] = [(5, 6), (7, 8), (1, 3), (2, 4)];

/// The generators of T_{X20} listed with the last step.
pub const T_X20_LISTED: [&str; 3] =
    ["3t1+t2+3t3+3t4+2t5+2t6-4t7+4t8+4t9", "t6", "-t7+t9+2t11+2t12"];

/// Witness ψ⁻¹: rows are the images of the <8>+<4> basis in the T_Y20 basis returned
/// by saturation. Pinned after the first computation; re-validated on every build.
pub const PSI20_WITNESS: [[i64; 2]; 2] = [[1, 0], [2, 1]];

#[derive(Clone, Debug)]
pub struct GammaFrame {
    pub v: Vec<Vec<Q>>,
    pub w: Vec<Vec<Q>>,
    /// p1, p2 with gram diag(8, 4).
    pub positive: Vec<Vec<Q>>,
    /// Basis rows in t coordinates: -W1, V1, ..., -W5, V5, p1, p2.
    pub basis: QMatrix,
    pub gram: QMatrix,
}

impl GammaFrame {
    pub fn build() -> Result<GammaFrame> {
        let s = t_symbols();
        let tx = atlas::t_x_std();
        let mut v = Vec::new();
        let mut w = Vec::new();
        for (ve, we) in THETA {
            v.push(s.eval(ve)?);
            w.push(s.eval(we)?);
        }
        let norms_v = [-2, -2, -2, -2, -4];
        let norms_w = [-4, -4, -4, -4, -8];
        let mut all = Vec::new();
        for i in 0..5 {
            check(tx.norm(&v[i]) == q(norms_v[i]), || format!("V{} has norm {}", i + 1, tx.norm(&v[i])))?;
            check(tx.norm(&w[i]) == q(norms_w[i]), || format!("W{} has norm {}", i + 1, tx.norm(&w[i])))?;
            all.push(v[i].clone());
            all.push(w[i].clone());
        }
        for i in 0..10 {
            for j in 0..i {
                check(tx.pair(&all[i], &all[j]).is_zero(), || "Θ classes are not orthogonal".into())?;
            }
        }
        let txa = Arc::new(tx.clone());
        let comp = orthogonal_complement(&Sublattice::from_rows(txa, all)?);
        check(comp.rank() == 2, || "complement of Θ20 is not of rank 2".into())?;
        let cl = sub_lattice(&comp, "T_X20")?;
        let target = Lattice::from_i64("<8>+<4>", &[vec![8, 0], vec![0, 4]])?;
        let wit = match crate::enumerate::definite_isometric(&target, &cl)? {
            crate::enumerate::IsometryVerdict::Isometric { witness } => crate::discriminant::witness_matrix(&witness),
            other => return Err(LatticeError::SelfCheck(format!("T_X20 is not <8>+<4>: {other:?}"))),
        };
        let positive: Vec<Vec<Q>> = (0..2).map(|i| comp.coords.left_apply(wit.to_q().row(i))).collect();
        let mut rows = Vec::new();
        for i in 0..5 {
            rows.push(vscale(&w[i], &q(-1)));
            rows.push(v[i].clone());
        }
        rows.extend(positive.iter().cloned());
        let basis = QMatrix::from_rows(rows, 12);
        let gram = tx.gram_of(&basis);
        let mut expect = Vec::new();
        for i in 0..5 {
            expect.push(q(norms_w[i]));
            expect.push(q(norms_v[i]));
        }
        expect.extend([q(8), q(4)]);
        check(gram == QMatrix::diag(&expect), || "Γ gram is not diagonal as expected".into())?;
        check(!basis.det().is_zero(), || "Γ does not span T_X".into())?;
        Ok(GammaFrame { v, w, positive, basis, gram })
    }

    /// Γ coordinates of a t-coordinate vector.
    pub fn to_gamma(&self, x: &[Q]) -> Vec<Q> {
        self.basis.solve_left(x).expect("Γ spans T_X over Q")
    }

    pub fn from_gamma(&self, c: &[Q]) -> Vec<Q> {
        self.basis.left_apply(c)
    }

    /// [T_X : Γ]
    pub fn index(&self) -> Q {
        self.basis.det().abs()
    }
}

pub fn gamma_frame() -> &'static GammaFrame {
    static F: OnceLock<GammaFrame> = OnceLock::new();
    F.get_or_init(|| GammaFrame::build().expect("Γ frame self-check"))
}

/// Evidence collected while reading γ off the fibre dictionary.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ThetaStep {
    pub step: usize,
    /// Exceptional curves n_a, n_b (1-based) through which π_*(V) passes, for steps 1..4;
    /// for step 5 the four curves met by π_*(A5) and π_*(C5).
    pub exceptional: Vec<usize>,
    /// π_*(A)² for the outer I4 components A, C of the W-fibre (steps 1..4), or π_*(D1)² (step 5).
    pub pushed_component_norm: String,
    /// Image of V and of W in the (-W, V) basis.
    pub block: [[i64; 2]; 2],
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct GammaTheta {
    pub steps: Vec<ThetaStep>,
    /// 10×10, columns are images, basis -W1, V1, ..., -W5, V5.
    pub matrix: Vec<Vec<String>>,
}

/// Unique 2-subsets {a, b} with (v - n_a - n_b)/2 in H²(Y); v in base coordinates.
fn exceptional_pairs(v: &[Q]) -> Vec<(usize, usize)> {
    let y = quotient_frame();
    let mut out = Vec::new();
    for a in 0..8 {
        for b in a + 1..8 {
            let c = vscale(&vsub(&vsub(v, &y.n(a)), &y.n(b)), &qf(1, 2));
            if y.in_h2y(&c) {
                out.push((a + 1, b + 1));
            }
        }
    }
    out
}

fn integral(v: &[Q]) -> bool {
    v.iter().all(|x| x.is_integer())
}

/// γ on Θ20 from the fibre dictionary of the quotient examples.
///
/// For a (-2)-class V on an I2 fibre with trivial torsion contact, π_*(V) passes through two
/// fixed points; the exceptional pair maps to the outer components A + C = -W of the I4
/// fibre built from W, so γ(V) = -W. The outer components A, C have a common image
/// (their difference is anti-invariant), which corresponds to V, so γ(W) = -γ(A+C) ↦ -2V.
/// In the last step the roles are played by the I4 of V5 and the I8 of W5.
pub fn gamma_on_theta() -> Result<GammaTheta> {
    let x = frame();
    let y = quotient_frame();
    let g = gamma_frame();
    let lam_t = |v: &[Q]| x.t_to_lambda(v);
    let n_cls = |i: usize| x.syms.get(&format!("N_{i}")).unwrap().clone();
    let half = qf(1, 2);
    let mut steps = Vec::new();
    let mut images: Vec<Vec<Q>> = Vec::new();
    for i in 0..4 {
        let v = lam_t(&g.v[i]);
        let w = lam_t(&g.w[i]);
        let pairs = exceptional_pairs(&pi_star(&v));
        check(pairs.len() == 1, || format!("step {}: exceptional pairs {pairs:?}", i + 1))?;
        check(!y.in_h2y(&vscale(&pi_star(&v), &half)), || format!("step {}: π_*(V)/2 integral", i + 1))?;
        let (a, b) = I4_PAIRS[i];
        let ca = vscale(&vsub(&vadd(&vscale(&w, &q(-1)), &n_cls(a)), &n_cls(b)), &half);
        let cc = vscale(&vadd(&vsub(&vscale(&w, &q(-1)), &n_cls(a)), &n_cls(b)), &half);
        let cb = vscale(&vadd(&vadd(&w, &n_cls(a)), &n_cls(b)), &half);
        for c in [&ca, &cb, &cc] {
            check(integral(c), || format!("step {}: I4 component {} not integral", i + 1, show(c)))?;
            check(x.pair(c, c) == q(-2), || format!("step {}: I4 component is not a root", i + 1))?;
        }
        check(vadd(&ca, &cc) == vscale(&w, &q(-1)), || "A + C ≠ -W".into())?;
        check(pi_star(&ca) == pi_star(&cc), || format!("step {}: π_*(A) ≠ π_*(C)", i + 1))?;
        let pa = pi_star(&ca);
        let norm = y.base.norm(&pa);
        // γ(-W) = 2V, γ(V) = -W
        images.push(vscale(&g.v[i], &q(2)));
        images.push(vscale(&g.w[i], &q(-1)));
        steps.push(ThetaStep {
            step: i + 1,
            exceptional: vec![pairs[0].0, pairs[0].1],
            pushed_component_norm: fmt_q(&norm),
            block: [[0, 1], [2, 0]],
        });
    }
    // step 5: I4 from V3, V4 glued by V5; I8 from the I4s of W3, W4 glued by W5
    let (v3, v4, v5, w5) = (lam_t(&g.v[2]), lam_t(&g.v[3]), lam_t(&g.v[4]), lam_t(&g.w[4]));
    let a5 = vscale(&vsub(&vsub(&v3, &v5), &v4), &half);
    let b5 = vscale(&vadd(&vadd(&v5, &v3), &v4), &half);
    let c5 = vscale(&vsub(&vsub(&v4, &v5), &v3), &half);
    for c in [&a5, &b5, &c5] {
        check(integral(c) && x.pair(c, c) == q(-2), || "step 5: V5 fibre component".into())?;
    }
    let mut exc = Vec::new();
    for c in [&a5, &c5] {
        let p = exceptional_pairs(&pi_star(c));
        check(p.len() == 1, || format!("step 5: exceptional pairs {p:?}"))?;
        exc.extend([p[0].0, p[0].1]);
    }
    let mut sorted = exc.clone();
    sorted.sort();
    sorted.dedup();
    check(sorted.len() == 4, || "step 5: exceptional curves are not distinct".into())?;
    // chain orientation fixed by integrality of the D_i
    let c1 = i4_chain(&lam_t(&g.w[2]), &n_cls(3), &n_cls(1));
    let c2 = i4_chain(&lam_t(&g.w[3]), &n_cls(2), &n_cls(4));
    let d = i8_components(&c1, &c2, &w5)?;
    let odd = vadd(&vadd(&d[0], &d[2]), &vadd(&d[4], &d[6]));
    check(odd == w5, || "D1+D3+D5+D7 ≠ W5".into())?;
    for k in 0..3 {
        check(pi_star(&d[k]) == pi_star(&d[k + 4]), || format!("π_*(D{}) ≠ π_*(D{})", k + 1, k + 5))?;
    }
    images.push(vscale(&g.v[4], &q(2)));
    images.push(vscale(&g.w[4], &q(-1)));
    steps.push(ThetaStep {
        step: 5,
        exceptional: exc,
        pushed_component_norm: fmt_q(&y.base.norm(&pi_star(&d[0]))),
        block: [[0, 1], [2, 0]],
    });
    let cols: Vec<Vec<Q>> = images.iter().map(|v| g.to_gamma(v)[..10].to_vec()).collect();
    let m = QMatrix::from_rows(cols, 10).transpose();
    let expect = theta_block_matrix(2, 5);
    check(m == expect, || "γ on Θ20 is not blockdiag([[0,1],[2,0]])".into())?;
    Ok(GammaTheta { steps, matrix: m.to_rows().iter().map(|r| r.iter().map(fmt_q).collect()).collect() })
}

/// blockdiag([[0,1],[k,0]] × n).
pub fn theta_block_matrix(k: i64, n: usize) -> QMatrix {
    let b = QMatrix::from_i64(&[vec![0, 1], vec![k, 0]]);
    QMatrix::block_diag(&vec![b; n])
}

/// Components (-W+Na-Nb)/2, (W+Na+Nb)/2, (-W-Na+Nb)/2 of the I4 fibre glued from W by Na, Nb.
pub fn i4_chain(w: &[Q], na: &[Q], nb: &[Q]) -> [Vec<Q>; 3] {
    let half = qf(1, 2);
    let mw = vscale(w, &q(-1));
    [
        vscale(&vsub(&vadd(&mw, na), nb), &half),
        vscale(&vadd(&vadd(w, na), nb), &half),
        vscale(&vadd(&vsub(&mw, na), nb), &half),
    ]
}

/// The seven non-trivial components of the I8 fibre obtained by gluing two I4 chains
/// C^(1), C^(2) (consecutive components meet once) by a class W of norm -8.
pub fn i8_components(c1: &[Vec<Q>; 3], c2: &[Vec<Q>; 3], w: &[Q]) -> Result<Vec<Vec<Q>>> {
    let x = frame();
    let coef: [[i64; 7]; 7] = [
        [3, 2, 1, -3, -2, -1, 1],
        [1, -2, -1, 3, 2, 1, -1],
        [-1, 2, 1, 1, -2, -1, 1],
        [1, 2, -1, -1, 2, 1, -1],
        [-1, -2, 1, 1, 2, -1, 1],
        [1, 2, 3, -1, -2, 1, -1],
        [-1, -2, -3, 1, 2, 3, 1],
    ];
    let parts: Vec<&[Q]> = vec![&c1[0], &c1[1], &c1[2], &c2[0], &c2[1], &c2[2], w];
    let mut out = Vec::new();
    for (k, row) in coef.iter().enumerate() {
        let mut v = vec![Q::zero(); 22];
        for (c, p) in row.iter().zip(&parts) {
            v = vadd(&v, &vscale(p, &q(*c)));
        }
        let v = vscale(&v, &qf(1, 4));
        check(integral(&v), || format!("D{} is not integral", k + 1))?;
        out.push(v);
    }
    for i in 0..7 {
        for j in 0..7 {
            let e = if i == j { -2 } else if (i as i64 - j as i64).abs() == 1 { 1 } else { 0 };
            check(x.pair(&out[i], &out[j]) == q(e), || format!("D{} . D{} ≠ {e}", i + 1, j + 1))?;
        }
    }
    Ok(out)
}

/// γ₊ on (p1, p2): ψ ∘ π_* with ψ: T_Y20 → T_X20 the pinned isometry.
#[derive(Clone, Debug, serde::Serialize)]
pub struct GammaPlus {
    pub matrix: Vec<Vec<String>>,
    pub scale: String,
    /// Entries of γ₊², whose sign depends on the choice of ψ.
    pub square: Vec<Vec<String>>,
    pub witness_pinned: bool,
    pub t_y20_gram: Vec<Vec<String>>,
}

fn strs(m: &QMatrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(fmt_q).collect()).collect()
}

pub fn gamma_plus_matrix() -> Result<QMatrix> {
    let x = frame();
    let y = quotient_frame();
    let g = gamma_frame();
    let ps: Vec<Vec<Q>> = g.positive.iter().map(|p| x.t_to_lambda(p)).collect();
    let pushed: Vec<Vec<Q>> = ps.iter().map(|p| y.push(p)).collect();
    let ty = saturation(&Sublattice::from_rows(y.h2y_lattice.clone(), pushed.clone())?.basis()).sub;
    let wit = QMatrix::from_rows(PSI20_WITNESS.iter().map(|r| r.iter().map(|&c| q(c)).collect()).collect(), 2);
    let wit_inv = wit.inverse().ok_or_else(|| LatticeError::SelfCheck("ψ witness singular".into()))?;
    let cols: Vec<Vec<Q>> = pushed
        .iter()
        .map(|p| {
            let c = ty.coords.solve_left(p).expect("π_*(p) in T_Y20");
            wit_inv.left_apply(&c)
        })
        .collect();
    Ok(QMatrix::from_rows(cols, 2).transpose())
}

pub fn gamma_plus() -> Result<GammaPlus> {
    let x = frame();
    let y = quotient_frame();
    let g = gamma_frame();
    let ps: Vec<Vec<Q>> = g.positive.iter().map(|p| x.t_to_lambda(p)).collect();
    let pushed: Vec<Vec<Q>> = ps.iter().map(|p| y.push(p)).collect();
    let ty = saturation(&Sublattice::from_rows(y.h2y_lattice.clone(), pushed)?.basis()).sub;
    let tyl = sub_lattice(&ty, "T_Y20")?;
    let target = Lattice::from_i64("<8>+<4>", &[vec![8, 0], vec![0, 4]])?;
    let wit = QMatrix::from_rows(PSI20_WITNESS.iter().map(|r| r.iter().map(|&c| q(c)).collect()).collect(), 2);
    // the pinned witness must be an isometry <8>+<4> → T_Y20
    let pinned = tyl.gram_of(&wit) == target.gram_q();
    if !pinned {
        let found = crate::enumerate::definite_isometric(&target, &tyl)?;
        return Err(LatticeError::SelfCheck(format!(
            "pinned ψ witness is not an isometry onto T_Y20 (gram {}); search gives {found:?}",
            show(&tyl.gram_q().to_rows().concat())
        )));
    }
    let m = gamma_plus_matrix()?;
    let scale = LatticeMap::new(m.clone())
        .similarity_factor(&target.gram_q(), &target.gram_q())
        .ok_or_else(|| LatticeError::SelfCheck("γ₊ is not a similarity".into()))?;
    Ok(GammaPlus {
        square: strs(&m.mul(&m)),
        matrix: strs(&m),
        scale: fmt_q(&scale),
        witness_pinned: pinned,
        t_y20_gram: strs(&tyl.gram_q()),
    })
}

/// Solutions A of the complex multiplication constraints on a 2-dim block with form
/// diag(k x, x): A² = -k and both isotropic vectors v1 ± √-k v2 are eigenvectors.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CmSolution {
    pub k: i64,
    /// Each solution [[a, b], [c, d]] acting on columns.
    pub solutions: Vec<[[String; 2]; 2]>,
}

/// Exact solve over Q(√-k): writing A(w1) = λ w1 with w1 = v1 + √-k v2 and λ = ε√-k, the
/// rational and irrational parts give four linear equations in (a, b, c, d); the conjugate
/// vector gives the conjugate equations. Each branch ε = ±1 has exactly one solution.
pub fn solve_cm(k: i64) -> Result<CmSolution> {
    if k <= 0 {
        return Err(LatticeError::Param("k must be positive".into()));
    }
    // elements of Q(√-k) as (rational, irrational) parts
    let mul = |x: (Q, Q), y: (Q, Q)| (&x.0 * &y.0 - q(k) * &x.1 * &y.1, &x.0 * &y.1 + &x.1 * &y.0);
    let mut sols = Vec::new();
    for eps in [1i64, -1] {
        let mut rows: Vec<Vec<Q>> = Vec::new();
        let mut rhs = Vec::new();
        // w = v1 + s√-k v2 with eigenvalue s·ε√-k, for s = ±1 (the two isotropic lines)
        for s in [1i64, -1] {
            let w = [(q(1), q(0)), (q(0), q(s))];
            let lam = (q(0), q(s * eps));
            for i in 0..2 {
                let target = mul(lam.clone(), w[i].clone());
                // (A w)_i = Σ_j A[i][j] w_j; unknowns ordered a, b, c, d
                for part in 0..2 {
                    let mut r = vec![Q::zero(); 4];
                    for j in 0..2 {
                        r[2 * i + j] = if part == 0 { w[j].0.clone() } else { w[j].1.clone() };
                    }
                    rows.push(r);
                    rhs.push(if part == 0 { target.0.clone() } else { target.1.clone() });
                }
            }
        }
        let m = QMatrix::from_rows(rows, 4);
        check(m.rank() == 4, || "CM system is not determined".into())?;
        let sol = m.transpose().solve_left(&rhs).ok_or_else(|| LatticeError::SelfCheck("CM system inconsistent".into()))?;
        let a = QMatrix::from_rows(vec![vec![sol[0].clone(), sol[1].clone()], vec![sol[2].clone(), sol[3].clone()]], 2);
        check(a.mul(&a) == QMatrix::identity(2).scale(&q(-k)), || "A² ≠ -k".into())?;
        let g = QMatrix::diag(&[q(k), q(1)]);
        check(a.transpose().mul(&g).mul(&a) == g.scale(&q(k)), || "A does not scale the form by k".into())?;
        sols.push([
            [fmt_q(&a[(0, 0)]), fmt_q(&a[(0, 1)])],
            [fmt_q(&a[(1, 0)]), fmt_q(&a[(1, 1)])],
        ]);
    }
    Ok(CmSolution { k, solutions: sols })
}

/// ν on Γ: blockdiag(M_2 × 6) with M_2 = [[0,1],[-2,0]] (the +M_2 branch).
pub fn nu_matrix() -> QMatrix {
    theta_block_matrix(-2, 6)
}

/// The full γ on Γ: Θ blocks and γ₊.
pub fn gamma_matrix() -> Result<QMatrix> {
    let t = theta_block_matrix(2, 5);
    Ok(QMatrix::block_diag(&[t, gamma_plus_matrix()?]))
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct InvarianceVerdict {
    pub invariant: bool,
    /// Present when invariant: class comparison of NS(X) and the directly computed NS(Y).
    pub prediction: Option<crate::compare::ClassComparison>,
}

/// Is the Q-span of T_sub (t coordinates) stable under γ? When it is, the quotient is
/// predicted to have NS ≅ NS(X), which is compared with the direct computation.
pub fn gamma_invariance_check(t_sub: &[Vec<Q>]) -> Result<InvarianceVerdict> {
    let g = gamma_frame();
    let gm = gamma_matrix()?;
    let span = QMatrix::from_rows(t_sub.to_vec(), 12);
    let r = span.rank();
    let mut images = Vec::new();
    for v in t_sub {
        let c = g.to_gamma(v);
        images.push(g.from_gamma(&gm.apply(&c)));
    }
    let invariant = span.vstack(&QMatrix::from_rows(images, 12)).rank() == r;
    if !invariant {
        return Ok(InvarianceVerdict { invariant, prediction: None });
    }
    let x = frame();
    let ts = Sublattice::from_rows(x.lambda.clone(), t_sub.iter().map(|v| x.t_to_lambda(v)).collect())?;
    let tsat = saturation(&ts.basis()).sub;
    let ns = orthogonal_complement(&tsat);
    let qn = quotient_ns_lambda(&ns.coords.to_rows())?;
    let cmp = crate::compare::compare_classes(&qn.ns_x, &qn.ns_y)?;
    Ok(InvarianceVerdict { invariant, prediction: Some(cmp) })
}

/// t-coordinate basis of the complement in T_X of the first j Θ pairs.
pub fn theta_complement(j: usize) -> Result<Vec<Vec<Q>>> {
    let g = gamma_frame();
    let tx = Arc::new(atlas::t_x_std());
    let mut rows = Vec::new();
    for i in 0..j {
        rows.push(g.v[i].clone());
        rows.push(g.w[i].clone());
    }
    if rows.is_empty() {
        return Ok((0..12).map(|i| unit(12, i)).collect());
    }
    Ok(orthogonal_complement(&Sublattice::from_rows(tx, rows)?).coords.to_rows())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frames_build() {
        let _ = frame();
        let y = quotient_frame();
        assert_eq!(y.tau_gram().select_rows(&[0]).row(0)[..8].to_vec(),
            [-4, -2, 0, 0, 0, 0, 0, -2].map(q).to_vec());
    }
}
