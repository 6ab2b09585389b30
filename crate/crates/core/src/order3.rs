//! Order 3: U+M, the abstract H²(X,Z) assembled from (U+M) + T_X with four glue
//! classes, the translation σ₃ by a 3-torsion section, K12, the three
//! specializations and the rational frame on which γ₃ acts.
//!
//! Base coordinates are F, S, M1_1, M2_1, ..., M1_6, M2_6, v1, v2, u1, u2, a1, a2, b1, b2.
//! Everything downstream lives in the coordinates of the assembled overlattice.

use crate::arith::{fmt_q, q, qf, Q, Z};
use crate::atlas::{self, a2_sixfold, fs_plane, t_x3_std};
use crate::discriminant::{discriminant_form, fqf_isomorphic};
use crate::enumerate::{definite_isometric, uniqueness_criterion};
use crate::error::{LatticeError, Result};
use crate::expr::{format_combination, Symbols};
use crate::lattice::{Lattice, LatticeMap};
use crate::matrix::{unit, QMatrix};
use crate::overlattice::{overlattice, Overlattice};
use crate::specialize::{specialize_in, ChainFrame, ChainState, StepReport};
use crate::sublattice::{orthogonal_complement, saturation, Sublattice};
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::sync::{Arc, OnceLock};

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(LatticeError::SelfCheck(what()))
    }
}

fn strs(m: &QMatrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(fmt_q).collect()).collect()
}

pub const T3_LABELS: [&str; 8] = ["v1", "v2", "u1", "u2", "a1", "a2", "b1", "b2"];

/// η classes of A_M, and the H² glue pairing them with T_X.
pub const ETA: [&str; 4] = [
    "(M1_1+2M2_1+M1_2+2M2_2+M1_3+2M2_3)/3",
    "(M1_2+2M2_2+M1_3+2M2_3+M1_4+2M2_4)/3",
    "(M1_2+2M2_2-M1_3-2M2_3)/3",
    "(M1_1+2M2_1+M1_2+2M2_2+M1_3+2M2_3+M1_4+2M2_4+2M1_5+M2_5)/3",
];
pub const ETA_T: [&str; 4] = ["u1/3", "u2/3", "(a1+2a2)/3", "(b1+2b2)/3"];

pub fn base_names() -> Vec<String> {
    let mut l = vec!["F".to_string(), "S".to_string()];
    l.extend(a2_sixfold().labels().unwrap().iter().cloned());
    l.extend(T3_LABELS.iter().map(|s| s.to_string()));
    l
}

#[derive(Clone, Debug)]
pub struct K3Frame3 {
    /// U + A2^6 + T_X, the coordinates all named classes are written in.
    pub base: Lattice,
    pub glue: Vec<Vec<Q>>,
    pub h2: Overlattice,
    pub ambient: Arc<Lattice>,
    /// All names valued in H² coordinates.
    pub syms: Symbols,
    pub ns: Sublattice,
    pub t: Sublattice,
    /// Rows: v1..b2 in H² coordinates.
    pub t_embedding: QMatrix,
}

impl K3Frame3 {
    pub fn build() -> Result<K3Frame3> {
        let base = Lattice::sum_all(&[fs_plane(), a2_sixfold(), t_x3_std()]).with_labels(base_names());
        let mut old = Symbols::from_labels(base.labels().unwrap());
        old.define("M_hat", "(M1_1+2M2_1+M1_2+2M2_2+M1_3+2M2_3+M1_4+2M2_4+M1_5+2M2_5+M1_6+2M2_6)/3")?;
        let mut glue = vec![old.get("M_hat").unwrap().clone()];
        for (e, t) in ETA.iter().zip(ETA_T) {
            glue.push(old.eval(&format!("{e}+{t}"))?);
        }
        let h2 = overlattice(&base, &glue)?;
        let l = &h2.lattice;
        check(l.det() == Z::from(-1) && l.is_even() && l.signature() == Some((3, 19)), || {
            format!("assembled H² has det {} signature {:?}", l.det(), l.signature())
        })?;
        let ambient = Arc::new(l.clone().renamed("H2(X)"));
        let mut syms = Symbols::new(22);
        for (i, name) in base.labels().unwrap().iter().enumerate() {
            syms.insert(name, h2.to_new(&unit(22, i)));
        }
        syms.define("M_hat", "(M1_1+2M2_1+M1_2+2M2_2+M1_3+2M2_3+M1_4+2M2_4+M1_5+2M2_5+M1_6+2M2_6)/3")?;
        syms.define("M_hat'", "(2M1_1+M2_1+2M1_2+M2_2+2M1_3+M2_3+2M1_4+M2_4+2M1_5+M2_5+2M1_6+M2_6)/3")?;
        for (i, e) in ETA.iter().enumerate() {
            syms.define(&format!("eta{}", i + 1), e)?;
        }
        syms.define("T1", "2F+S-M_hat'")?;
        syms.define("T2", "2F+S-M_hat")?;
        for j in 1..=6 {
            syms.define(&format!("M0_{j}"), &format!("F-M1_{j}-M2_{j}"))?;
        }
        for (i, (v, w)) in THETA3.iter().enumerate() {
            syms.define(&format!("V{}", i + 1), v)?;
            syms.define(&format!("W{}", i + 1), w)?;
        }
        syms.define("V3'", THETA3_ALT.0)?;
        syms.define("W3'", THETA3_ALT.1)?;
        let mut ns_rows = vec![syms.get("F").unwrap().clone(), syms.get("S").unwrap().clone()];
        for j in 1..=6 {
            ns_rows.push(syms.get(&format!("M1_{j}")).unwrap().clone());
            ns_rows.push(syms.get(&format!("M2_{j}")).unwrap().clone());
        }
        ns_rows.push(syms.get("M_hat").unwrap().clone());
        let ns = saturation(&Sublattice::from_rows(ambient.clone(), ns_rows)?.basis()).sub;
        let t_rows: Vec<Vec<Q>> = T3_LABELS.iter().map(|n| syms.get(n).unwrap().clone()).collect();
        let t_embedding = QMatrix::from_rows(t_rows.clone(), 22);
        let t = Sublattice::from_rows(ambient.clone(), t_rows)?;
        let x = K3Frame3 { base, glue, h2, ambient, syms, ns, t, t_embedding };
        x.self_check()?;
        Ok(x)
    }

    fn self_check(&self) -> Result<()> {
        let nsl = self.ns.lattice("NS")?;
        check(nsl.det().abs() == Z::from(81) && nsl.signature() == Some((1, 13)), || {
            format!("U+M has det {} signature {:?}", nsl.det(), nsl.signature())
        })?;
        check(crate::sublattice::is_primitive(&self.t), || "T_X is not primitive in H²".into())?;
        for name in ["M_hat", "M_hat'", "T1", "T2"] {
            let v = self.syms.get(name).unwrap();
            check(v.iter().all(|x| x.is_integer()) && self.ns.contains(v), || format!("{name} is not integral"))?;
        }
        for name in ["T1", "T2"] {
            let v = self.syms.get(name).unwrap();
            check(self.pair(v, v) == q(-2) && self.pair(v, self.syms.get("F").unwrap()).is_one(), || {
                format!("{name} is not a section class")
            })?;
        }
        Ok(())
    }

    pub fn eval(&self, e: &str) -> Result<Vec<Q>> {
        self.syms.eval(e)
    }

    pub fn pair(&self, a: &[Q], b: &[Q]) -> Q {
        self.ambient.pair(a, b)
    }

    pub fn t_to_h2(&self, v: &[Q]) -> Vec<Q> {
        self.t_embedding.left_apply(v)
    }

    /// Writes an H² class in the base names.
    pub fn express(&self, v: &[Q]) -> String {
        let old = self.h2.to_old(v);
        let names = base_names();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        format_combination(&refs, &old)
    }
}

pub fn frame3() -> &'static K3Frame3 {
    static F: OnceLock<K3Frame3> = OnceLock::new();
    F.get_or_init(|| K3Frame3::build().expect("order 3 frame self-check"))
}

// ------------------------------------------------------------------ σ₃

/// σ₃ on H²: F fixed, M1_j -> M2_j -> M0_j, S -> T1, identity on T_X.
/// Column convention of LatticeMap, H² coordinates.
pub fn sigma3() -> Result<LatticeMap> {
    let x = frame3();
    let b = x.h2.base_change.clone();
    let names = base_names();
    let mut old = Symbols::from_labels(&names);
    old.define("M_hat'", "(2M1_1+M2_1+2M1_2+M2_2+2M1_3+M2_3+2M1_4+M2_4+2M1_5+M2_5+2M1_6+M2_6)/3")?;
    let images: Vec<Vec<Q>> = names
        .iter()
        .map(|n| {
            let e = match n.as_str() {
                "S" => "2F+S-M_hat'".to_string(),
                s if s.starts_with("M1_") => format!("M2_{}", &s[3..]),
                s if s.starts_with("M2_") => format!("F-M1_{j}-M2_{j}", j = &s[3..]),
                s => s.to_string(),
            };
            old.eval(&e)
        })
        .collect::<Result<_>>()?;
    let s_old = QMatrix::from_rows(images, 22);
    let binv = b.inverse().ok_or(LatticeError::Degenerate)?;
    let row_map = b.mul(&s_old).mul(&binv);
    check(row_map.is_integral(), || "σ₃ is not integral on H²".into())?;
    let g = x.ambient.gram_q();
    check(row_map.mul(&g).mul(&row_map.transpose()) == g, || "σ₃ is not an isometry".into())?;
    let m3 = row_map.mul(&row_map).mul(&row_map);
    check(m3 == QMatrix::identity(22), || "σ₃ does not have order 3".into())?;
    let mut map = LatticeMap::new(row_map.transpose());
    map.form_scale = Some(Q::one());
    Ok(map)
}

#[derive(Clone, Debug, Serialize)]
pub struct Sigma3Report {
    pub order: usize,
    pub isometry: bool,
    pub integral_on_h2: bool,
    pub s_to_t1: bool,
    pub t1_to_t2: bool,
    pub t2_to_s: bool,
    pub invariant_rank_on_ns: usize,
    pub invariant_contains_f_and_s_t1_t2: bool,
    pub anti_invariant_equals_k12: bool,
    pub acts_trivially_on_t: bool,
}

pub fn sigma3_report() -> Result<Sigma3Report> {
    let x = frame3();
    let s = sigma3()?;
    let get = |n: &str| x.syms.get(n).unwrap().clone();
    let ap = |v: &[Q]| s.apply(v);
    let ns_basis = x.ns.coords.clone();
    // σ - 1 restricted to NS
    let diff: Vec<Vec<Q>> = (0..ns_basis.rows())
        .map(|i| {
            let v = ns_basis.row(i);
            crate::matrix::vsub(&ap(v), v)
        })
        .collect();
    let dm = QMatrix::from_rows(diff, 22);
    let ker = dm.transpose().kernel(); // combinations of NS rows killed by σ - 1
    let inv_rows: Vec<Vec<Q>> = (0..ker.rows()).map(|i| ns_basis.left_apply(ker.row(i))).collect();
    let inv = Sublattice::from_rows(x.ambient.clone(), inv_rows.clone())?;
    let fst = crate::matrix::vadd(&crate::matrix::vadd(&get("S"), &get("T1")), &get("T2"));
    let contains = inv.rank() > 0 && {
        let m = QMatrix::from_rows(inv_rows, 22);
        m.solve_left(&get("F")).is_some() && m.solve_left(&fst).is_some()
    };
    let k = k12_sub()?;
    let anti = anti_invariant(&s, &x.ns)?;
    let same = anti.rank() == k.rank() && (0..k.generators()).all(|i| anti.contains(k.coords.row(i))) && {
        (0..anti.generators()).all(|i| k.contains(anti.coords.row(i)))
    };
    let t_fixed = (0..8).all(|i| ap(x.t_embedding.row(i)) == x.t_embedding.row(i));
    Ok(Sigma3Report {
        order: 3,
        isometry: true,
        integral_on_h2: true,
        s_to_t1: ap(&get("S")) == get("T1"),
        t1_to_t2: ap(&get("T1")) == get("T2"),
        t2_to_s: ap(&get("T2")) == get("S"),
        invariant_rank_on_ns: inv.rank(),
        invariant_contains_f_and_s_t1_t2: contains,
        anti_invariant_equals_k12: same,
        acts_trivially_on_t: t_fixed,
    })
}

/// (1 + σ + σ²)-kernel inside a sublattice, saturated.
fn anti_invariant(s: &LatticeMap, sub: &Sublattice) -> Result<Sublattice> {
    let rows: Vec<Vec<Q>> = (0..sub.generators())
        .map(|i| {
            let v = sub.coords.row(i).to_vec();
            let a = s.apply(&v);
            let b = s.apply(&a);
            crate::matrix::vadd(&crate::matrix::vadd(&v, &a), &b)
        })
        .collect();
    let ker = QMatrix::from_rows(rows, 22).transpose().kernel();
    let gens: Vec<Vec<Q>> = (0..ker.rows()).map(|i| sub.coords.left_apply(ker.row(i))).collect();
    let m = QMatrix::from_rows(gens, 22);
    let (d, _) = m.clear_denominators();
    let m = m.scale(&Q::from_integer(d));
    Ok(saturation(&Sublattice::new(sub.ambient.clone(), m)?.basis()).sub)
}

// ------------------------------------------------------------------ K12

/// The complement of <F, S+T1+T2> in U+M, in H² coordinates (primitive by construction).
pub fn k12_sub() -> Result<Sublattice> {
    let x = frame3();
    let nsl = Arc::new(x.ns.lattice("NS")?);
    let to = |v: &[Q]| x.ns.coords.solve_left(v).unwrap();
    let fst = x.eval("S+T1+T2")?;
    let inv = Sublattice::from_rows(nsl, vec![to(x.syms.get("F").unwrap()), to(&fst)])?;
    let k = orthogonal_complement(&inv);
    let rows: Vec<Vec<Q>> = (0..k.generators()).map(|i| x.ns.coords.left_apply(k.coords.row(i))).collect();
    Sublattice::from_rows(x.ambient.clone(), rows)
}

pub fn k12() -> Result<Lattice> {
    Ok(k12_sub()?.lattice("K12")?.renamed("K12"))
}

/// The two E6(2) diagrams, each listed as chain a-b-c-d-e with branch f at c.
pub const DIAG_E6_2: [[&str; 6]; 2] = [
    ["2F-M_hat", "-F+M1_1+M2_1+M2_2", "M2_3-M2_2", "M2_4-M2_3", "M2_5-M2_4", "F-M1_1-M2_1+M2_2"],
    ["-M_hat+M_hat'", "M2_1-M1_2", "-M1_3+M1_2", "-M1_4+M1_3", "-M1_5+M1_4", "2F-M2_1-M1_2"],
];

#[derive(Clone, Debug, Serialize)]
pub struct K12Report {
    pub rank: usize,
    pub det: String,
    pub even: bool,
    pub definite: bool,
    pub roots: usize,
    pub minimal_norm_vectors: usize,
    /// Both listed diagrams have gram E6(2) in the listed order.
    pub diagrams_are_e6_2: [bool; 2],
    /// Diagram classes orthogonal to F and S+T1+T2, out of 12.
    pub diagram_classes_in_k12: usize,
    /// Products with S+T1+T2 of the classes that miss.
    pub misses: Vec<(String, String)>,
    /// The two five-node chains pair with each other as the A5 part of the E6 block.
    pub chain_cross_block_ok: bool,
    /// Norm -4 vectors of K12 completing either chain to an E6(2) diagram.
    pub branch_completions: usize,
    /// Even index 3 overlattices of K̃12, and how many of them are isometric to K12.
    pub k12_tilde_overlattices: usize,
    pub overlattices_isometric_to_k12: usize,
    pub inconclusive: usize,
}

fn classes(names: &[&str]) -> Result<Vec<Vec<Q>>> {
    names.iter().map(|n| frame3().eval(n)).collect()
}

pub fn k12_report() -> Result<K12Report> {
    k12_report_with(true)
}

/// `census` runs the comparison with all index 3 overlattices of K̃12 (about 20 s).
pub fn k12_report_with(census: bool) -> Result<K12Report> {
    let x = frame3();
    let k = k12_sub()?;
    let kl = k.lattice("K12")?;
    let e62 = atlas::e6().scaled(2).gram_q();
    let fst = x.eval("S+T1+T2")?;
    let f = x.eval("F")?;
    let mut ok = [false; 2];
    let mut inside = 0;
    let mut misses = Vec::new();
    let mut chains = Vec::new();
    for (i, d) in DIAG_E6_2.iter().enumerate() {
        let c = classes(d)?;
        ok[i] = x.ambient.gram_of(&QMatrix::from_rows(c.clone(), 22)) == e62;
        for (name, v) in d.iter().zip(&c) {
            let p = x.pair(v, &fst);
            if p.is_zero() && x.pair(v, &f).is_zero() {
                inside += 1;
            } else {
                misses.push((name.to_string(), fmt_q(&p)));
            }
        }
        chains.push(c[..5].to_vec());
    }
    let a5 = atlas::a_n(5).gram_q();
    let cross = QMatrix::from_fn(5, 5, |i, j| x.pair(&chains[0][i], &chains[1][j]));
    let sv = crate::enumerate::short_vectors(&kl, &Z::from(4))?;
    let target: Vec<Q> = [0, 0, 2, 0, 0].map(q).to_vec();
    let mut completions = 0;
    for v in &sv {
        let vq: Vec<Q> = v.iter().map(|z| Q::from_integer(z.clone())).collect();
        let h = k.coords.left_apply(&vq);
        for ch in &chains {
            let p: Vec<Q> = ch.iter().map(|y| x.pair(&h, y)).collect();
            let np: Vec<Q> = p.iter().map(|y| -y).collect();
            if p == target || np == target {
                completions += 1;
            }
        }
    }
    let (total, iso, inc) = if census { k12_tilde_overlattice_census(&kl)? } else { (0, 0, 0) };
    Ok(K12Report {
        rank: kl.rank(),
        det: kl.det().to_string(),
        even: kl.is_even(),
        definite: kl.definiteness() == Some(-1),
        roots: crate::enumerate::roots(&kl)?.len(),
        minimal_norm_vectors: 2 * sv.len(),
        diagrams_are_e6_2: ok,
        diagram_classes_in_k12: inside,
        misses,
        chain_cross_block_ok: cross == a5,
        branch_completions: completions,
        k12_tilde_overlattices: total,
        overlattices_isometric_to_k12: iso,
        inconclusive: inc,
    })
}

/// Even index 3 overlattices of K̃12, up to the choice of glue line.
pub fn k12_tilde_overlattices() -> Result<Vec<Overlattice>> {
    let kt = atlas::k12_tilde();
    let g: Vec<Vec<i64>> = kt.gram().to_rows().iter().map(|r| r.iter().map(|x| crate::arith::to_i64(x).unwrap()).collect()).collect();
    let n = 12;
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let total = 3usize.pow(n as u32);
    for code in 1..total {
        let mut xv = [0i64; 12];
        let mut c = code;
        for v in xv.iter_mut() {
            *v = (c % 3) as i64;
            c /= 3;
        }
        // x/3 in the dual: G x ≡ 0 mod 3
        if !(0..n).all(|i| (0..n).map(|j| g[i][j] * xv[j]).sum::<i64>().rem_euclid(3) == 0) {
            continue;
        }
        let norm: i64 = (0..n).map(|i| (0..n).map(|j| xv[i] * g[i][j] * xv[j]).sum::<i64>()).sum();
        if norm.rem_euclid(18) != 0 {
            continue;
        }
        let neg: Vec<i64> = xv.iter().map(|v| (3 - v) % 3).collect();
        if seen.contains(&neg) {
            continue;
        }
        seen.insert(xv.to_vec());
        let glue: Vec<Q> = xv.iter().map(|&v| qf(v, 3)).collect();
        out.push(overlattice(&kt, &[glue])?);
    }
    Ok(out)
}

fn k12_tilde_overlattice_census(k: &Lattice) -> Result<(usize, usize, usize)> {
    let ovs = k12_tilde_overlattices()?;
    let (mut iso, mut inc) = (0, 0);
    for o in &ovs {
        if o.lattice.det() != k.det() {
            continue;
        }
        // cheap invariant first: K12 has no roots
        if !crate::enumerate::roots(&o.lattice)?.is_empty() {
            continue;
        }
        match definite_isometric(&o.lattice, k)? {
            v if v.is_isometric() => iso += 1,
            crate::enumerate::IsometryVerdict::Inconclusive { .. } => inc += 1,
            _ => {}
        }
    }
    Ok((ovs.len(), iso, inc))
}

// ------------------------------------------------------------------ specializations

/// (V_i, W_i) in T_X coordinates.
pub const THETA3: [(&str, &str); 3] = [("v1-v2", "u1-u2"), ("b1", "a1+2a2"), ("v1+v2+b1+2b2", "u1+u2+3a1")];
/// Alternative third step.
pub const THETA3_ALT: (&str, &str) = ("a1", "b1+2b2");
/// Basis of T(X20) for the main chain.
pub const T20_3: [&str; 2] = ["3v1+3v2+b1+2b2", "u1+u2+a1"];
/// The pair as printed in the source; u1+u2+b1 meets V2 = b1 with product -2.
pub const T20_3_LISTED: [&str; 2] = ["3v1+3v2+b1+2b2", "u1+u2+b1"];

pub fn t3_symbols() -> Symbols {
    Symbols::from_labels(&T3_LABELS.iter().map(|s| s.to_string()).collect::<Vec<_>>())
}

pub fn chain_frame3() -> ChainFrame {
    let x = frame3();
    ChainFrame {
        ns0: x.ns.clone(),
        t_lattice: t_x3_std(),
        t_embedding: x.t_embedding.clone(),
        f: x.syms.get("F").unwrap().clone(),
        s: x.syms.get("S").unwrap().clone(),
        torsion_section: x.syms.get("T1").unwrap().clone(),
        max_added: 6,
        express: Box::new(|v| frame3().express(v)),
    }
}

pub fn three_steps(alternate_last: bool) -> Vec<Vec<Vec<Q>>> {
    let s = t3_symbols();
    let mut steps: Vec<Vec<Vec<Q>>> = THETA3.iter().map(|(v, w)| vec![s.eval(v).unwrap(), s.eval(w).unwrap()]).collect();
    if alternate_last {
        steps[2] = vec![s.eval(THETA3_ALT.0).unwrap(), s.eval(THETA3_ALT.1).unwrap()];
    }
    steps
}

pub fn specialize3(steps: &[Vec<Vec<Q>>]) -> Result<(Vec<StepReport>, ChainState)> {
    specialize_in(&chain_frame3(), steps)
}

#[derive(Clone, Debug, Serialize)]
pub struct GlueClassCheck {
    pub name: String,
    pub expr: String,
    pub norm: String,
    pub in_ns: bool,
    /// The listed chain has the A_n gram.
    pub chain_ok: bool,
}

/// λ₁ after the first step, with the A5 chain {-C1^(1), -C2^(1), λ₁, C2^(4), C1^(4)}.
pub fn lambda1_check(state: &ChainState) -> Result<GlueClassCheck> {
    let x = frame3();
    let e = "(u1-u2)/3+eta1-eta2";
    let l = x.eval(e)?;
    let chain = vec![x.eval("-M1_1")?, x.eval("-M2_1")?, l.clone(), x.eval("M2_4")?, x.eval("M1_4")?];
    let g = x.ambient.gram_of(&QMatrix::from_rows(chain, 22));
    Ok(GlueClassCheck {
        name: "lambda1".into(),
        expr: e.into(),
        norm: fmt_q(&x.pair(&l, &l)),
        in_ns: state.ns.contains(&l),
        chain_ok: g == atlas::a_n(5).gram_q(),
    })
}

/// μ₁ = (V1+V2+V3)/2 after the third step, with the A3 chain {-V1, μ₁, -V2}.
pub fn mu1_check(state: &ChainState) -> Result<GlueClassCheck> {
    let x = frame3();
    let e = "(V1+V2+V3)/2";
    let m = x.eval(e)?;
    let chain = vec![x.eval("-V1")?, m.clone(), x.eval("-V2")?];
    let g = x.ambient.gram_of(&QMatrix::from_rows(chain, 22));
    Ok(GlueClassCheck {
        name: "mu1".into(),
        expr: e.into(),
        norm: fmt_q(&x.pair(&m, &m)),
        in_ns: state.ns.contains(&m),
        chain_ok: g == atlas::a_n(3).gram_q(),
    })
}

// ------------------------------------------------------------------ γ₃

#[derive(Clone, Debug, Serialize)]
pub struct GammaFrame3 {
    /// Basis W1, V1, W2, V2, W3, V3, P1, P2 in T_X coordinates.
    pub basis: Vec<Vec<String>>,
    pub gram: Vec<String>,
    pub gram_is_gamma: bool,
    /// [T_X : span of the basis]
    pub index: String,
    pub matrix: Vec<Vec<String>>,
    pub scale: String,
    pub square_is_3: bool,
    pub t20_gram: Vec<Vec<String>>,
    /// Products of the printed generators with V1, W1, V2, W2, V3, W3.
    pub listed_t20_products: Vec<Vec<String>>,
}

pub fn gamma3_basis() -> Vec<Vec<Q>> {
    let s = t3_symbols();
    let mut b = Vec::new();
    for (v, w) in THETA3 {
        b.push(s.eval(w).unwrap());
        b.push(s.eval(v).unwrap());
    }
    for p in T20_3 {
        b.push(s.eval(p).unwrap());
    }
    b
}

/// [[0,1],[3,0]] on each (W, V) pair and on (P1, P2): W -> 3V, V -> W, P1 -> 3P2, P2 -> P1.
pub fn gamma3_matrix() -> QMatrix {
    let blk = QMatrix::from_rows(vec![vec![q(0), q(1)], vec![q(3), q(0)]], 2);
    QMatrix::block_diag(&[blk.clone(), blk.clone(), blk.clone(), blk])
}

pub fn gamma3_frame() -> Result<GammaFrame3> {
    let t = t_x3_std();
    let b = QMatrix::from_rows(gamma3_basis(), 8);
    let g = t.gram_of(&b);
    let want = [-6, -2, -6, -2, -12, -4, 12, 4];
    let diag_ok = (0..8).all(|i| (0..8).all(|j| g[(i, j)] == if i == j { q(want[i]) } else { Q::zero() }));
    let m = gamma3_matrix();
    let scale = LatticeMap::new(m.clone()).similarity_factor(&g, &g);
    let sq = m.mul(&m) == QMatrix::identity(8).scale(&q(3));
    let idx = b.det().abs();
    let s = t3_symbols();
    let t20 = t.gram_of(&QMatrix::from_rows(T20_3.iter().map(|p| s.eval(p).unwrap()).collect(), 8));
    let listed: Vec<Vec<String>> = T20_3_LISTED
        .iter()
        .map(|p| {
            let v = s.eval(p).unwrap();
            THETA3.iter().flat_map(|(a, b)| [*a, *b]).map(|c| fmt_q(&t.pair(&v, &s.eval(c).unwrap()))).collect()
        })
        .collect();
    Ok(GammaFrame3 {
        basis: strs(&b),
        gram: (0..8).map(|i| fmt_q(&g[(i, i)])).collect(),
        gram_is_gamma: diag_ok,
        index: fmt_q(&idx),
        matrix: strs(&m),
        scale: scale.map(|s| fmt_q(&s)).unwrap_or_else(|| "none".into()),
        square_is_3: sq,
        t20_gram: strs(&t20),
        listed_t20_products: listed,
    })
}

/// Whether the Q-span of the rows (T_X coordinates) is γ₃-stable.
pub fn gamma3_invariant(t_sub: &[Vec<Q>]) -> bool {
    let b = QMatrix::from_rows(gamma3_basis(), 8);
    let m = gamma3_matrix();
    let span = QMatrix::from_rows(t_sub.to_vec(), 8);
    let images: Vec<Vec<Q>> = t_sub
        .iter()
        .map(|v| {
            let c = b.solve_left(v).unwrap();
            b.left_apply(&m.apply(&c))
        })
        .collect();
    span.vstack(&QMatrix::from_rows(images, 8)).rank() == span.rank()
}

// ------------------------------------------------------------------ rank 16 correspondences

/// (U+M+<-6d>)': glue m + w/3 with the first η-combination m making it even and integral.
pub fn um_prime(d: i64) -> Result<Lattice> {
    if d < 1 {
        return Err(LatticeError::Param("d must be positive".into()));
    }
    let base = atlas::um().direct_sum(&atlas::rank1(-6 * d));
    let x = frame3();
    // η's in the atlas U+M basis
    let ns_um = um_coords()?;
    let etas: Vec<Vec<Q>> = (1..=4)
        .map(|i| {
            let c = x.ns.coords.solve_left(x.syms.get(&format!("eta{i}")).unwrap()).unwrap();
            ns_um.solve_left(&c).unwrap()
        })
        .collect();
    let g = base.gram_q();
    for code in 1..81 {
        let mut m = vec![Q::zero(); 15];
        let mut c = code;
        for e in &etas {
            let k = q((c % 3) as i64);
            c /= 3;
            for (i, v) in e.iter().enumerate() {
                m[i] += &k * v;
            }
        }
        m[14] = qf(1, 3);
        let nm = g.form(&m, &m);
        if (nm / q(2)).is_integer() && g.left_apply(&m).iter().all(|v| v.is_integer()) {
            return Ok(overlattice(&base, &[m])?.lattice.renamed(format!("(U+M+<{}>)'", -6 * d)));
        }
    }
    Err(LatticeError::Param(format!("no index 3 glue for d = {d}")))
}

/// Rows: the U+M basis of the atlas (F, S, M.., M_hat in place of M1_6) in NS coordinates of frame3.
fn um_coords() -> Result<QMatrix> {
    let x = frame3();
    let mut rows = Vec::new();
    for n in ["F", "S"] {
        rows.push(x.syms.get(n).unwrap().clone());
    }
    for j in 1..=6 {
        if j < 6 {
            rows.push(x.syms.get(&format!("M1_{j}")).unwrap().clone());
        } else {
            rows.push(x.syms.get("M_hat").unwrap().clone());
        }
        rows.push(x.syms.get(&format!("M2_{j}")).unwrap().clone());
    }
    // atlas order: M1_1, M2_1, ..., with M_hat in slot of M1_6
    let in_ns: Vec<Vec<Q>> = rows.iter().map(|r| x.ns.coords.solve_left(r).unwrap()).collect();
    let m = QMatrix::from_rows(in_ns, 14);
    let g = x.ns.gram();
    check(m.mul(&g).mul(&m.transpose()) == atlas::um().gram_q(), || "U+M basis mismatch".into())?;
    Ok(m)
}

#[derive(Clone, Debug, Serialize)]
pub struct Rank16Case {
    pub d: i64,
    pub e: i64,
    pub x_det: String,
    pub y_det: String,
    pub both_even: bool,
    pub signatures_ok: bool,
    /// Discriminant forms of the two sides: "isomorphic", "different" or "inconclusive".
    pub forms: String,
    pub uniqueness: bool,
}

pub fn rank16_case(d: i64, e: i64) -> Result<Rank16Case> {
    let lx = um_prime(d)?.direct_sum(&atlas::rank1(-2 * e));
    let ly = um_prime(e)?.direct_sum(&atlas::rank1(-2 * d));
    let (fx, fy) = (discriminant_form(&lx)?, discriminant_form(&ly)?);
    let v = fqf_isomorphic(&fx, &fy);
    let forms = if v.is_isomorphic() {
        "isomorphic"
    } else if v.is_inconclusive() {
        "inconclusive"
    } else {
        "different"
    };
    Ok(Rank16Case {
        d,
        e,
        x_det: lx.det().to_string(),
        y_det: ly.det().to_string(),
        both_even: lx.is_even() && ly.is_even(),
        signatures_ok: lx.signature() == Some((1, 15)) && ly.signature() == Some((1, 15)),
        forms: forms.into(),
        uniqueness: uniqueness_criterion(&lx) && uniqueness_criterion(&ly),
    })
}
