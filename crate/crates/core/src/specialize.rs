//! Elliptic fibrations read off a Néron-Severi lattice containing U = <F, S>, and the
//! specialization engine that enlarges NS(X) step by step inside H^2(X, Z).

use crate::arith::{fmt_q, q, qf, Q, Z};
use crate::enumerate::{classify_component, root_components, roots, RootType};
use crate::error::{LatticeError, Result};
use crate::expr::Symbols;
use crate::fibration::{height_by_projection, mwl_discriminant, project, Fiber, FibrationConfig};
use crate::k3::{self, frame, Family};
use crate::lattice::Lattice;
use crate::matrix::{vscale, vsub, QMatrix, ZMatrix};
use crate::normal_form::smith_normal_form;
use crate::sublattice::{orthogonal_complement, saturation, Sublattice};
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::sync::Arc;

/// A reducible fibre: simple roots in chain order (ambient coordinates).
#[derive(Clone, Debug)]
pub struct FibreRoots {
    pub letter: char,
    pub rank: usize,
    pub simple: Vec<Vec<Q>>,
}

impl FibreRoots {
    pub fn fiber(&self) -> Option<Fiber> {
        (self.letter == 'A').then_some(Fiber::I(self.rank as u32 + 1))
    }

    /// Euler number of the fibre, reading A_n as I_{n+1}.
    pub fn euler(&self) -> usize {
        match self.letter {
            'A' => self.rank + 1,
            _ => self.rank + 2,
        }
    }

    /// Kodaira symbol, reading A_n as I_{n+1}.
    pub fn kodaira(&self) -> String {
        match (self.letter, self.rank) {
            ('A', r) => format!("I{}", r + 1),
            ('D', r) => format!("I{}*", r - 4),
            ('E', 6) => "IV*".into(),
            ('E', 7) => "III*".into(),
            ('E', 8) => "II*".into(),
            (l, r) => format!("{l}{r}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FibrationAnalysis {
    pub ambient: Arc<Lattice>,
    pub f: Vec<Q>,
    pub s: Vec<Q>,
    pub rho: usize,
    pub ns_det: Z,
    pub root_type: RootType,
    pub fibres: Vec<FibreRoots>,
    /// Basis of Tr = <F, S> + roots, ambient coordinates.
    pub tr: QMatrix,
    pub tr_sat: QMatrix,
    /// Invariant factors of sat(Tr)/Tr.
    pub torsion: Vec<u32>,
    pub mw_rank: usize,
    pub irreducible_singular: usize,
    pub config: Option<FibrationConfig>,
    pub mwl: std::result::Result<Q, String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectionReport {
    pub norm: String,
    pub f_degree: String,
    pub dot_zero: String,
    /// Component met on each reducible fibre, up to the symmetry i <-> n - i.
    pub contacts: Vec<u32>,
    pub height_formula: String,
    pub height_projection: String,
}

fn lex_positive(v: &[Z]) -> bool {
    v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_positive())
}

/// Simple roots of an irreducible root system from its roots (coordinates in some basis),
/// ordered as a chain for type A.
fn simple_roots(g: &ZMatrix, rs: &[Vec<Z>]) -> Vec<Vec<Z>> {
    let pos: Vec<Vec<Z>> = rs.iter().map(|r| if lex_positive(r) { r.clone() } else { r.iter().map(|x| -x).collect() }).collect();
    let set: std::collections::HashSet<Vec<Z>> = pos.iter().cloned().collect();
    let simple: Vec<Vec<Z>> = pos
        .iter()
        .filter(|r| {
            !pos.iter().any(|a| {
                let b: Vec<Z> = r.iter().zip(a).map(|(x, y)| x - y).collect();
                set.contains(&b)
            })
        })
        .cloned()
        .collect();
    let k = simple.len();
    let pair = |i: usize, j: usize| g.form(&simple[i], &simple[j]);
    let deg: Vec<usize> = (0..k).map(|i| (0..k).filter(|&j| j != i && !pair(i, j).is_zero()).count()).collect();
    if k <= 1 || deg.iter().any(|&d| d > 2) {
        return simple;
    }
    let mut order = vec![(0..k).find(|&i| deg[i] == 1).unwrap()];
    while order.len() < k {
        let last = *order.last().unwrap();
        let next = (0..k).find(|&j| !order.contains(&j) && !pair(last, j).is_zero()).unwrap();
        order.push(next);
    }
    order.into_iter().map(|i| simple[i].clone()).collect()
}

/// Index of sat(L)/L as invariant factors, for L spanned by the (independent) rows of m.
pub fn quotient_invariants(ambient: &Arc<Lattice>, m: &QMatrix) -> (QMatrix, Vec<Z>) {
    let sat = saturation(&Sublattice::new(ambient.clone(), m.clone()).unwrap()).sub.coords;
    let rows: Vec<Vec<Q>> = (0..m.rows()).map(|i| sat.solve_left(m.row(i)).expect("inside the saturation")).collect();
    let zm = QMatrix::from_rows(rows, sat.rows()).to_z().expect("integral coordinates");
    let inv = smith_normal_form(&zm).invariant_factors().into_iter().filter(|d| !d.is_one()).map(|d| d.abs()).collect();
    (sat, inv)
}

/// Reads the fibration with fibre F and zero section S off the primitive sublattice ns.
pub fn analyze(ns: &Sublattice, f: &[Q], s: &[Q]) -> Result<FibrationAnalysis> {
    let ambient = ns.ambient.clone();
    let nb = ns.basis();
    let nsl = Arc::new(nb.lattice("NS")?);
    let fs = [f, s].map(|v| nb.coords.solve_left(v).ok_or_else(|| LatticeError::NotIntegral("F or S outside NS".into())));
    let (fc, sc) = (fs[0].clone()?, fs[1].clone()?);
    let r = orthogonal_complement(&Sublattice::from_rows(nsl.clone(), vec![fc, sc])?);
    let to_ambient = |rcoords: &[Z]| -> Vec<Q> {
        let rq: Vec<Q> = rcoords.iter().map(|x| Q::from_integer(x.clone())).collect();
        nb.coords.left_apply(&r.coords.left_apply(&rq))
    };
    let mut fibres = Vec::new();
    let mut root_type = RootType::default();
    if r.rank() > 0 {
        let rl = r.lattice("R")?;
        if rl.definiteness() != Some(-1) {
            return Err(LatticeError::SelfCheck("complement of U in NS is not negative definite".into()));
        }
        let rs = roots(&rl)?;
        for comp in root_components(&rl, &rs) {
            let cr: Vec<Vec<Z>> = comp.iter().map(|&i| rs[i].clone()).collect();
            let rank = ZMatrix::from_rows(cr.clone(), rl.rank()).to_q().rank();
            let (letter, rk) = classify_component(2 * cr.len(), rank)
                .ok_or_else(|| LatticeError::SelfCheck("unclassifiable root component".into()))?;
            root_type.add(letter, rk, 1);
            let simple = simple_roots(rl.gram(), &cr);
            fibres.push(FibreRoots { letter, rank: rk, simple: simple.iter().map(|v| to_ambient(v)).collect() });
        }
        fibres.sort_by(|a, b| (b.rank, b.letter).cmp(&(a.rank, a.letter)));
    }
    let mut tr_rows = vec![f.to_vec(), s.to_vec()];
    for fr in &fibres {
        tr_rows.extend(fr.simple.iter().cloned());
    }
    let n = ambient.rank();
    let tr = QMatrix::from_rows(tr_rows, n);
    let (tr_sat, inv) = quotient_invariants(&ambient, &tr);
    let torsion: Vec<u32> = inv.iter().map(|d| d.to_string().parse().unwrap()).collect();
    let rho = nb.generators();
    let roots_rank: usize = fibres.iter().map(|f| f.rank).sum();
    let mw_rank = rho - 2 - roots_rank;
    let semistable: Option<Vec<Fiber>> = fibres.iter().map(|f| f.fiber()).collect();
    let euler: usize = fibres.iter().map(|f| f.euler()).sum();
    let irreducible_singular = 24usize.saturating_sub(euler);
    let ns_det = nsl.det();
    let (config, mwl) = match semistable {
        Some(mut fl) if euler <= 24 => {
            fl.extend(std::iter::repeat_n(Fiber::I(1), irreducible_singular));
            let cfg = FibrationConfig { fibers: fl, mw_torsion: torsion.clone(), mw_rank, rho: Some(rho) };
            let m = mwl_discriminant(&cfg, &ns_det).map_err(|e| e.to_string());
            (Some(cfg), m)
        }
        _ => (None, Err("non-semistable fibres".to_string())),
    };
    Ok(FibrationAnalysis {
        ambient,
        f: f.to_vec(),
        s: s.to_vec(),
        rho,
        ns_det,
        root_type,
        fibres,
        tr,
        tr_sat,
        torsion,
        mw_rank,
        irreducible_singular,
        config,
        mwl,
    })
}

impl FibrationAnalysis {
    /// "I8+3I4+2I2" (irreducible singular fibres omitted).
    pub fn fibre_label(&self) -> String {
        let mut counts: std::collections::BTreeMap<String, usize> = Default::default();
        let mut order = Vec::new();
        for f in &self.fibres {
            let name = f.kodaira();
            if !counts.contains_key(&name) {
                order.push(name.clone());
            }
            *counts.entry(name).or_insert(0) += 1;
        }
        let parts: Vec<String> =
            order.iter().map(|n| if counts[n] == 1 { n.clone() } else { format!("{}{}", counts[n], n) }).collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }

    /// Full configuration including the I1 fibres.
    pub fn full_label(&self) -> String {
        let mut l = self.fibre_label();
        if self.irreducible_singular > 0 {
            l = if l == "0" { String::new() } else { l + "+" };
            l += &format!("{}I1", self.irreducible_singular);
        }
        l
    }

    pub fn torsion_order(&self) -> u32 {
        self.torsion.iter().product()
    }

    /// Intersection data and both height computations for a class P.
    pub fn section(&self, p: &[Q]) -> Result<SectionReport> {
        let g = self.ambient.gram_q();
        let pair = |a: &[Q], b: &[Q]| g.form(a, b);
        let mut contacts = Vec::new();
        let mut h = q(4) + q(2) * pair(p, &self.s);
        for fr in &self.fibres {
            let n = fr.rank + 1;
            let b = QMatrix::from_rows(fr.simple.clone(), g.rows());
            let pr = project(&g, &b, p);
            let contr = -g.form(&pr, &pr);
            if fr.letter == 'A' {
                let y = b.solve_left(&pr).expect("projection lies in the span");
                let i = (-&y[0] * q(n as i64)).to_integer();
                let i: u32 = crate::arith::z_mod(&i, &Z::from(n as i64)).to_string().parse().unwrap();
                let f = Fiber::I(n as u32);
                if f.contr(i)? != contr {
                    return Err(LatticeError::SelfCheck("local correction disagrees with the contact".into()));
                }
                contacts.push(i);
            }
            h -= contr;
        }
        let hp = height_by_projection(&g, &self.tr, p);
        Ok(SectionReport {
            norm: fmt_q(&pair(p, p)),
            f_degree: fmt_q(&pair(p, &self.f)),
            dot_zero: fmt_q(&pair(p, &self.s)),
            contacts,
            height_formula: fmt_q(&h),
            height_projection: fmt_q(&hp),
        })
    }

    /// P lies in sat(Tr): a torsion section class.
    pub fn is_torsion_class(&self, p: &[Q]) -> bool {
        self.tr_sat.solve_left(p).is_some_and(|c| c.iter().all(|x| x.is_integer()))
    }

    /// P lies in Tr itself.
    pub fn in_trivial_lattice(&self, p: &[Q]) -> bool {
        let b = Sublattice::new(self.ambient.clone(), self.tr.clone()).unwrap();
        b.contains(p)
    }
}

// ------------------------------------------------------------------ the K3 frame

/// Names used when printing classes of the order 2 frame.
pub const FRAME_NAMES: [&str; 22] = [
    "F", "S", "N_1", "N_2", "N_3", "N_4", "N_5", "N_6", "N_7", "N_8", "t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8",
    "t9", "t10", "t11", "t12",
];

/// Frame symbols plus V1..V5, W1..W5, T (the 2-torsion section) and N_hat, in Λ coordinates.
pub fn frame_symbols() -> Symbols {
    let x = frame();
    let mut s = x.syms.clone();
    for (i, (v, w)) in k3::THETA.iter().enumerate() {
        let tv = k3::t_symbols().eval(v).unwrap();
        let tw = k3::t_symbols().eval(w).unwrap();
        s.insert(&format!("V{}", i + 1), x.t_to_lambda(&tv));
        s.insert(&format!("W{}", i + 1), x.t_to_lambda(&tw));
    }
    s.define("T", "2F+S-N_hat").unwrap();
    s
}

pub fn express_lambda(v: &[Q]) -> String {
    frame().syms.express(&FRAME_NAMES, v).unwrap_or_else(|| "?".into())
}

#[derive(Clone, Debug, Serialize)]
pub struct StepReport {
    pub step: usize,
    pub added: Vec<String>,
    pub rho: usize,
    pub ns_det: String,
    pub t_det: String,
    pub t_gram: Option<Vec<Vec<String>>>,
    /// [NS_k : NS_{k-1} + added]
    pub index: String,
    /// Generators of NS_k / (NS_{k-1} + added), with their orders.
    pub divisible: Vec<(String, String)>,
    pub root_type: String,
    pub fibres: String,
    pub torsion: Vec<u32>,
    pub mw_rank: usize,
    pub mwl_discriminant: String,
    /// The frame's torsion section stays a torsion class of height 0.
    pub torsion_section_kept: bool,
}

#[derive(Clone, Debug)]
pub struct ChainState {
    pub ns: Sublattice,
    pub t: Sublattice,
    pub analysis: FibrationAnalysis,
}

/// What the engine needs from a K3 frame: the starting NS, the transcendental lattice
/// with its embedding, the classes F and S, and a torsion section to follow.
pub struct ChainFrame {
    pub ns0: Sublattice,
    pub t_lattice: Lattice,
    /// Rows: images of the t basis in ambient coordinates.
    pub t_embedding: QMatrix,
    pub f: Vec<Q>,
    pub s: Vec<Q>,
    pub torsion_section: Vec<Q>,
    pub max_added: usize,
    pub express: Box<dyn Fn(&[Q]) -> String + Send + Sync>,
}

impl ChainFrame {
    pub fn order2() -> ChainFrame {
        let x = frame();
        let syms = frame_symbols();
        let get = |n: &str| syms.get(n).unwrap().clone();
        let emb: Vec<Vec<Q>> = (0..12).map(|i| x.t_to_lambda(&crate::matrix::unit(12, i))).collect();
        ChainFrame {
            ns0: saturation(&x.phi_ns).sub,
            t_lattice: crate::atlas::t_x_std(),
            t_embedding: QMatrix::from_rows(emb, 22),
            f: get("F"),
            s: get("S"),
            torsion_section: get("T"),
            max_added: 10,
            express: Box::new(express_lambda),
        }
    }

    fn t_to_ambient(&self, v: &[Q]) -> Vec<Q> {
        self.t_embedding.left_apply(v)
    }

    fn express_t(&self, v: &[Q]) -> String {
        let names = self.t_lattice.labels().map(|l| l.to_vec()).unwrap_or_else(|| crate::atlas::labels("t", v.len()));
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        crate::expr::format_combination(&refs, v)
    }
}

/// Runs the order 2 specialization chain; steps are lists of classes in t coordinates.
pub fn specialize(steps: &[Vec<Vec<Q>>]) -> Result<(Vec<StepReport>, ChainState)> {
    specialize_in(&ChainFrame::order2(), steps)
}

pub fn specialize_in(fr: &ChainFrame, steps: &[Vec<Vec<Q>>]) -> Result<(Vec<StepReport>, ChainState)> {
    let n = fr.ns0.ambient.rank();
    let tn = fr.t_lattice.rank();
    let mut ns = fr.ns0.clone();
    let mut added_t: Vec<Vec<Q>> = Vec::new();
    let mut reports = Vec::new();
    let mut last = None;
    for (k, step) in steps.iter().enumerate() {
        if step.iter().any(|v| v.len() != tn) {
            return Err(LatticeError::Dimension(format!("step {} needs vectors of length {tn}", k + 1)));
        }
        added_t.extend(step.iter().cloned());
        if added_t.len() > fr.max_added {
            return Err(LatticeError::Param(format!("more than {} classes added", fr.max_added)));
        }
        let g = fr.t_lattice.gram_of(&QMatrix::from_rows(added_t.clone(), tn));
        let gl = Lattice::new("Θ", g.to_z().ok_or_else(|| LatticeError::NotIntegral("Θ gram".into()))?)?;
        if gl.definiteness() != Some(-1) {
            return Err(LatticeError::Indefinite);
        }
        let new: Vec<Vec<Q>> = step.iter().map(|v| fr.t_to_ambient(v)).collect();
        let span = ns.with_rows(&QMatrix::from_rows(new, n)).basis();
        let sat = saturation(&span);
        // generators of sat/span from the SNF, reduced to fractional parts over span
        let rows: Vec<Vec<Q>> = (0..span.generators()).map(|i| sat.sub.coords.solve_left(span.coords.row(i)).unwrap()).collect();
        let zm = QMatrix::from_rows(rows, sat.sub.generators()).to_z().unwrap();
        let snf = smith_normal_form(&zm);
        let gens = snf.v.to_q().inverse().unwrap().mul(&sat.sub.coords);
        let mut divisible = Vec::new();
        for (i, d) in snf.diagonal().iter().enumerate() {
            if d.abs() > Z::one() {
                let c = span.coords.solve_left(gens.row(i)).unwrap();
                let frac: Vec<Q> = c.iter().map(|x| x - x.floor()).collect();
                let rep = span.coords.left_apply(&frac);
                divisible.push(((fr.express)(&rep), d.abs().to_string()));
            }
        }
        ns = sat.sub;
        let t = orthogonal_complement(&ns);
        let tl = t.lattice("T")?;
        let analysis = analyze(&ns, &fr.f, &fr.s)?;
        let kept = analysis.is_torsion_class(&fr.torsion_section)
            && analysis.section(&fr.torsion_section).map(|r| r.height_projection == "0").unwrap_or(false);
        reports.push(StepReport {
            step: k + 1,
            added: step.iter().map(|v| fr.express_t(v)).collect(),
            rho: analysis.rho,
            ns_det: analysis.ns_det.to_string(),
            t_det: tl.det().to_string(),
            t_gram: (tl.rank() <= 4).then(|| tl.gram().to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()),
            index: fmt_q(&sat.index),
            divisible,
            root_type: analysis.root_type.to_string(),
            fibres: analysis.full_label(),
            torsion: analysis.torsion.clone(),
            mw_rank: analysis.mw_rank,
            mwl_discriminant: match &analysis.mwl {
                Ok(v) => fmt_q(v),
                Err(e) => format!("error: {e}"),
            },
            torsion_section_kept: kept,
        });
        last = Some(ChainState { ns: ns.clone(), t, analysis });
    }
    let state = match last {
        Some(s) => s,
        None => {
            let t = orthogonal_complement(&ns);
            let analysis = analyze(&ns, &fr.f, &fr.s)?;
            ChainState { ns, t, analysis }
        }
    };
    Ok((reports, state))
}

/// The five steps {V_i, W_i}.
pub fn five_steps() -> Vec<Vec<Vec<Q>>> {
    let s = k3::t_symbols();
    k3::THETA.iter().map(|(v, w)| vec![s.eval(v).unwrap(), s.eval(w).unwrap()]).collect()
}

// ------------------------------------------------------------------ sections

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SectionKind {
    /// 2F + S - N_hat
    Torsion,
    /// The Mordell-Weil generator of the rank 11 family with parameter d.
    Generator(Family, i64),
    /// The new 2-torsion section after four steps.
    P,
    /// The new 4-torsion section after four steps.
    Q,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectionClass {
    pub name: String,
    pub expr: String,
    #[serde(skip)]
    pub lambda: Vec<Q>,
    pub norm: String,
    pub f_degree: String,
    pub dot_s: String,
    pub dot_t: String,
}

pub fn section_class(kind: &SectionKind) -> Result<SectionClass> {
    let mut syms = frame_symbols();
    let (name, expr) = match kind {
        SectionKind::Torsion => ("T".to_string(), "2F+S-N_hat".to_string()),
        SectionKind::Generator(fam, d) => {
            let v = frame().t_to_lambda(&k3::rank11_extra(*fam, *d)?);
            syms.insert("V", v);
            let e = match fam {
                Family::L => format!("{d}F+S+V"),
                Family::A => format!("{}F+S+(V-N_1-N_2)/2", fmt_q(&qf(2 + d, 4))),
                Family::B => format!("{}F+S+(V-N_1-N_2-N_3-N_4)/2", fmt_q(&qf(4 + d, 4))),
            };
            (format!("G_X({fam:?}, d={d})"), e)
        }
        SectionKind::P => ("P".into(), "2F+S-(W3+W4+V1+V2+V3+V4)/2".into()),
        SectionKind::Q => ("Q".into(), "2F+S-(-W1+2N_6-W2+2N_7-W3+2N_3-W4+2N_2+2V3+2V4)/4".into()),
    };
    // "3/2F" is not valid input; write rational coefficients as (a/b)*F by scaling
    let v = eval_with_fractions(&syms, &expr)?;
    if !v.iter().all(|c| c.is_integer()) {
        return Err(LatticeError::NotIntegral(format!("{name} = {expr}")));
    }
    let x = frame();
    let t = syms.get("T").unwrap();
    let (fv, sv) = (syms.get("F").unwrap(), syms.get("S").unwrap());
    let norm = x.pair(&v, &v);
    if norm != q(-2) {
        return Err(LatticeError::SelfCheck(format!("{name} has norm {norm}")));
    }
    let fd = x.pair(&v, fv);
    if !fd.is_one() {
        return Err(LatticeError::SelfCheck(format!("{name} has fibre degree {fd}")));
    }
    Ok(SectionClass {
        name,
        expr,
        norm: fmt_q(&norm),
        f_degree: fmt_q(&fd),
        dot_s: fmt_q(&x.pair(&v, sv)),
        dot_t: fmt_q(&x.pair(&v, t)),
        lambda: v,
    })
}

/// Accepts a leading rational coefficient "5/2F+...".
fn eval_with_fractions(s: &Symbols, e: &str) -> Result<Vec<Q>> {
    s.eval(e)
}

#[derive(Clone, Debug, Serialize)]
pub struct Rank11Fibration {
    pub family: Family,
    pub d: i64,
    pub root_type: String,
    pub fibres: String,
    pub torsion: Vec<u32>,
    pub mw_rank: usize,
    pub mwl_discriminant: String,
    pub generator: Option<SectionClass>,
    pub generator_section: Option<SectionReport>,
}

pub fn rank11_fibration(fam: Family, d: i64) -> Result<Rank11Fibration> {
    let syms = frame_symbols();
    let r = k3::quotient_ns(&[k3::rank11_extra(fam, d)?])?;
    let a = analyze(&r.ns_x_sub, syms.get("F").unwrap(), syms.get("S").unwrap())?;
    let (generator, generator_section) = if a.mw_rank > 0 {
        let g = section_class(&SectionKind::Generator(fam, d))?;
        let sr = a.section(&g.lambda)?;
        (Some(g), Some(sr))
    } else {
        (None, None)
    };
    Ok(Rank11Fibration {
        family: fam,
        d,
        root_type: a.root_type.to_string(),
        fibres: a.full_label(),
        torsion: a.torsion.clone(),
        mw_rank: a.mw_rank,
        mwl_discriminant: match &a.mwl {
            Ok(v) => fmt_q(v),
            Err(e) => format!("error: {e}"),
        },
        generator,
        generator_section,
    })
}

/// 2Q - S - T lies in the trivial lattice of the fourth step: Q + Q = T in the Mordell-Weil group.
pub fn q_doubles_to_t(state: &ChainState) -> Result<bool> {
    let syms = frame_symbols();
    let qv = section_class(&SectionKind::Q)?.lambda;
    let d = vsub(&vsub(&vscale(&qv, &q(2)), syms.get("S").unwrap()), syms.get("T").unwrap());
    Ok(state.analysis.in_trivial_lattice(&d))
}

