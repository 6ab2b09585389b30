//! Seeded randomized trials of the core operations against independent oracles.
//!
//! Every trial draws its input from a ChaCha stream, so a (seed, trials) pair always
//! replays the same inputs.

use crate::arith::{q, Q, Z};
use crate::atlas;
use crate::discriminant::{discriminant_form, fqf_isomorphic};
use crate::enumerate::roots;
use crate::lattice::Lattice;
use crate::matrix::{QMatrix, ZMatrix};
use crate::normal_form::smith_normal_form;
use crate::overlattice::overlattice;
use crate::sublattice::{orthogonal_complement, saturation, Sublattice};
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::sync::Arc;

pub const DEFAULT_SEED: u64 = 0x6b33_6c61;
pub const DEFAULT_TRIALS: usize = 200;

#[derive(Clone, Debug, Serialize)]
pub struct PropertyOutcome {
    pub property: String,
    pub trials: usize,
    pub failures: usize,
    /// Description of the first failing input, if any.
    pub first_failure: Option<String>,
}

pub const PROPERTIES: [&str; 5] = [
    "overlattice-det-identity",
    "saturation-idempotent",
    "complement-double-dual",
    "basis-change-invariance",
    "root-type-oracle",
];

fn ambients() -> Vec<Lattice> {
    vec![
        atlas::e8(),
        atlas::u().direct_sum(&atlas::e8()),
        atlas::a_n(3).direct_sum(&atlas::rank1(-2)).direct_sum(&atlas::u()),
        atlas::d_n(4),
        atlas::nikulin(),
        atlas::u().direct_sum(&atlas::u().scaled(2)).direct_sum(&atlas::a_n(2)),
        atlas::rank1(4).direct_sum(&atlas::rank1(-6)),
        atlas::a_n(5),
    ]
}

fn pick_ambient(rng: &mut ChaCha8Rng) -> Lattice {
    let a = ambients();
    let i = rng.gen_range(0..a.len());
    a[i].clone()
}

/// A unimodular matrix from random elementary operations.
pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize, ops: usize) -> ZMatrix {
    let mut m = ZMatrix::identity(n);
    if n < 2 {
        if rng.gen_bool(0.5) {
            m.negate_row(0);
        }
        return m;
    }
    for _ in 0..ops {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        match rng.gen_range(0..4) {
            0 => m.swap_rows(i, j),
            1 => m.negate_row(i),
            _ => {
                let c: i64 = if rng.gen_bool(0.5) { 1 } else { -1 } * rng.gen_range(1..=2);
                m.add_row_multiple(i, j, &Z::from(c));
            }
        }
    }
    m
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize, r: i64) -> Vec<Q> {
    (0..n).map(|_| q(rng.gen_range(-r..=r))).collect()
}

fn transformed(l: &Lattice, p: &ZMatrix, name: &str) -> Lattice {
    let g = p.mul(l.gram()).mul(&p.transpose());
    Lattice::new(name, g).expect("congruent Gram is symmetric")
}

fn fmt_rows(m: &ZMatrix) -> String {
    format!("{:?}", m.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
}

/// L = P·A with P = U1·D·U2; the ambient A is recovered from L by the glue rows of P⁻¹.
/// Oracle: the index is the product of the diagonal entries of D.
fn overlattice_trial(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let a = pick_ambient(rng);
    let n = a.rank();
    let mut d = vec![Z::from(1); n];
    let mut expect = Z::from(1);
    for _ in 0..rng.gen_range(1..=2) {
        let i = rng.gen_range(0..n);
        let f = Z::from(rng.gen_range(2..=3));
        expect *= &f;
        d[i] *= f;
    }
    let p = random_unimodular(rng, n, 3 * n).mul(&ZMatrix::diag(&d)).mul(&random_unimodular(rng, n, 3 * n));
    let l = transformed(&a, &p, "L");
    let pinv = p.to_q().inverse().ok_or("singular P")?;
    let glue: Vec<Vec<Q>> = pinv.to_rows();
    let over = overlattice(&l, &glue).map_err(|e| format!("{}: {e}", a.name))?;
    let ok = over.index == expect
        && over.lattice.det() * &expect * &expect == l.det()
        && over.lattice.det() == a.det();
    if ok {
        Ok(())
    } else {
        Err(format!("{} P={} index {} expected {}", a.name, fmt_rows(&p), over.index, expect))
    }
}

fn random_sub(rng: &mut ChaCha8Rng, a: &Arc<Lattice>) -> Sublattice {
    let n = a.rank();
    let k = rng.gen_range(1..n.max(2));
    let rows: Vec<Vec<Q>> = (0..k)
        .map(|_| {
            let v = random_vector(rng, n, 2);
            let s = q(rng.gen_range(1..=3));
            v.iter().map(|x| x * &s).collect()
        })
        .collect();
    Sublattice::from_rows(a.clone(), rows).expect("dimensions match")
}

fn same_span(a: &Sublattice, b: &Sublattice) -> bool {
    let (ra, rb) = (a.coords.rows(), b.coords.rows());
    (0..ra).all(|i| b.contains(a.coords.row(i))) && (0..rb).all(|i| a.contains(b.coords.row(i)))
}

fn saturation_trial(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let a = Arc::new(pick_ambient(rng));
    let s = random_sub(rng, &a);
    let once = saturation(&s);
    let twice = saturation(&once.sub);
    let contains = (0..s.generators()).all(|i| once.sub.contains(s.coords.row(i)));
    let ok = twice.index == q(1) && same_span(&once.sub, &twice.sub) && contains && once.sub.rank() == s.rank();
    if ok {
        Ok(())
    } else {
        Err(format!("{} generators {:?}", a.name, s.coords))
    }
}

fn complement_trial(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let a = Arc::new(pick_ambient(rng));
    let s = random_sub(rng, &a);
    let c = orthogonal_complement(&s);
    let cc = orthogonal_complement(&c);
    let sat = saturation(&s).sub;
    let ok = c.rank() + s.rank() == a.rank() && same_span(&cc, &sat);
    if ok {
        Ok(())
    } else {
        Err(format!("{} generators {:?}", a.name, s.coords))
    }
}

fn basis_change_trial(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let a = pick_ambient(rng);
    let n = a.rank();
    let u = random_unimodular(rng, n, 4 * n);
    let b = transformed(&a, &u, "L'");
    let (ia, ib) = (a.invariants(), b.invariants());
    let snf_a = smith_normal_form(a.gram()).invariant_factors();
    let snf_b = smith_normal_form(b.gram()).invariant_factors();
    let forms = match (discriminant_form(&a), discriminant_form(&b)) {
        (Ok(x), Ok(y)) => fqf_isomorphic(&x, &y).is_isomorphic(),
        _ => false,
    };
    if ia == ib && snf_a == snf_b && forms {
        Ok(())
    } else {
        Err(format!("{} U={}", a.name, fmt_rows(&u)))
    }
}

/// Vectors of norm -2 in a negative definite lattice by a box search. The box half-widths
/// come from the diagonal of the inverse Gram: |x_i|² <= 2·(-G)⁻¹_ii.
fn brute_roots(l: &Lattice) -> Vec<Vec<i64>> {
    let n = l.rank();
    let inv = l.gram_q().scale(&q(-1)).inverse().expect("definite");
    let w: Vec<i64> = (0..n)
        .map(|i| {
            let b = (&inv[(i, i)] * q(2)).to_f64().unwrap_or(0.0);
            b.sqrt().floor() as i64 + 1
        })
        .collect();
    let g: Vec<Vec<i64>> = l.gram().to_rows().iter().map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect()).collect();
    let mut out = Vec::new();
    let mut x: Vec<i64> = w.iter().map(|&b| -b).collect();
    loop {
        let mut norm = 0i64;
        for i in 0..n {
            for j in 0..n {
                norm += x[i] * g[i][j] * x[j];
            }
        }
        if norm == -2 {
            out.push(x.clone());
        }
        let mut k = 0;
        while k < n {
            if x[k] < w[k] {
                x[k] += 1;
                break;
            }
            x[k] = -w[k];
            k += 1;
        }
        if k == n {
            break;
        }
    }
    out
}

/// Random negative definite sublattices of E8 of rank <= 4, compared with a box search:
/// same number of roots, same rank and determinant of the root sublattice.
fn root_type_trial(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let e8 = Arc::new(atlas::e8());
    let r = rng.gen_range(1..=4);
    let rows: Vec<Vec<Q>> = loop {
        let rows: Vec<Vec<Q>> = (0..r)
            .map(|_| (0..8).map(|_| q(if rng.gen_bool(0.35) { rng.gen_range(-1..=1) } else { 0 })).collect())
            .collect();
        if QMatrix::from_rows(rows.clone(), 8).rank() == r {
            break rows;
        }
    };
    let s = Sublattice::from_rows(e8, rows).expect("dimensions");
    let g = s.basis().gram().to_z().ok_or("non-integral")?;
    let l = Lattice::new("L", g).map_err(|e| e.to_string())?;
    let brute = brute_roots(&l);
    let rt = crate::enumerate::root_type(&l).map_err(|e| e.to_string())?;
    let found = roots(&l).map_err(|e| e.to_string())?;
    let mut ok = found.len() * 2 == brute.len();
    if !brute.is_empty() {
        let amb = Arc::new(l.clone());
        let rr: Vec<Vec<Q>> = brute.iter().map(|v| v.iter().map(|&c| q(c)).collect()).collect();
        let span = Sublattice::from_rows(amb, rr).expect("dimensions").basis();
        let det = span.gram().det().abs();
        ok &= span.rank() == rt.rank() && det == Q::from(rt.det_abs());
    } else {
        ok &= rt.is_empty();
    }
    if ok {
        Ok(())
    } else {
        Err(format!("gram {:?}: {} roots by search, type {rt}", l.gram(), brute.len() / 2))
    }
}

pub fn run_property(name: &str, trials: usize, seed: u64) -> Option<PropertyOutcome> {
    let f: fn(&mut ChaCha8Rng) -> Result<(), String> = match name {
        "overlattice-det-identity" => overlattice_trial,
        "saturation-idempotent" => saturation_trial,
        "complement-double-dual" => complement_trial,
        "basis-change-invariance" => basis_change_trial,
        "root-type-oracle" => root_type_trial,
        _ => return None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut first = None;
    for _ in 0..trials {
        if let Err(e) = f(&mut rng) {
            failures += 1;
            first.get_or_insert(e);
        }
    }
    Some(PropertyOutcome { property: name.into(), trials, failures, first_failure: first })
}

pub fn run_all(trials: usize, seed: u64) -> Vec<PropertyOutcome> {
    use rayon::prelude::*;
    PROPERTIES.par_iter().map(|p| run_property(p, trials, seed).expect("registered")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_search_finds_a2_roots() {
        assert_eq!(brute_roots(&atlas::a_n(2)).len(), 6);
    }
}
