//! The double cover X -> Y on cohomology, elliptic fibrations and the Weierstrass models.

use k3lat_core::arith::{fmt_q, parse_q, q, qf, Q, Z};
use k3lat_core::atlas;
use k3lat_core::fibration::{glue_chain, height, mwl_discriminant, Direction, Fiber, FibrationConfig, SectionData};
use k3lat_core::k3::{self, Family};
use k3lat_core::poly::Poly;
use k3lat_core::specialize::rank11_fibration;
use k3lat_core::weierstrass::{discriminant_multiplicities, fibers_exchange, quotient_weierstrass};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The involution swaps the two E8 blocks of U^3 + E8 + E8.
fn swap_e8(v: &[Q]) -> Vec<Q> {
    let mut w = v.to_vec();
    for k in 0..8 {
        w.swap(6 + k, 14 + k);
    }
    w
}

#[test]
fn pullback_of_pushforward_is_the_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sigma = k3::sigma_star();
    for _ in 0..50 {
        let a: Vec<Q> = (0..22).map(|_| q(rng.gen_range(-5..=5))).collect();
        let back = k3::pi_upper_star(&k3::pi_star(&a));
        let trace: Vec<Q> = a.iter().zip(swap_e8(&a)).map(|(x, y)| x + y).collect();
        assert_eq!(back, trace);
        assert_eq!(sigma.apply(&a), swap_e8(&a));
    }
}

#[test]
fn pushforward_multiplies_the_form_by_two_on_invariants() {
    let lam = atlas::lambda_k3().gram_q();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let y = k3::y_base().gram_q();
    for _ in 0..20 {
        let a: Vec<Q> = (0..22).map(|_| q(rng.gen_range(-3..=3))).collect();
        let inv: Vec<Q> = a.iter().zip(swap_e8(&a)).map(|(x, y)| x + y).collect();
        let p = k3::pi_star(&inv);
        assert_eq!(y.form(&p, &p), lam.form(&inv, &inv) * q(2));
    }
}

/// Laplace expansion, used as an independent determinant.
fn cofactor_det(m: &[Vec<i64>]) -> i64 {
    if m.is_empty() {
        return 1;
    }
    (0..m.len())
        .filter(|&j| m[0][j] != 0)
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..].iter().map(|r| [&r[..j], &r[j + 1..]].concat()).collect();
            (if j % 2 == 0 { 1 } else { -1 }) * m[0][j] * cofactor_det(&minor)
        })
        .sum()
}

#[test]
fn matrix_m_determinant() {
    let m = k3::matrix_m();
    let rows: Vec<Vec<i64>> = m.to_rows().iter().map(|r| r.iter().map(|x| x.try_into().unwrap()).collect()).collect();
    assert_eq!(m.det(), Z::from(cofactor_det(&rows)));
    assert!(!m.det().is_zero());
}

#[test]
fn generic_member_has_picard_ten() {
    let r = k3::quotient_ns(&[]).unwrap();
    assert!(r.routes_agree);
    assert_eq!(r.ns_x.rank(), 10);
    assert_eq!(r.t_x.rank(), 12);
    assert_eq!(r.ns_y.rank() + r.t_y.rank(), 22);
    assert_eq!(r.ns_x.det().abs(), atlas::un().det().abs());
}

#[test]
fn glue_chain_four() {
    let g = glue_chain(4, Direction::Forward).unwrap();
    // A_n has determinant (-1)^n (n+1)
    assert_eq!(g.det_big, Z::from(-8));
    assert_eq!(g.det_small.abs(), Z::from(4 * 4 * 8));
    assert_eq!(g.index, Z::from(4));
    assert_eq!(g.epsilon_norm, q(-2));
    glue_chain(4, Direction::Backward).unwrap();
}

#[test]
fn local_corrections() {
    for n in 2..9u32 {
        for i in 0..n {
            assert_eq!(Fiber::I(n).contr(i).unwrap(), qf(i64::from(i * (n - i)), i64::from(n)));
        }
    }
    assert_eq!(Fiber::III.contr(1).unwrap(), qf(1, 2));
}

#[test]
fn three_torsion_fibration_has_trivial_lattice() {
    // |d(Tr)| = 3^6, |tors| = 3, so a rank 0 fibration has |d(NS)| = 3^6 / 9 = 81.
    let cfg = FibrationConfig::new("6I3+6I1", &[3], 0, Some(14)).unwrap();
    assert_eq!(cfg.root_rank(), 12);
    assert_eq!(mwl_discriminant(&cfg, &Z::from(-81)).unwrap(), q(1));
    assert!(mwl_discriminant(&cfg, &Z::from(-243)).is_err());
}

#[test]
fn height_of_a_section_through_identity_components() {
    let cfg = FibrationConfig::new("8I2+8I1", &[2], 1, Some(11)).unwrap();
    let s = SectionData { dot_zero: 3, contacts: vec![0; 8] };
    assert_eq!(height(&cfg, &s).unwrap(), q(10));
    let t = SectionData { dot_zero: 0, contacts: vec![1, 1, 1, 1, 0, 0, 0, 0] };
    assert_eq!(height(&cfg, &t).unwrap(), q(2));
}

#[test]
fn rank11_generators_have_the_expected_heights() {
    for d in [3, 5, 8] {
        let f = rank11_fibration(Family::L, d).unwrap();
        assert_eq!(f.mw_rank, 1);
        assert_eq!(f.mwl_discriminant, (2 * d).to_string());
        let g = f.generator.as_ref().unwrap();
        assert_eq!(g.dot_s, (d - 2).to_string());
        assert_eq!(g.dot_t, d.to_string());
        // through identity components only: h = 4 + 2(d - 2)
        assert_eq!(f.generator_section.unwrap().height_formula, (2 * d).to_string());
    }
    let l1 = rank11_fibration(Family::L, 1).unwrap();
    assert_eq!((l1.fibres.as_str(), l1.torsion.as_slice(), l1.mw_rank), ("9I2+6I1", &[2u32][..], 0));
}

fn poly_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn eval(p: &[Q], t: &Q) -> Q {
    p.iter().rev().fold(Q::zero(), |acc, c| acc * t + c)
}

/// Real roots of p located by sign changes on a grid of step 1/4 over [-20, 20].
fn sign_changes(p: &[Q]) -> usize {
    let pts: Vec<Q> = (-80..=80).map(|k| qf(k, 4)).collect();
    pts.windows(2).filter(|w| eval(p, &w[0]).is_positive() != eval(p, &w[1]).is_positive()).count()
}

#[test]
fn weierstrass_with_eight_split_nodes() {
    // b = t(t-1)...(t-7), a = 1: disc ~ b^2 (1 - 4b)
    let mut b = vec![q(1)];
    for r in 0..8 {
        b = poly_mul(&b, &[q(-r), q(1)]);
    }
    let one_minus_4b: Vec<Q> = b.iter().enumerate().map(|(i, c)| if i == 0 { q(1) - c * q(4) } else { -c * q(4) }).collect();
    // eight real sign changes for a degree 8 polynomial: square-free, all roots simple
    assert_eq!(sign_changes(&one_minus_4b), 8);
    let bs = b.iter().map(fmt_q).collect::<Vec<_>>().join(",");
    let (a, b) = (Poly::parse("1").unwrap(), Poly::parse(&bs).unwrap());
    let f = discriminant_multiplicities(&a, &b).unwrap();
    assert_eq!(f.label(), "8I2+8I1");
    assert_eq!(f.euler(), 24);
    let (qa, qb) = quotient_weierstrass(&a, &b).unwrap();
    assert_eq!(qa.coeffs(), &[q(-2)]);
    assert_eq!(qb.coeffs(), &one_minus_4b[..]);
    let g = discriminant_multiplicities(&qa, &qb).unwrap();
    assert_eq!(g.label(), "8I2+8I1");
    assert!(fibers_exchange(&f, &g));
}

#[test]
fn rational_parsing_round_trips() {
    for s in ["0", "-3", "7/2", "-1/12"] {
        assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
    }
    assert!(parse_q("1/0").is_none());
}
