//! Lattice core and atlas against small independent oracles.

use k3lat_core::arith::{q, Z};
use k3lat_core::atlas::{self, NamedLatticeId};
use k3lat_core::discriminant::{discriminant_form, fqf_isomorphic, FiniteQuadraticForm};
use k3lat_core::enumerate::{definite_isometric, roots, short_vectors, uniqueness_criterion};
use k3lat_core::lattice::Lattice;
use k3lat_core::normal_form::smith_normal_form;
use k3lat_core::overlattice::overlattice;
use num_integer::Integer;
use num_traits::ToPrimitive;

fn rows(l: &Lattice) -> Vec<Vec<i64>> {
    l.gram().to_rows().iter().map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect()).collect()
}

/// Laplace expansion along the first row.
fn cofactor_det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .filter(|&j| m[0][j] != 0)
        .map(|j| {
            let minor: Vec<Vec<i64>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * m[0][j] * cofactor_det(&minor)
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors from determinantal divisors: e_k = d_k / d_{k-1}, d_k = gcd of k-minors.
fn invariant_factors_by_minors(m: &[Vec<i64>]) -> Vec<i64> {
    let n = m.len();
    let mut d = vec![1i64];
    for k in 1..=n {
        let mut g = 0i64;
        for r in subsets(n, k) {
            for c in subsets(n, k) {
                let minor: Vec<Vec<i64>> = r.iter().map(|&i| c.iter().map(|&j| m[i][j]).collect()).collect();
                g = g.gcd(&cofactor_det(&minor));
            }
        }
        d.push(g);
    }
    (1..=n).filter(|&k| d[k] != 0).map(|k| d[k] / d[k - 1]).collect()
}

fn zs(v: &[i64]) -> Vec<Z> {
    v.iter().map(|&x| Z::from(x)).collect()
}

#[test]
fn a3_determinant_matches_cofactor_expansion() {
    let a3 = atlas::a_n(3);
    assert_eq!(cofactor_det(&rows(&a3)), -4);
    assert_eq!(a3.det(), Z::from(-4));
}

#[test]
fn determinants_of_the_atlas_match_cofactor_expansion() {
    for name in ["E6", "E8", "N", "D_n:5", "U:3", "Lambda_d_a:6"] {
        let l = atlas::make(&NamedLatticeId::parse(name).unwrap()).unwrap();
        assert_eq!(l.det(), Z::from(cofactor_det(&rows(&l))), "{name}");
    }
}

#[test]
fn smith_form_matches_determinantal_divisors() {
    for l in [atlas::a_n(3), atlas::nikulin(), atlas::d_n(4), atlas::e6()] {
        let g = rows(&l);
        let got = smith_normal_form(l.gram()).invariant_factors();
        let got: Vec<Z> = got.into_iter().map(|x| num_traits::Signed::abs(&x)).collect();
        assert_eq!(got, zs(&invariant_factors_by_minors(&g)), "{}", l.name);
    }
    let n = smith_normal_form(atlas::nikulin().gram()).invariant_factors();
    assert_eq!(n, zs(&[1, 1, 2, 2, 2, 2, 2, 2]));
    assert_eq!(smith_normal_form(atlas::a_n(3).gram()).invariant_factors(), zs(&[1, 1, 4]));
}

/// Number of elements x of the form with q(x) = 0 mod 2, by enumeration.
fn isotropic_count(f: &FiniteQuadraticForm) -> usize {
    let ds: Vec<i64> = f.invariant_factors.iter().map(|d| d.to_i64().unwrap()).collect();
    let total: i64 = ds.iter().product();
    (0..total)
        .filter(|&k| {
            let mut i = k;
            let x: Vec<Z> = ds
                .iter()
                .map(|&d| {
                    let c = i % d;
                    i /= d;
                    Z::from(c)
                })
                .collect();
            let v = f.value(&x);
            (v / q(2)).is_integer()
        })
        .count()
}

#[test]
fn u2_is_not_the_diagonal_form() {
    let u2 = FiniteQuadraticForm::u(2);
    let diag = FiniteQuadraticForm::cyclic(2, q(1)).direct_sum(&FiniteQuadraticForm::cyclic(2, q(1)));
    assert_eq!(isotropic_count(&u2), 3);
    assert_eq!(isotropic_count(&diag), 2);
    assert!(!fqf_isomorphic(&u2, &diag).is_isomorphic());
    assert!(fqf_isomorphic(&u2, &u2).is_isomorphic());
}

#[test]
fn discriminant_of_e8_2_is_u2_to_the_fourth() {
    let e82 = atlas::e8().scaled(2);
    let f = discriminant_form(&e82).unwrap();
    assert_eq!(isotropic_count(&f), isotropic_count(&FiniteQuadraticForm::u(2).power(4)));
    assert!(fqf_isomorphic(&f, &FiniteQuadraticForm::u(2).power(4)).is_isomorphic());
}

#[test]
fn e8_has_240_roots() {
    // D8 contributes 4·C(8,2) = 112, the half-integral vectors with an even number of
    // minus signs another 2^7 = 128.
    let expected = 4 * 28 + (1 << 7);
    assert_eq!(roots(&atlas::e8()).unwrap().len() * 2, expected);
}

#[test]
fn nikulin_short_vectors_are_the_nodes() {
    let n = atlas::nikulin();
    let sv = short_vectors(&n, &Z::from(2)).unwrap();
    assert_eq!(sv.len(), 8);
    let g = n.gram_q();
    // N_1..N_7 are basis vectors, N_8 = 2 N_hat - (N_1+..+N_7)
    let mut nodes: Vec<Vec<k3lat_core::arith::Q>> =
        (0..7).map(|i| (0..8).map(|j| q(i64::from(i == j))).collect()).collect();
    nodes.push(atlas::nikulin_n8());
    for v in &sv {
        let vq: Vec<_> = v.iter().map(k3lat_core::arith::zq).collect();
        assert_eq!(g.form(&vq, &vq), q(-2));
        let neg: Vec<_> = vq.iter().map(|x| -x).collect();
        assert!(nodes.contains(&vq) || nodes.contains(&neg));
    }
}

/// Norm -2 vectors of a diagonal definite form by direct search.
fn diagonal_roots(d: &[i64]) -> usize {
    let mut c = 0;
    for x in -2i64..=2 {
        for y in -2i64..=2 {
            if d[0] * x * x + d[1] * y * y == -2 {
                c += 1;
            }
        }
    }
    c
}

#[test]
fn same_determinant_different_classes() {
    let a = atlas::rank1(-2).direct_sum(&atlas::rank1(-8));
    let b = atlas::rank1(-4).direct_sum(&atlas::rank1(-4));
    assert_eq!(a.det(), b.det());
    assert_eq!(diagonal_roots(&[-2, -8]), 2);
    assert_eq!(diagonal_roots(&[-4, -4]), 0);
    assert!(!definite_isometric(&a, &b).unwrap().is_isometric());
    assert_eq!(roots(&a).unwrap().len(), 1);
    assert_eq!(roots(&b).unwrap().len(), 0);
}

#[test]
fn uniqueness_criterion_on_indefinite_examples() {
    let unm2 = atlas::un().direct_sum(&atlas::rank1(-2));
    assert!(uniqueness_criterion(&unm2));
    let e82u = atlas::e8().scaled(2).direct_sum(&atlas::u());
    assert!(uniqueness_criterion(&e82u));
}

#[test]
fn named_determinants() {
    let l = atlas::make(&NamedLatticeId::parse("Lambda_d_a:6").unwrap()).unwrap();
    assert_eq!(num_traits::Signed::abs(&l.det()), Z::from(192));
    assert_eq!(num_traits::Signed::abs(&atlas::lattice_m().det()), Z::from(81));
    assert_eq!(atlas::lambda_k3().det(), Z::from(-1));
}

#[test]
fn overlattice_of_a1_squared_plus_minus4() {
    // A1 + A1 + <-4> glued by half the sum is A3.
    let l = atlas::a_n(1).direct_sum(&atlas::a_n(1)).direct_sum(&atlas::rank1(-4));
    let o = overlattice(&l, &[vec![k3lat_core::arith::qf(1, 2); 3]]).unwrap();
    assert_eq!(o.index, Z::from(2));
    assert_eq!(o.lattice.det(), Z::from(-4));
    assert!(definite_isometric(&o.lattice, &atlas::a_n(3)).unwrap().is_isometric());
}
