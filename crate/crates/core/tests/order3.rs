//! The order 3 frame: σ₃, the glue of H², γ₃ and the rank 16 comparisons.

use k3lat_core::arith::{q, Q, Z};
use k3lat_core::atlas;
use k3lat_core::order3::{self, frame3};
use k3lat_core::matrix::QMatrix;
use num_traits::{One, Signed};

#[test]
fn sigma3_has_order_three_and_fixes_t() {
    let s = order3::sigma3().unwrap();
    let twice = s.compose(&s);
    assert_ne!(twice.matrix, QMatrix::identity(22));
    assert_eq!(s.compose(&twice).matrix, QMatrix::identity(22));
    let x = frame3();
    for i in 0..8 {
        let t = x.t_embedding.row(i).to_vec();
        assert_eq!(s.apply(&t), t);
    }
    let r = order3::sigma3_report().unwrap();
    assert!(r.isometry && r.integral_on_h2 && r.acts_trivially_on_t);
}

#[test]
fn h2_is_unimodular_after_glue() {
    // the glue index squared absorbs the whole determinant of U + A2^6 + T_X
    let x = frame3();
    let base_det = x.base.det().abs();
    let idx = x.h2.index.clone();
    assert_eq!(&idx * &idx, base_det);
    assert_eq!(x.ambient.det().abs(), Z::one());
    assert!(x.ambient.is_even());
}

#[test]
fn m_has_determinant_three_to_the_fourth() {
    let m = atlas::lattice_m();
    assert_eq!(m.det().abs(), Z::from(81));
    let g = order3::gamma3_frame().unwrap();
    assert!(g.gram_is_gamma);
}

#[test]
fn transcendental_class_norm() {
    let t = order3::t3_symbols();
    let v = t.eval("3v1+3v2+b1+2b2").unwrap();
    let g = atlas::t_x3_std().gram_q();
    assert_eq!(g.form(&v, &v), q(12));
    // v1 - v2 is orthogonal to it
    let d = t.eval("v1-v2").unwrap();
    let dot: Q = g.form(&d, &v);
    assert_eq!(dot, q(0));
}

#[test]
fn gamma3_squares_to_three() {
    let g = order3::gamma3_frame().unwrap();
    assert!(g.square_is_3);
    assert_eq!(g.scale, "3");
    let m = order3::gamma3_matrix();
    let sq = m.mul(&m);
    assert_eq!(sq, QMatrix::identity(m.rows()).scale(&q(3)));
}

#[test]
fn rank16_sides_agree() {
    for (d, e) in [(1, 1), (2, 3), (3, 3), (4, 2)] {
        let c = order3::rank16_case(d, e).unwrap();
        assert!(c.both_even && c.signatures_ok && c.uniqueness, "{d},{e}");
        assert_eq!(c.x_det, c.y_det, "{d},{e}");
        if d == e {
            assert_eq!(c.forms, "isomorphic", "{d}");
        }
    }
}
