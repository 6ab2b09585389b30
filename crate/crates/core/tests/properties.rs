//! Proptest-driven invariants. Each seeded property from the library also runs here with
//! proptest choosing the seeds.

use k3lat_core::arith::{fmt_q, parse_q, Q, Z};
use k3lat_core::enumerate::RootType;
use k3lat_core::matrix::ZMatrix;
use k3lat_core::normal_form::{hnf, smith_normal_form};
use k3lat_core::props::{run_property, PROPERTIES};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn small_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-6i64..=6, n), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn snf_product_is_the_determinant(rows in (1usize..=5).prop_flat_map(small_matrix)) {
        let m = ZMatrix::from_i64(&rows);
        let det = m.det().abs();
        let snf = smith_normal_form(&m);
        let d = snf.diagonal();
        let prod: Z = d.iter().map(|x| x.abs()).product();
        prop_assert_eq!(prod, det);
        // each diagonal entry divides the next
        for w in d.windows(2) {
            if !w[0].is_zero() {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }
    }

    #[test]
    fn hnf_preserves_the_row_lattice(rows in (1usize..=4).prop_flat_map(small_matrix)) {
        let m = ZMatrix::from_i64(&rows);
        let h = hnf(&m);
        // H = U M with U unimodular
        prop_assert_eq!(h.u.mul(&m), h.h.clone());
        prop_assert_eq!(h.u.det().abs(), Z::from(1));
    }

    #[test]
    fn rationals_round_trip(n in -10_000i64..10_000, d in 1i64..500) {
        let x = Q::new(Z::from(n), Z::from(d));
        prop_assert_eq!(parse_q(&fmt_q(&x)), Some(x));
    }

    #[test]
    fn root_type_names_round_trip(a in 0usize..4, d in 0usize..3, e in 0usize..2, k in 1usize..8) {
        let mut t = RootType::default();
        if a > 0 { t.add('A', k, a); }
        if d > 0 { t.add('D', 4 + k % 4, d); }
        if e > 0 { t.add('E', 6 + (k % 3), e); }
        let s = t.to_string();
        prop_assert_eq!(RootType::parse(&s).map(|r| r.to_string()), Some(s));
    }

    #[test]
    fn library_properties_hold_for_any_seed(seed in any::<u64>(), which in 0usize..PROPERTIES.len()) {
        let o = run_property(PROPERTIES[which], 1, seed).unwrap();
        prop_assert_eq!(o.failures, 0, "{:?}", o.first_failure);
    }
}
