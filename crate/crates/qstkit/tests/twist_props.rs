use num_traits::Zero;
use proptest::prelude::*;
use qstkit::exact::{cq, cq_int, q, Poly, Q, CQ};
use qstkit::twist::{bilinear, twist_check, twisted_check, TSeries, TwistSpec};

fn rational() -> impl Strategy<Value = Q> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| q(n, d))
}

fn sample(rank: usize) -> impl Strategy<Value = Vec<CQ>> {
    prop::collection::vec((rational(), rational()).prop_map(|(a, b)| cq(a, b)), rank)
}

fn antisymmetric(n: usize) -> impl Strategy<Value = Vec<Vec<Q>>> {
    prop::collection::vec(rational(), n * (n - 1) / 2).prop_map(move |upper| {
        let mut th = vec![vec![Q::zero(); n]; n];
        let mut it = upper.into_iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = it.next().unwrap();
                th[j][i] = -v.clone();
                th[i][j] = v;
            }
        }
        th
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn abelian_twist_all_orders(order in 1usize..=4, samples in prop::collection::vec(sample(2), 1..3)) {
        let t = twist_check(&TwistSpec::Abelian, order).unwrap();
        prop_assert!(t.pass(), "{:?}", t);
        prop_assert_eq!(t.cocycle_closed_form, Some(true));
        let w = twisted_check(&TwistSpec::Abelian, order, &samples).unwrap();
        prop_assert!(w.pass(), "{:?}", w);
        prop_assert_eq!(w.r_closed_form, Some(true));
    }

    #[test]
    fn moyal_twist_with_random_theta(theta in antisymmetric(2), order in 1usize..=3, samples in prop::collection::vec(sample(2), 1..3)) {
        let spec = TwistSpec::Moyal { theta };
        let t = twist_check(&spec, order).unwrap();
        prop_assert!(t.pass(), "{:?}", t);
        let w = twisted_check(&spec, order, &samples).unwrap();
        prop_assert!(w.pass(), "{:?}", w);
    }
}

#[test]
fn canonical_moyal_twist_rank_two_order_four() {
    let spec = TwistSpec::moyal_canonical(2);
    assert!(twist_check(&spec, 4).unwrap().pass());
    let samples = vec![vec![cq(q(1, 2), q(0, 1)), cq(q(-1, 1), q(1, 3))], vec![cq_int(2), cq(q(0, 1), q(-3, 2))]];
    let w = twisted_check(&spec, 4, &samples).unwrap();
    assert!(w.pass(), "{w:?}");
}

#[test]
fn truncated_exponential_is_not_a_cocycle() {
    let mut f = TSeries::one(2, 2, 3);
    f = f.add(&bilinear(2, 3, &[(0, 1, cq_int(1))]).scale(&Poly::monomial(cq(q(0, 1), q(1, 1)), 1)));
    let r = twist_check(&TwistSpec::Custom(f), 3).unwrap();
    assert!(!r.cocycle);
    assert!(!r.pass());
}
