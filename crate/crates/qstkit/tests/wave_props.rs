use proptest::prelude::*;
use qstkit::group::{GroupDescriptor, MoyalConvention};
use qstkit::oracle::{numeric_star_oracle, OracleSpec};
use qstkit::wave::{self, Generator, WavePacket};
use qstkit::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn packet(g: &Arc<GroupDescriptor>, terms: &[(Vec<f64>, f64, f64)]) -> WavePacket {
    let mut w = WavePacket::new(g.clone());
    for (p, re, im) in terms {
        w.insert(p.iter().map(|&x| C64::new(x, 0.0)).collect(), C64::new(*re, *im)).unwrap();
    }
    w
}

fn terms(n: usize, k: usize) -> impl Strategy<Value = Vec<(Vec<f64>, f64, f64)>> {
    prop::collection::vec((prop::collection::vec(-2.0f64..2.0, n), -1.0f64..1.0, -1.0f64..1.0), 1..=k)
}

fn close(a: &WavePacket, b: &WavePacket, tol: f64) -> bool {
    a.len() == b.len()
        && a.terms().iter().zip(b.terms()).all(|(x, y)| {
            x.0.iter().zip(&y.0).all(|(u, v)| (u - v).norm() <= tol * (1.0 + u.norm()))
                && (x.1 - y.1).norm() <= tol * (1.0 + x.1.norm())
        })
}

fn groups() -> Vec<Arc<GroupDescriptor>> {
    vec![
        Arc::new(GroupDescriptor::kappa_minkowski(1.0, 3).unwrap()),
        Arc::new(GroupDescriptor::rho_minkowski(0.7).unwrap()),
        Arc::new(GroupDescriptor::moyal(1.0, 4, MoyalConvention::Bch).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn star_is_associative_and_dagger_antihomomorphic(a in terms(5, 3), b in terms(5, 3), c in terms(5, 3)) {
        for g in groups() {
            let n = g.dim();
            let cut = |t: &Vec<(Vec<f64>, f64, f64)>| t.iter().map(|(p, r, i)| (p[..n].to_vec(), *r, *i)).collect::<Vec<_>>();
            let (f, h, k) = (packet(&g, &cut(&a)), packet(&g, &cut(&b)), packet(&g, &cut(&c)));
            let l = f.star(&h).unwrap().star(&k).unwrap();
            let r = f.star(&h.star(&k).unwrap()).unwrap();
            prop_assert!(close(&l, &r, 1e-9), "{}", g.name());
            let d1 = f.star(&h).unwrap().dagger().unwrap();
            let d2 = h.dagger().unwrap().star(&f.dagger().unwrap()).unwrap();
            prop_assert!(close(&d1, &d2, 1e-9), "{}", g.name());
            prop_assert!(close(&f.dagger().unwrap().dagger().unwrap(), &f, 1e-12));
        }
    }

    #[test]
    fn kappa_twisted_trace_holds_and_is_confluent(a in terms(4, 5), b in terms(4, 5), seed in any::<u64>()) {
        let g = Arc::new(GroupDescriptor::kappa_minkowski(1.0, 3).unwrap());
        let (f, h) = (packet(&g, &a), packet(&g, &b));
        prop_assert!(wave::twisted_trace_check(&f, &h).unwrap());
        let ds = f.integral_star(&h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..4 {
            prop_assert_eq!(ds.scrambled(&mut rng).normal_form(), ds.normal_form());
        }
    }

    #[test]
    fn unimodular_traces_are_cyclic(a in terms(5, 4), b in terms(5, 4)) {
        for g in groups().into_iter().skip(1) {
            let n = g.dim();
            let cut = |t: &Vec<(Vec<f64>, f64, f64)>| t.iter().map(|(p, r, i)| (p[..n].to_vec(), *r, *i)).collect::<Vec<_>>();
            let (f, h) = (packet(&g, &cut(&a)), packet(&g, &cut(&b)));
            prop_assert!(wave::plain_cyclicity_check(&f, &h).unwrap());
            prop_assert!(wave::twisted_trace_check(&f, &h).unwrap());
        }
    }

    #[test]
    fn bracket_recovery_from_star(a in prop::collection::vec(-1.0f64..1.0, 4), b in prop::collection::vec(-1.0f64..1.0, 4)) {
        let g = Arc::new(GroupDescriptor::kappa_minkowski(1.0, 3).unwrap());
        let eps = 1e-4;
        let sa: Vec<f64> = a.iter().map(|x| x * eps).collect();
        let sb: Vec<f64> = b.iter().map(|x| x * eps).collect();
        let ab = WavePacket::plane(g.clone(), &sa).unwrap().star(&WavePacket::plane(g.clone(), &sb).unwrap()).unwrap();
        let ba = WavePacket::plane(g.clone(), &sb).unwrap().star(&WavePacket::plane(g.clone(), &sa).unwrap()).unwrap();
        let av: Vec<C64> = a.iter().map(|&x| C64::new(x, 0.0)).collect();
        let bv: Vec<C64> = b.iter().map(|&x| C64::new(x, 0.0)).collect();
        // [p,q]_ρ = C^{μν}_ρ p_μ q_ν and (p⊞q − q⊞p)/ε² → i·[p,q]
        let br = g.structure.bracket(&av, &bv);
        for r in 0..4 {
            let diff = (ab.terms()[0].0[r] - ba.terms()[0].0[r]) / (eps * eps);
            prop_assert!((diff - C64::new(0.0, 1.0) * br[r]).norm() < 1e-3);
        }
    }
}

#[test]
fn kappa_oracle_matches_closed_form() {
    let g = Arc::new(GroupDescriptor::kappa_minkowski(1.0, 3).unwrap());
    let f = packet(&g, &[(vec![0.7, 1.0, -0.5, 0.3], 1.0, 0.0), (vec![-0.2, 0.4, 0.0, 1.1], 0.0, 0.5)]);
    let h = packet(&g, &[(vec![0.3, -1.2, 0.8, 0.5], 0.8, -0.1)]);
    let prod = f.star(&h).unwrap();
    for x in [[0.0, 0.0, 0.0, 0.0], [0.5, 1.0, -0.7, 0.2], [-1.0, 0.3, 0.9, -0.8]] {
        let o = numeric_star_oracle(&g, &f, &h, &x, &OracleSpec::for_scale(1.0)).unwrap();
        assert!((o.value - prod.eval(&x)).norm() < 1e-8, "{:?} {:?}", o.value, prod.eval(&x));
    }
}

#[test]
fn oracle_with_unit_wave() {
    let g = Arc::new(GroupDescriptor::kappa_minkowski(1.0, 1).unwrap());
    let f = packet(&g, &[(vec![0.7, 1.0], 1.0, 0.0)]);
    let e0 = packet(&g, &[(vec![0.0, 0.0], 1.0, 0.0)]);
    let x = [0.4, -0.9];
    let o = numeric_star_oracle(&g, &e0, &f, &x, &OracleSpec::default()).unwrap();
    assert!((o.value - f.eval(&x)).norm() < 1e-8);
}

#[test]
fn rho_oracle_matches_law_with_opposite_parameter() {
    let g = Arc::new(GroupDescriptor::rho_minkowski(1.0).unwrap());
    let flipped = Arc::new(GroupDescriptor::rho_minkowski(-1.0).unwrap());
    let fp = [(vec![0.9, 1.0, -0.5, 0.3], 1.0, 0.0)];
    let hp = [(vec![0.3, -1.2, 0.8, 0.5], 1.0, 0.0)];
    let x = [0.5, 1.0, -0.7, 0.2];
    let o = numeric_star_oracle(&g, &packet(&g, &fp), &packet(&g, &hp), &x, &OracleSpec::default()).unwrap();
    let alg = packet(&flipped, &fp).star(&packet(&flipped, &hp)).unwrap().eval(&x);
    assert!((o.value - alg).norm() < 1e-8);
    let printed = packet(&g, &fp).star(&packet(&g, &hp)).unwrap().eval(&x);
    assert!((o.value - printed).norm() > 1e-3);
}

#[test]
fn moyal_oracle_phase() {
    let g = Arc::new(GroupDescriptor::moyal(1.0, 4, MoyalConvention::Bch).unwrap());
    let f = packet(&g, &[(vec![1.0, 0.0, 0.0, 0.0, 0.0], 1.0, 0.0)]);
    let h = packet(&g, &[(vec![0.0, 1.0, 0.0, 0.0, 0.0], 1.0, 0.0)]);
    let x = [0.0; 4];
    let o = numeric_star_oracle(&g, &f, &h, &x, &OracleSpec::default()).unwrap();
    let alg = f.star(&h).unwrap().eval(&x);
    assert!((o.value - alg).norm() < 1e-8);
    assert!((o.value - C64::new(0.0, -0.5).exp()).norm() < 1e-8);
}

#[test]
fn generator_limit() {
    let g = Arc::new(GroupDescriptor::kappa_minkowski(1e8, 1).unwrap());
    let f = WavePacket::plane(g, &[0.7, 1.0]).unwrap();
    let x0 = f.act(Generator::X(0)).unwrap();
    assert!((x0.terms()[0].1.re - 0.7).abs() < 1e-8);
}
