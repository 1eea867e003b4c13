use num_traits::Zero;
use proptest::prelude::*;
use qstkit::exact::{q, Q};
use qstkit::gauge::*;
use qstkit::group::GroupDescriptor;
use qstkit::lie::{preset, Preset, StructureConstants};
use qstkit::sw::{sw_consistency, sw_field_strength, sw_map_order1, sw_run, MPoly, SwProblem};
use qstkit::wave::{Generator, WavePacket};
use qstkit::C64;
use std::sync::Arc;

fn kappa(d: usize) -> Arc<GroupDescriptor> {
    Arc::new(GroupDescriptor::kappa_minkowski(1.0, d).unwrap())
}

fn wave(g: &Arc<GroupDescriptor>, p: &[f64], amp: C64) -> WavePacket {
    WavePacket::plane(g.clone(), p).unwrap().scale(amp).unwrap()
}

fn phase(a: f64) -> C64 {
    C64::new(0.0, a).exp()
}

#[test]
fn field_strength_matches_termwise_expansion() {
    // single waves A_μ = a_μ e_{p_μ}: the linear part is (x_μ(p_ν)a_ν e_{p_ν} − …),
    // the quadratic part is −i(E_1(p_μ) − E_1(p_ν)) a_μ a_ν e_{p_μ ⊕ p_ν} when the
    // two products share a momentum
    let g = kappa(1);
    let p = [[0.3, 0.2], [0.3, -0.5]];
    let amps = [C64::new(0.4, 0.1), C64::new(-0.2, 0.7)];
    let a = GaugeField::new(vec![wave(&g, &p[0], amps[0]), wave(&g, &p[1], amps[1])]).unwrap();
    let f = field_strength(&a).unwrap();
    let x = |mu: usize, k: &[f64]| {
        let w = WavePacket::plane(g.clone(), k).unwrap();
        w.eigenvalue(Generator::X(mu), &[C64::new(k[0], 0.0), C64::new(k[1], 0.0)]).unwrap()
    };
    let e1 = |k: &[f64]| (-k[0]).exp();
    let mut want = wave(&g, &p[1], amps[1] * x(0, &p[1]))
        .add(&wave(&g, &p[0], -amps[0] * x(1, &p[0])))
        .unwrap();
    let prod01 = WavePacket::plane(g.clone(), &p[0]).unwrap().star(&WavePacket::plane(g.clone(), &p[1]).unwrap()).unwrap();
    let prod10 = WavePacket::plane(g.clone(), &p[1]).unwrap().star(&WavePacket::plane(g.clone(), &p[0]).unwrap()).unwrap();
    let i = C64::new(0.0, 1.0);
    want = want
        .add(&prod01.scale(-i * e1(&p[0]) * amps[0] * amps[1]).unwrap())
        .unwrap()
        .add(&prod10.scale(i * e1(&p[1]) * amps[0] * amps[1]).unwrap())
        .unwrap();
    assert!(diff_norm(&f[0][1], &want).unwrap() < 1e-14);
    assert!(diff_norm(&f[1][0], &want.scale(C64::new(-1.0, 0.0)).unwrap()).unwrap() < 1e-14);
    assert!(f[0][0].is_empty() && f[1][1].is_empty());
}

#[test]
fn pure_gauge_is_flat_and_unit_is_identity() {
    for d in [1, 2, 3] {
        let g = kappa(d);
        let mut p = vec![0.6; d + 1];
        p[0] = -0.8;
        let u = wave(&g, &p, phase(0.3));
        let au = gauge_transform(&GaugeField::zero(&g), &u).unwrap();
        for row in field_strength(&au).unwrap() {
            for c in row {
                assert!(packet_norm(&c) < 1e-14);
            }
        }
        let a = GaugeField::new((0..=d).map(|mu| wave(&g, &vec![0.1 * mu as f64; d + 1], C64::new(1.0, -0.5))).collect()).unwrap();
        let same = gauge_transform(&a, &unit(&g).unwrap()).unwrap();
        for (x, y) in same.components.iter().zip(&a.components) {
            assert!(diff_norm(x, y).unwrap() < 1e-15);
        }
    }
}

#[test]
fn non_unitary_transform_rejected() {
    let g = kappa(2);
    let u = wave(&g, &[0.1, 0.2, 0.3], C64::new(2.0, 0.0));
    assert!(matches!(
        gauge_transform(&GaugeField::zero(&g), &u),
        Err(qstkit::Error::NotUnitary(_))
    ));
}

#[test]
fn hermiticity_examples() {
    let g = kappa(1);
    // A = e_p + (E⁻¹e_p)† = e_p + e^{p₀}e_{⊟p} satisfies A† = E⁻¹A
    let p = [0.4, -0.9];
    let ep = WavePacket::plane(g.clone(), &p).unwrap();
    let herm = ep.add(&ep.act(Generator::E(-1)).unwrap().dagger().unwrap()).unwrap();
    let a = GaugeField::new(vec![herm.clone(), herm]).unwrap();
    for r in hermiticity_check(&a).unwrap() {
        assert!(r < 1e-14, "{r}");
    }
    let b = GaugeField::new(vec![ep.clone(), ep]).unwrap();
    assert!(hermiticity_check(&b).unwrap().iter().all(|&r| r > 0.1));
}

#[test]
fn curvature_examples() {
    let s = StructureConstants::zero("abelian", 2, 0.0);
    let zero = vec![vec![vec![C64::new(0.0, 0.0); 2]; 2]; 2];
    let c = ConnectionCoefficients::new(zero.clone(), s.clone()).unwrap();
    assert!(tangent_curvature(&c).iter().flatten().flatten().flatten().all(|z| z.norm() == 0.0));
    let mut gam = zero;
    gam[0][0][1] = C64::new(0.0, 1.0);
    gam[1][1][0] = C64::new(0.0, 2.0);
    let c = ConnectionCoefficients::new(gam, s).unwrap();
    assert_eq!(c.hermiticity_residual(), 0.0);
    let r = tangent_curvature(&c);
    assert!(curvature_antisymmetry(&r) < 1e-15);
    // R_{01 1}^0 = Γ^τ_{11}Γ^0_{0τ} − Γ^τ_{01}Γ^0_{1τ} = 0 − Γ^0_{01}Γ^0_{10} = 0
    // R_{10 0}^1 = Γ^τ_{00}Γ^1_{1τ} − Γ^τ_{10}Γ^1_{0τ} = −Γ^1_{10}Γ^1_{01} = 0
    // R_{01 0}^1 = Γ^τ_{10}Γ^1_{0τ} − Γ^τ_{00}Γ^1_{1τ} = Γ^1_{10}Γ^1_{01} = 0
    // R_{10 1}^0 = Γ^τ_{01}Γ^0_{1τ} − Γ^τ_{11}Γ^0_{0τ} = Γ^0_{01}Γ^0_{10} = 0
    // R_{01 1}^1 = Γ^τ_{11}Γ^1_{0τ} − Γ^τ_{01}Γ^1_{1τ} = −Γ^0_{01}Γ^1_{10} = −(i)(2i) = 2
    assert!((r[0][1][1][1] - C64::new(2.0, 0.0)).norm() < 1e-15);
    assert!((r[1][0][1][1] + C64::new(2.0, 0.0)).norm() < 1e-15);
    let k = preset(Preset::KappaMinkowski, &[1.0], 2).unwrap();
    let mut gam = vec![vec![vec![C64::new(0.0, 0.0); 2]; 2]; 2];
    gam[1][1][1] = C64::new(0.0, 1.0);
    let r = tangent_curvature(&ConnectionCoefficients::new(gam, k.clone()).unwrap());
    // only the structure term survives: −C_{01}^τ Γ^σ_{τρ}
    for (rho, sigma) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let want: C64 = -(0..2).map(|t| k.get(0, 1, t) * if t == 1 && rho == 1 && sigma == 1 { C64::new(0.0, 1.0) } else { C64::new(0.0, 0.0) }).sum::<C64>();
        assert!((r[0][1][rho][sigma] - want).norm() < 1e-15);
    }
}

#[test]
fn dimension_scan_zero_only_at_four() {
    let ds: Vec<usize> = (1..=10).collect();
    let rows = dimension_constraint_scan(&ds, 2.0, &[-2.0, -0.3, 0.0, 0.7, 3.0]).unwrap();
    assert_eq!(dimension_zero_set(&rows), vec![4]);
    for r in &rows {
        if r.d != 4 {
            assert!(r.max_deviation > 0.1);
        }
    }
}

fn theta(n: usize, v: &[i64]) -> Vec<Vec<Q>> {
    let mut t = vec![vec![Q::zero(); n]; n];
    let mut k = 0;
    for a in 0..n {
        for b in a + 1..n {
            t[a][b] = q(v[k % v.len()], 1 + (k as i64 % 3));
            t[b][a] = -t[a][b].clone();
            k += 1;
        }
    }
    t
}

#[test]
fn sw_constant_field_strength_vanishes() {
    let n = 3;
    let a: Vec<MPoly> = (0..n).map(|i| MPoly::constant(n, q(i as i64 + 1, 2))).collect();
    let p = SwProblem::new(theta(n, &[1, -2, 3]), a.clone(), None).unwrap();
    assert_eq!(sw_map_order1(&p), a);
    assert!(sw_field_strength(&p).iter().flatten().all(MPoly::is_zero));
}

#[test]
fn sw_linear_field_strength() {
    // A = (0, x): F_{01} = 1, F̂_{01} = 1 + Θ^{ρσ}F_{0ρ}F_{1σ} = 1 + Θ^{10}F_{01}F_{10} = 1 + Θ^{01}
    let n = 2;
    let a = vec![MPoly::zero(n), MPoly::var(n, 0)];
    let th = theta(n, &[3]);
    let p = SwProblem::new(th.clone(), a, None).unwrap();
    let f = sw_field_strength(&p);
    assert_eq!(f[0][1], MPoly::constant(n, q(1, 1) + th[0][1].clone()));
}

fn poly_strategy(n: usize) -> impl Strategy<Value = MPoly> {
    proptest::collection::vec((proptest::collection::vec(0u32..=1, n), -5i64..=5, 1i64..=3), 0..5).prop_map(move |ts| {
        let mut p = MPoly::zero(n);
        for (e, num, den) in ts {
            p.add_term(e, q(num, den));
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn covariance_single_waves(
        p in proptest::collection::vec(-1.0f64..1.0, 4 * 4),
        amps in proptest::collection::vec(-1.0f64..1.0, 8),
        u in proptest::collection::vec(-1.0f64..1.0, 4),
        alpha in 0.0f64..6.28,
    ) {
        let g = kappa(3);
        let a = GaugeField::new((0..4).map(|mu| wave(&g, &p[4 * mu..4 * mu + 4], C64::new(amps[2 * mu], amps[2 * mu + 1]))).collect()).unwrap();
        let uu = wave(&g, &u, phase(alpha));
        prop_assert!(covariance_check(&a, &uu).unwrap() < 1e-12);
    }

    #[test]
    fn leibniz_and_reality_random(p in proptest::collection::vec(-2.0f64..2.0, 6), mu in 0usize..3) {
        let g = kappa(2);
        let f = wave(&g, &p[0..3], C64::new(0.3, -1.1));
        let h = wave(&g, &p[3..6], C64::new(-0.7, 0.2));
        prop_assert!(twisted_leibniz_check(mu, &f, &h).unwrap() < 1e-12);
        prop_assert!(twisted_reality_check(mu, &f.add(&h).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn sw_consistency_random(a in proptest::collection::vec(poly_strategy(3), 3), l in poly_strategy(3), v in proptest::collection::vec(-4i64..=4, 3)) {
        let th = theta(3, &v);
        let p = SwProblem::new(th.clone(), a.clone(), Some(l.clone())).unwrap();
        prop_assert!(sw_consistency(&th, &a, &l).iter().all(MPoly::is_zero));
        prop_assert_eq!(sw_run(&p).consistency_zero, Some(true));
        let f = sw_field_strength(&p);
        for mu in 0..3 {
            for nu in 0..3 {
                prop_assert_eq!(f[mu][nu].add(&f[nu][mu]), MPoly::zero(3));
            }
        }
    }
}

#[test]
fn transform_without_i_breaks_covariance() {
    let g = kappa(2);
    let a = GaugeField::new(vec![
        wave(&g, &[0.3, 0.1, 0.0], C64::new(0.5, 0.2)),
        wave(&g, &[-0.2, 0.4, 0.1], C64::new(0.1, -0.3)),
        wave(&g, &[0.6, 0.0, -0.5], C64::new(-0.4, 0.0)),
    ])
    .unwrap();
    let u = wave(&g, &[0.7, -0.3, 0.2], phase(1.1));
    assert!(covariance_check(&a, &u).unwrap() < 1e-12);
    let eud = u.dagger().unwrap().act(Generator::E(1)).unwrap();
    let plain = GaugeField::new(
        a.components
            .iter()
            .enumerate()
            .map(|(mu, am)| {
                eud.star(am).unwrap().star(&u).unwrap().add(&eud.star(&u.act(Generator::X(mu)).unwrap()).unwrap()).unwrap()
            })
            .collect(),
    )
    .unwrap();
    let f = field_strength(&a).unwrap();
    let fu = field_strength(&plain).unwrap();
    let e2ud = u.dagger().unwrap().act(Generator::E(2)).unwrap();
    let rhs = e2ud.star(&f[0][1]).unwrap().star(&u).unwrap();
    assert!(diff_norm(&fu[0][1], &rhs).unwrap() > 1e-3);
}
