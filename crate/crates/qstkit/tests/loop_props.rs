use proptest::prelude::*;
use qstkit::exact::q;
use qstkit::group::{GroupDescriptor, MoyalConvention};
use qstkit::lie::{moyal_theta, StructureConstants};
use qstkit::loops::*;
use qstkit::special::bessel_k;

fn commutative(n: usize) -> GroupDescriptor {
    GroupDescriptor::from_structure(StructureConstants::zero("abelian", n, 0.0), 1)
}

fn moyal(conv: MoyalConvention) -> GroupDescriptor {
    GroupDescriptor::moyal(1.0, 4, conv).unwrap()
}

#[test]
fn bessel_ratio_is_one_half() {
    // Ω_{d−1}π Γ(d/2)/√π (4κm/d)^ν K_ν = 2π^{(d+1)/2}(4κm/d)^ν K_ν: half the closed form
    let r = bessel_oracle_compare(&[0.5, 1.0, 2.0], &[0.5, 1.0, 2.0], &[2, 3], 1e-6).unwrap();
    assert!(r.pass, "{:?}", r.max_deviation);
    for row in &r.rows {
        assert!((row.ratio - 0.5).abs() < 1e-8, "{row:?}");
    }
}

#[test]
fn moyal_nonplanar_closed_form_and_asymptotics() {
    let v = nonplanar_from_c(0.01, 1.0).unwrap();
    assert!(v.rel_error < 1e-6, "{v:?}");
    let expect = 2.0 / 0.1 * bessel_k(1.0, 0.2).unwrap();
    assert!((v.closed_form / expect - 1.0).abs() < 1e-12);
    for cc in [1e-4, 1e-5, 1e-6, 1e-8] {
        let v = nonplanar_from_c(cc, 1.0).unwrap();
        assert!(v.rel_error < 1e-6);
        assert!((v.asymptotic_ratio - 1.0).abs() < 0.02, "{v:?}");
    }
    let th = moyal_theta(1.0, 4);
    let a = moyal_nonplanar(&[0.0; 4], &th, 1.0, 50.0).unwrap();
    assert!((a.lambda_eff_sq - 2500.0).abs() < 1e-9);
    let b = moyal_nonplanar(&[0.5, 0.0, 0.0, 0.0], &th, 1.0, 1e12).unwrap();
    assert!((b.lambda_eff_sq - 4.0 / 0.25).abs() < 1e-9);
}

#[test]
fn commutative_coefficient_is_one_half() {
    let s = specialize(&two_point_assemble(), &commutative(4)).unwrap();
    assert_eq!(s.delta, NonPlanarDelta::Collapsed);
    assert_eq!(s.total_coefficient(), Some(q(1, 2)));
}

#[test]
fn moyal_form() {
    for conv in [MoyalConvention::PaperVerbatim, MoyalConvention::Bch] {
        let g = moyal(conv);
        let s = specialize(&two_point_assemble(), &g).unwrap();
        assert_eq!(s.phase_form(), Some((q(1, 6), q(2, 1), q(1, 1))));
        // verbatim law: φ = 2Θᵀp; exponential chart: φ = −Θᵀp
        let p = [0.3, -0.2, 0.5, 0.7];
        let th = moyal_theta(1.0, 4);
        let phi = moyal_phase_form(&g, &p).unwrap();
        let scale = if conv == MoyalConvention::PaperVerbatim { 2.0 } else { -1.0 };
        for nu in 0..4 {
            let want: f64 = (0..4).map(|mu| p[mu] * th[mu][nu]).sum::<f64>() * scale;
            assert!((phi[nu] - want).abs() < 1e-14);
        }
    }
}

#[test]
fn kappa_planar_external_factor() {
    let r = two_point_assemble();
    assert_eq!(r.planar.factors[0].render(), "1 + 1Δ(q)");
    let g = GroupDescriptor::kappa_minkowski(2.0, 3).unwrap();
    let s = specialize(&r, &g).unwrap();
    assert_eq!(s.delta, NonPlanarDelta::Deformed);
    assert_eq!(s.planar_weight, None);
    let q0: f64 = 0.4;
    let dq = (3.0 * q0 / 2.0).exp();
    assert!((r.planar.factors[0].eval(dq, 1.0) - (1.0 + (3.0 * q0 / 2.0).exp())).abs() < 1e-14);
}

#[test]
fn commutative_sharp_cutoff_is_quadratic() {
    let ks = KineticSpec::euclidean(commutative(4), 1.0).unwrap();
    let grid = geometric_grid(1e2, 1e4, 10f64.sqrt()).unwrap();
    let r = propagator_integral(&ks, Scheme::SharpCutoff, false, &grid).unwrap();
    assert_eq!(r.trend, Trend::Divergent);
    assert!((r.slope.unwrap() - 2.0).abs() < 0.01);
}

#[test]
fn kappa_propagator_converges_to_bessel_form() {
    for d in [2, 3] {
        let ks = KineticSpec::minkowski(GroupDescriptor::kappa_minkowski(1.0, d).unwrap(), 1.0).unwrap();
        let grid = geometric_grid(1.0, 1e4, 10.0).unwrap();
        for scheme in [Scheme::SharpCutoff, Scheme::Schwinger] {
            let r = propagator_integral(&ks, scheme, true, &grid).unwrap();
            assert_eq!(r.trend, Trend::Convergent, "{d} {scheme:?}");
        }
        let top = RegulatorSpec::new(Scheme::SharpCutoff, 1e4, true).unwrap();
        let v = propagator_value(&ks, &top).unwrap();
        assert!((v / kmink_bessel_closed_form(1.0, 1.0, d).unwrap() - 0.5).abs() < 1e-8);
        assert!(propagator_value(&ks, &RegulatorSpec::new(Scheme::SharpCutoff, 1.0, false).unwrap()).is_err());
    }
    let heavy = KineticSpec::minkowski(GroupDescriptor::kappa_minkowski(1.0, 3).unwrap(), 40.0).unwrap();
    let v = propagator_value(&heavy, &RegulatorSpec::new(Scheme::Schwinger, 1e3, true).unwrap()).unwrap();
    assert!(v < 1e-20);
}

#[test]
fn mixing_verdicts() {
    let ks = KineticSpec::euclidean(moyal(MoyalConvention::Bch), 1.0).unwrap();
    let r = mixing_classify(&ks, &MixingOptions::standard(&ks)).unwrap();
    assert_eq!(r.verdict, Verdict::Mixing, "{r:?}");
    for d in [2, 3] {
        let ks = KineticSpec::minkowski(GroupDescriptor::kappa_minkowski(1.0, d).unwrap(), 1.0).unwrap();
        let r = mixing_classify(&ks, &MixingOptions::standard(&ks)).unwrap();
        assert_eq!(r.verdict, Verdict::NoMixing, "{r:?}");
        assert_eq!(r.planar_uv_divergent.holds, Some(false));
    }
    let ks = KineticSpec::euclidean(commutative(4), 1.0).unwrap();
    let r = mixing_classify(&ks, &MixingOptions::standard(&ks)).unwrap();
    assert_eq!(r.verdict, Verdict::NoMixing);
    assert_eq!(r.planar_uv_divergent.holds, Some(true));
}

#[test]
fn diagram_counts() {
    let count = |f| {
        let d = diagram_enumerate(f);
        (d.len(), d.iter().filter(|c| c.planar).count())
    };
    assert_eq!(count(FieldKind::RealPhi4), (12, 8));
    assert_eq!(count(FieldKind::ChargedOrientable), (4, 4));
    assert_eq!(count(FieldKind::ChargedNonorientable), (4, 2));
}

proptest! {
    #[test]
    fn kinetic_parity(k0 in -3.0f64..3.0, k1 in -3.0f64..3.0, k2 in -3.0f64..3.0, k3 in -3.0f64..3.0, kappa in 0.3f64..4.0) {
        let k = [k0, k1, k2, k3];
        for g in [GroupDescriptor::kappa_minkowski(kappa, 3).unwrap(), GroupDescriptor::rho_minkowski(kappa).unwrap(), commutative(4)] {
            let ks = KineticSpec::minkowski(g, 1.0).unwrap();
            let scale = kinetic_eval(&ks, &k).unwrap().abs().max(1.0);
            prop_assert!(parity_residual(&ks, &k).unwrap().abs() < 1e-12 * scale);
        }
        let ks = KineticSpec::euclidean(moyal(MoyalConvention::Bch), 0.5).unwrap();
        prop_assert!(parity_residual(&ks, &k).unwrap().abs() < 1e-12);
    }

    #[test]
    fn heavier_mass_smaller_propagator(m in 0.2f64..3.0, dm in 0.1f64..2.0) {
        let mk = |m| KineticSpec::minkowski(GroupDescriptor::kappa_minkowski(1.0, 3).unwrap(), m).unwrap();
        let reg = RegulatorSpec::new(Scheme::Schwinger, 1e3, true).unwrap();
        prop_assert!(propagator_value(&mk(m + dm), &reg).unwrap() < propagator_value(&mk(m), &reg).unwrap());
    }

    #[test]
    fn schwinger_quadrature_matches_closed_form(m in 0.1f64..3.0, lc in -8.0f64..1.0) {
        let cc = 10f64.powf(lc);
        let a = schwinger_quadrature(1.0, m, cc).unwrap();
        let b = schwinger_closed_form(1.0, m, cc).unwrap();
        prop_assert!((a / b - 1.0).abs() < 1e-8);
    }
}
