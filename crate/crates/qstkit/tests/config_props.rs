use proptest::prelude::*;
use qstkit::config::{parse_config, RunConfig, Spacetime};
use qstkit::lie::{Preset, StructureConstants};
use qstkit::report::Format;
use qstkit::suite::{exit_code, run_suite, SuiteName};
use qstkit::{Error, C64};

fn structure(entries: &[(usize, usize, usize, i8, i8)], dim: usize) -> StructureConstants {
    let mut sc = StructureConstants::zero("custom", dim, 0.5);
    for &(mu, nu, rho, re, im) in entries {
        if mu % dim != nu % dim {
            sc.set_antisym(mu % dim, nu % dim, rho % dim, C64::new(re as f64 / 4.0, im as f64 / 4.0));
        }
    }
    sc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inline_structure_round_trips(
        dim in 2usize..5,
        entries in prop::collection::vec((0usize..5, 0usize..5, 0usize..5, -8i8..8, -8i8..8), 0..6),
        seed in any::<u64>(),
        samples in 1usize..50_000,
    ) {
        let sc = structure(&entries, dim);
        let text = serde_json::json!({"spacetime": sc.to_json(), "seed": seed, "samples": samples}).to_string();
        let cfg = parse_config(&text).unwrap();
        let again = parse_config(&cfg.to_json().to_string()).unwrap();
        prop_assert_eq!(&cfg, &again);
        match &cfg.spacetime {
            Spacetime::Inline { structure, .. } => {
                prop_assert_eq!(StructureConstants::from_json(structure).unwrap().max_diff(&sc), 0.0);
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn preset_configs_round_trip(kappa in 0.1f64..10.0, d in 1usize..5, csv in any::<bool>()) {
        let fmt = if csv { "csv" } else { "json" };
        let text = format!(r#"{{"spacetime":"kappa_minkowski","kappa":{kappa},"d":{d},"output":{{"format":"{fmt}"}}}}"#);
        let cfg = parse_config(&text).unwrap();
        prop_assert_eq!(cfg.format, if csv { Format::Csv } else { Format::Json });
        prop_assert_eq!(parse_config(&cfg.to_json().to_string()).unwrap(), cfg);
    }
}

#[test]
fn minimal_config_fills_defaults() {
    let cfg = parse_config(r#"{"spacetime":"kappa_minkowski","kappa":1,"d":3}"#).unwrap();
    let want = RunConfig::default_for(Preset::KappaMinkowski);
    assert_eq!(cfg, want);
}

#[test]
fn errors_carry_json_pointers() {
    let path = |text: &str| match parse_config(text) {
        Err(Error::Config { path, .. }) => path,
        other => panic!("{other:?}"),
    };
    assert_eq!(path(r#"{"spacetime":"kappa","kapa":1}"#), "/kapa");
    assert_eq!(path(r#"{"spacetime":"kappa","output":{"formt":"csv"}}"#), "/output/formt");
    assert_eq!(path(r#"{"spacetime":"kappa","output":{"format":"xml"}}"#), "/output/format");
    assert_eq!(path(r#"{"spacetime":"kappa","tolerances":{"haar":1e-8,"hair":1}}"#), "/tolerances/hair");
    assert_eq!(path(r#"{"spacetime":"kappa","theta":1}"#), "/theta");
    assert_eq!(
        path(r#"{"spacetime":{"name":"x","dim":2,"deformation":0,"entries":[{"mu":0,"nu":1,"rho":0,"re":1}]}}"#),
        "/spacetime/entries/0"
    );
    assert_eq!(path(r#"{"spacetime":"kappa","d":0}"#), "/d");
    assert_eq!(path(r#"{"spacetime":"su2","dim":4}"#), "/dim");
    assert_eq!(path(r#"{"spacetime":"kappa","kappa":-1}"#), "/kappa");
    assert!(matches!(parse_config(r#"{"spacetime":"snyder"}"#), Err(Error::UnknownPreset(_))));
    assert!(matches!(parse_config("{"), Err(Error::Config { .. })));
}

#[test]
fn tolerance_overrides() {
    let mut cfg = RunConfig::default_for(Preset::KappaMinkowski);
    cfg.tolerances.apply_override("cone=1e-6").unwrap();
    assert_eq!(cfg.tolerances.cone, 1e-6);
    assert!(cfg.tolerances.apply_override("nope=1").is_err());
    assert!(cfg.tolerances.apply_override("cone").is_err());
    assert!(cfg.tolerances.apply_override("cone=-1").is_err());
}

#[test]
fn hopf_suite_exits_zero() {
    let r = run_suite(SuiteName::Hopf, &RunConfig::default_for(Preset::KappaMinkowski)).unwrap();
    assert_eq!(exit_code(&r), 0);
    assert_eq!(r.rows.len(), 44);
    assert!(r.rows.iter().all(|row| !row.anchor.is_empty()));
}

#[test]
fn moyal_mixing_reports_verdict() {
    let cfg = parse_config(r#"{"spacetime":"moyal_extended","theta":1}"#).unwrap();
    let r = run_suite(SuiteName::Mixing, &cfg).unwrap();
    assert_eq!(exit_code(&r), 0);
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["data"]["verdict"], "MIXING");
    assert_eq!(v["data"]["mixing"]["verdict"], "MIXING");
}

#[test]
fn corrupted_structure_exits_one() {
    let cfg = parse_config(
        r#"{"spacetime":{"name":"bad","dim":3,"deformation":1,"entries":[
            {"mu":0,"nu":1,"rho":1,"re":0,"im":1},{"mu":1,"nu":0,"rho":1,"re":0,"im":-1},
            {"mu":1,"nu":2,"rho":0,"re":1,"im":0},{"mu":2,"nu":1,"rho":0,"re":-1,"im":0},
            {"mu":0,"nu":2,"rho":2,"re":0,"im":1},{"mu":2,"nu":0,"rho":2,"re":0,"im":-1}]}}"#,
    )
    .unwrap();
    let r = run_suite(SuiteName::Group, &cfg).unwrap();
    assert_eq!(exit_code(&r), 1);
    assert!(r.rows[0].check.starts_with("jacobi") && !r.rows[0].pass);
}

#[test]
fn reports_are_deterministic_across_thread_counts() {
    let mut cfg = parse_config(r#"{"spacetime":"rho_minkowski","rho":0.7,"seed":11,"samples":2000,"states":60}"#).unwrap();
    let mut outs = Vec::new();
    for jobs in [Some(1), Some(3), None] {
        cfg.jobs = jobs;
        for s in [SuiteName::Group, SuiteName::Trace, SuiteName::Causality] {
            let r = run_suite(s, &cfg).unwrap();
            outs.push((s, r.to_json(), r.to_csv().unwrap()));
        }
    }
    for chunk in outs.chunks(3).skip(1) {
        for (a, b) in chunk.iter().zip(&outs[..3]) {
            assert_eq!(a, b);
        }
    }
    cfg.seed = 12;
    cfg.jobs = None;
    assert_ne!(run_suite(SuiteName::Group, &cfg).unwrap().to_json(), outs[0].1);
}
