//! Acceptance suites run against a [`RunConfig`].

use crate::causality::{self, GridSpec, Scheme as GridScheme, StateVector};
use crate::config::{RunConfig, Spacetime};
use crate::exact::{cq, q, CQ, Q};
use crate::gauge::{self, GaugeField};
use crate::group::{self, GroupDescriptor, Law, MoyalConvention};
use crate::hopf::{Conventions, KappaPoincare};
use crate::lie::{self, Preset, RecoveryMethod, StructureConstants};
use crate::loops::{self, FieldKind, KineticSpec, MixingOptions, Verdict};
use crate::moyal_matrix::{self, TruncatedElement};
use crate::report::{CheckRow, Report};
use crate::sw::{self, MPoly, SwProblem};
use crate::twist::{self, TwistSpec};
use crate::wave::{self, Generator, WavePacket};
use crate::{Error, Result, C64};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteName {
    Group,
    Hopf,
    Twist,
    Trace,
    Mixing,
    Gauge,
    Causality,
    All,
}

impl SuiteName {
    pub const EACH: [SuiteName; 7] = [
        SuiteName::Group,
        SuiteName::Hopf,
        SuiteName::Twist,
        SuiteName::Trace,
        SuiteName::Mixing,
        SuiteName::Gauge,
        SuiteName::Causality,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SuiteName::Group => "group",
            SuiteName::Hopf => "hopf",
            SuiteName::Twist => "twist",
            SuiteName::Trace => "trace",
            SuiteName::Mixing => "mixing",
            SuiteName::Gauge => "gauge",
            SuiteName::Causality => "causality",
            SuiteName::All => "all",
        }
    }
}

impl FromStr for SuiteName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SuiteName::EACH
            .iter()
            .chain(std::iter::once(&SuiteName::All))
            .find(|n| n.name() == s)
            .copied()
            .ok_or_else(|| Error::BadParameter(format!("unknown suite `{s}`")))
    }
}

const A_LAW: &str = "momentum group law";
const A_LIE: &str = "Lie-algebra type commutation relations";
const A_HAAR: &str = "Haar measure and modular function";
const A_TRACE: &str = "twisted trace";
const A_MATRIX: &str = "Moyal matrix basis";
const A_HOPF: &str = "kappa-Poincare Hopf algebra";
const A_TWIST: &str = "Drinfel'd twist";
const A_LOOP: &str = "one-loop two-point function";
const A_MIXING: &str = "UV/IR mixing";
const A_WICK: &str = "Wick contractions";
const A_DIM: &str = "gauge dimension constraint";
const A_GAUGE: &str = "twisted gauge theory";
const A_SW: &str = "Seiberg-Witten map";
const A_CONE: &str = "causal cone condition";
const A_LORENTZ: &str = "Lorentzian spectral triple";
const A_SLL: &str = "stochastic light-like ordering";

/// Runs one suite, or all of them in a fixed order, on the configured
/// thread pool. Errors are usage errors; check failures are in the report.
pub fn run_suite(name: SuiteName, cfg: &RunConfig) -> Result<Report> {
    cfg.group()?;
    let go = || -> Result<Report> {
        match name {
            SuiteName::All => {
                let mut r = Report::new("all", cfg.seed);
                for s in SuiteName::EACH {
                    r.extend(run_one(s, cfg)?);
                }
                Ok(r)
            }
            s => run_one(s, cfg),
        }
    };
    match cfg.jobs {
        Some(j) => with_jobs(j, go),
        None => go(),
    }
}

/// Runs `f` on a dedicated pool of `jobs` threads.
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::BadParameter(e.to_string()))?
        .install(f)
}

pub fn exit_code(r: &Report) -> i32 {
    if r.pass {
        0
    } else {
        1
    }
}

fn run_one(s: SuiteName, cfg: &RunConfig) -> Result<Report> {
    match s {
        SuiteName::Group => group_suite(cfg),
        SuiteName::Hopf => hopf_suite(cfg),
        SuiteName::Twist => twist_suite(cfg),
        SuiteName::Trace => trace_suite(cfg),
        SuiteName::Mixing => mixing_suite(cfg),
        SuiteName::Gauge => gauge_suite(cfg),
        SuiteName::Causality => causality_suite(cfg),
        SuiteName::All => unreachable!(),
    }
}

fn rng(cfg: &RunConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}


fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn fmax(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

fn momentum_span(cfg: &RunConfig) -> f64 {
    match cfg.spacetime {
        Spacetime::Inline { .. } => 0.15,
        Spacetime::Preset { .. } => 2.0,
    }
}

fn random_momentum(r: &mut ChaCha8Rng, n: usize, span: f64) -> Vec<C64> {
    (0..n).map(|_| C64::new(r.gen_range(-span..=span), 0.0)).collect()
}

/// The tensor the configured group law actually realizes.
fn realized_structure(cfg: &RunConfig, g: &GroupDescriptor) -> Result<StructureConstants> {
    match &cfg.spacetime {
        Spacetime::Preset {
            preset: Preset::RhoMinkowski,
            parameter,
            dim,
        } => lie::preset(Preset::RhoMinkowski, &[-parameter], *dim),
        _ => Ok(g.structure.clone()),
    }
}

/// Group law in the chart where structure recovery applies.
fn recovery_group(g: &GroupDescriptor) -> Result<GroupDescriptor> {
    match &g.law {
        Law::Moyal {
            convention: MoyalConvention::PaperVerbatim,
            theta,
        } => GroupDescriptor::moyal(g.structure.deformation, theta.len(), MoyalConvention::Bch),
        _ => Ok(g.clone()),
    }
}

pub fn group_suite(cfg: &RunConfig) -> Result<Report> {
    let s = "group";
    let tol = &cfg.tolerances;
    let mut rep = Report::new(s, cfg.seed);
    let g = cfg.group()?;
    let name = g.name();
    let jac = g.structure.jacobi_check();
    rep.push(CheckRow::new(s, format!("jacobi:{name}"), jac.passes, Some(jac.max_violation), "", A_LIE));
    let anti = g.structure.antisymmetry_violation();
    rep.push(CheckRow::new(s, format!("antisymmetry:{name}"), anti <= 1e-12, Some(anti), "", A_LIE));
    if !rep.pass {
        return Ok(rep);
    }
    let n = g.dim();
    let span = momentum_span(cfg);
    let mut r = rng(cfg, 1);
    let triples: Vec<[Vec<C64>; 3]> = (0..cfg.samples)
        .map(|_| [random_momentum(&mut r, n, span), random_momentum(&mut r, n, span), random_momentum(&mut r, n, span)])
        .collect();
    let zero = vec![C64::new(0.0, 0.0); n];
    let res: Vec<(f64, f64, f64)> = triples
        .par_iter()
        .map(|[p, q, w]| {
            let lhs = g.add(&g.add(p, q)?, w)?;
            let rhs = g.add(p, &g.add(q, w)?)?;
            let assoc = dist(&lhs, &rhs) / (1.0 + group::norm(&lhs));
            let sc = 1.0 + group::norm(p);
            let ident = dist(&g.add(p, &zero)?, p).max(dist(&g.add(&zero, p)?, p)) / sc;
            let ip = g.inv(p)?;
            let inv = group::norm(&g.add(p, &ip)?).max(group::norm(&g.add(&ip, p)?)) / sc;
            Ok((assoc, ident, inv))
        })
        .collect::<Result<_>>()?;
    let assoc = fmax(res.iter().map(|x| x.0));
    let ident = fmax(res.iter().map(|x| x.1));
    let inv = fmax(res.iter().map(|x| x.2));
    let detail = format!("{} triples", cfg.samples);
    rep.push(CheckRow::new(s, "associativity", assoc <= tol.associativity, Some(assoc), detail.clone(), A_LAW));
    rep.push(CheckRow::new(s, "identity", ident <= tol.identity, Some(ident), detail.clone(), A_LAW));
    rep.push(CheckRow::new(s, "inverse", inv <= tol.identity, Some(inv), detail, A_LAW));

    let pairs = (cfg.samples / 10).max(1);
    let pq: Vec<(Vec<C64>, Vec<C64>)> = (0..pairs)
        .map(|_| (random_momentum(&mut r, n, span), random_momentum(&mut r, n, span)))
        .collect();
    let res: Vec<(f64, f64, f64)> = pq
        .par_iter()
        .map(|(p, q)| {
            let h = g.haar_invariance_check(q, p)?;
            let scale = g.haar_left(p).max(g.haar_right(p)).max(1.0);
            let pqs = g.add(p, q)?;
            let dpq = g.modular(&pqs);
            let hom = (dpq - g.modular(p) * g.modular(q)).abs() / dpq.max(1.0);
            let inv = (g.modular(&g.inv(p)?) * g.modular(p) - 1.0).abs();
            Ok((h.left.max(h.right) / scale, hom.max(inv), (g.modular(p) - 1.0).abs()))
        })
        .collect::<Result<_>>()?;
    let haar = fmax(res.iter().map(|x| x.0));
    let modular = fmax(res.iter().map(|x| x.1));
    let dev = fmax(res.iter().map(|x| x.2));
    let detail = format!("{pairs} pairs");
    rep.push(CheckRow::new(s, "haar_invariance", haar <= tol.haar, Some(haar), detail.clone(), A_HAAR));
    rep.push(CheckRow::new(s, "modular_homomorphism", modular <= tol.modular, Some(modular), detail, A_HAAR));
    let uni = g.is_unimodular();
    let consistent = if uni { dev <= tol.modular } else { dev > tol.modular };
    rep.push(CheckRow::new(
        s,
        "unimodularity",
        consistent,
        Some(dev),
        format!("unimodular: {uni}; max |Δ−1| over samples"),
        A_HAAR,
    ));

    let rg = recovery_group(&g)?;
    let expected = realized_structure(cfg, &rg)?;
    let chart = if rg.same_as(&g) { String::new() } else { format!("recovered in chart {}", rg.name()) };
    match lie::recover_from_group_law(&rg, RecoveryMethod::Analytic) {
        Ok(a) => {
            let d = a.max_diff(&expected);
            rep.push(CheckRow::new(s, "recovery_analytic", d == 0.0, Some(d), chart.clone(), A_LIE));
        }
        Err(e) => rep.push(CheckRow::error(s, "recovery_analytic", &e, A_LIE)),
    }
    match lie::recover_from_group_law(&rg, RecoveryMethod::FiniteDifference) {
        Ok(f) => {
            let d = f.max_diff(&expected);
            rep.push(CheckRow::new(s, "recovery_finite_difference", d <= tol.recovery_fd, Some(d), chart, A_LIE));
        }
        Err(e) => rep.push(CheckRow::error(s, "recovery_finite_difference", &e, A_LIE)),
    }
    Ok(rep)
}

pub fn hopf_suite(cfg: &RunConfig) -> Result<Report> {
    let s = "hopf";
    let mut rep = Report::new(s, cfg.seed);
    let engine = KappaPoincare::new(Conventions::consistent());
    for (gen, r) in engine.hopf_suite() {
        for (what, c) in [
            ("coassociativity", &r.coassoc),
            ("counit", &r.counit),
            ("antipode", &r.antipode),
            ("bialgebra", &r.bialgebra),
        ] {
            rep.push(CheckRow::new(s, format!("{what}:{gen}"), c.pass, None, format!("residual {}", c.residual), A_HOPF));
        }
    }
    Ok(rep)
}

fn random_cq(r: &mut ChaCha8Rng) -> CQ {
    cq(q(r.gen_range(-4..=4), r.gen_range(1..=4)), q(r.gen_range(-4..=4), r.gen_range(1..=4)))
}

fn twist_rows(rep: &mut Report, label: &str, spec: &TwistSpec, order: usize, samples: &[Vec<CQ>]) -> Result<()> {
    let s = "twist";
    let t = twist::twist_check(spec, order)?;
    let detail = format!("order {order}");
    rep.push(CheckRow::new(s, format!("cocycle:{label}"), t.cocycle, None, detail.clone(), A_TWIST));
    if let Some(c) = t.cocycle_closed_form {
        rep.push(CheckRow::new(s, format!("cocycle_closed_form:{label}"), c, None, detail.clone(), A_TWIST));
    }
    rep.push(CheckRow::new(s, format!("normalization:{label}"), t.normalization, None, detail.clone(), A_TWIST));
    rep.push(CheckRow::new(s, format!("semiclassical:{label}"), t.semiclassical, None, detail.clone(), A_TWIST));
    let w = twist::twisted_check(spec, order, samples)?;
    for (what, ok) in [
        ("coproduct_unchanged", Some(w.coproduct_unchanged)),
        ("antipode_unchanged", Some(w.antipode_unchanged)),
        ("r_closed_form", w.r_closed_form),
        ("triangularity", Some(w.triangular)),
        ("yang_baxter", Some(w.yang_baxter)),
        ("braided_commutativity", Some(w.braided_commutative)),
    ] {
        if let Some(ok) = ok {
            rep.push(CheckRow::new(s, format!("{what}:{label}"), ok, None, detail.clone(), A_TWIST));
        }
    }
    Ok(())
}

pub fn twist_suite(cfg: &RunConfig) -> Result<Report> {
    let mut rep = Report::new("twist", cfg.seed);
    let mut r = rng(cfg, 2);
    let order = cfg.twist_order;
    let ab: Vec<Vec<CQ>> = (0..2).map(|_| (0..2).map(|_| random_cq(&mut r)).collect()).collect();
    twist_rows(&mut rep, "abelian", &TwistSpec::Abelian, order, &ab)?;
    let dim = 2;
    let mo: Vec<Vec<CQ>> = (0..2).map(|_| (0..dim).map(|_| random_cq(&mut r)).collect()).collect();
    twist_rows(&mut rep, "moyal", &TwistSpec::moyal_canonical(dim), order, &mo)?;
    Ok(rep)
}

fn random_packet(g: &Arc<GroupDescriptor>, r: &mut ChaCha8Rng, span: f64) -> Result<WavePacket> {
    let mut w = WavePacket::new(g.clone());
    for _ in 0..r.gen_range(1..=3) {
        let p = random_momentum(r, g.dim(), span);
        let a = C64::new(r.gen_range(-1.0..=1.0), r.gen_range(-1.0..=1.0));
        w.insert(p, a)?;
    }
    Ok(w)
}

fn moyal_theta_of(cfg: &RunConfig) -> f64 {
    match cfg.spacetime {
        Spacetime::Preset {
            preset: Preset::MoyalExtended,
            parameter,
            ..
        } => parameter,
        _ => 1.0,
    }
}

pub fn trace_suite(cfg: &RunConfig) -> Result<Report> {
    let s = "trace";
    let tol = &cfg.tolerances;
    let mut rep = Report::new(s, cfg.seed);
    let g = Arc::new(cfg.group()?);
    let span = momentum_span(cfg);
    let mut r = rng(cfg, 3);
    let pairs = 100;
    let packets: Vec<(WavePacket, WavePacket)> = (0..pairs)
        .map(|_| Ok((random_packet(&g, &mut r, span)?, random_packet(&g, &mut r, span)?)))
        .collect::<Result<_>>()?;
    let twisted = packets
        .par_iter()
        .map(|(f, h)| wave::twisted_trace_check(f, h))
        .collect::<Result<Vec<bool>>>()?;
    let failed = twisted.iter().filter(|x| !**x).count();
    rep.push(CheckRow::new(
        s,
        format!("twisted_trace:{}", g.name()),
        failed == 0,
        None,
        format!("{failed} of {pairs} packet pairs unequal"),
        A_TRACE,
    ));
    if g.is_unimodular() {
        let plain = packets
            .par_iter()
            .map(|(f, h)| wave::plain_cyclicity_check(f, h))
            .collect::<Result<Vec<bool>>>()?;
        let failed = plain.iter().filter(|x| !**x).count();
        rep.push(CheckRow::new(
            s,
            format!("plain_cyclicity:{}", g.name()),
            failed == 0,
            None,
            format!("{failed} of {pairs} packet pairs unequal"),
            A_TRACE,
        ));
    }

    let n = cfg.truncation;
    let th = moyal_theta_of(cfg);
    let basis = |m, k| TruncatedElement::basis(n, th, m, k);
    let quads: Vec<[usize; 4]> = (0..200).map(|_| [0; 4].map(|_| r.gen_range(0..n))).collect();
    let mut product: f64 = 0.0;
    let mut trace: f64 = 0.0;
    for &[a, b, c, d] in &quads {
        let got = basis(a, b)?.star(&basis(c, d)?)?;
        let want = match moyal_matrix::basis_product(n, a, b, c, d)? {
            Some((x, y)) => basis(x, y)?,
            None => TruncatedElement::zero(n, th),
        };
        product = product.max(got.max_diff(&want));
        let t = moyal_matrix::trace_pairing(&basis(a, b)?, &basis(c, d)?)?;
        let tw = if (a, b) == (c, d) { 2.0 * std::f64::consts::PI * th } else { 0.0 };
        trace = trace.max((t - C64::new(tw, 0.0)).norm());
    }
    let mut involution: f64 = 0.0;
    for m in 0..n {
        for k in 0..n {
            involution = involution.max(basis(m, k)?.dagger().max_diff(&basis(k, m)?));
        }
    }
    let detail = format!("N = {n}");
    rep.push(CheckRow::new(s, "matrix_product", product <= tol.matrix, Some(product), detail.clone(), A_MATRIX));
    rep.push(CheckRow::new(s, "matrix_involution", involution <= tol.matrix, Some(involution), detail.clone(), A_MATRIX));
    rep.push(CheckRow::new(s, "matrix_trace", trace <= tol.matrix, Some(trace), detail.clone(), A_MATRIX));
    let probes: Vec<TruncatedElement> = (0..3)
        .map(|_| {
            let c = (0..n * n).map(|_| C64::new(r.gen_range(-1.0..=1.0), r.gen_range(-1.0..=1.0))).collect();
            TruncatedElement::from_matrix(n, th, c)
        })
        .collect::<Result<_>>()?;
    let p = moyal_matrix::partition_check(n, th, &probes)?;
    let worst = p.self_adjoint.max(p.positivity).max(p.unity).max(p.commutation).max(p.orthogonality);
    rep.push(CheckRow::new(s, "partition_of_unity", p.pass && worst == 0.0, Some(worst), detail, A_MATRIX));
    Ok(rep)
}

fn kinetic_for(g: &GroupDescriptor) -> Result<KineticSpec> {
    match g.law {
        Law::Moyal { .. } => KineticSpec::euclidean(g.clone(), 1.0),
        _ => KineticSpec::minkowski(g.clone(), 1.0),
    }
}

fn expected_verdict(g: &GroupDescriptor) -> Option<Verdict> {
    match g.law {
        Law::Moyal { .. } => Some(Verdict::Mixing),
        Law::Kappa { d, .. } if d == 2 || d == 3 => Some(Verdict::NoMixing),
        _ => None,
    }
}

fn verdict_name(v: Verdict) -> String {
    serde_json::to_value(v).unwrap().as_str().unwrap().to_string()
}

pub fn mixing_suite(cfg: &RunConfig) -> Result<Report> {
    let s = "mixing";
    let tol = &cfg.tolerances;
    let mut rep = Report::new(s, cfg.seed);
    let g = cfg.group()?;
    let classified = kinetic_for(&g).and_then(|ks| loops::mixing_classify(&ks, &MixingOptions::standard(&ks)));
    match (classified, expected_verdict(&g)) {
        (Ok(m), want) => {
            let got = verdict_name(m.verdict);
            let (pass, detail) = match want {
                Some(w) => (m.verdict == w, format!("expected {}", verdict_name(w))),
                None => (true, "no reference verdict for this spacetime".to_string()),
            };
            rep.push(CheckRow::new(s, format!("verdict:{}", g.name()), pass, None, format!("{got}; {detail}"), A_MIXING));
            rep.data.insert("verdict".into(), got.into());
            rep.data.insert("mixing".into(), serde_json::to_value(&m).unwrap());
        }
        (Err(e), Some(_)) => rep.push(CheckRow::error(s, format!("verdict:{}", g.name()), &e, A_MIXING)),
        (Err(e), None) => rep.push(CheckRow::new(
            s,
            format!("verdict:{}", g.name()),
            true,
            None,
            format!("not classified ({e}); no reference verdict for this spacetime"),
            A_MIXING,
        )),
    }

    let b = loops::bessel_oracle_compare(&[0.5, 1.0, 2.0], &[0.5, 1.0, 2.0], &[2, 3], tol.bessel)?;
    let dev = fmax(b.max_deviation.values().copied());
    let ratio = b.rows.first().map(|r| r.ratio).unwrap_or(f64::NAN);
    rep.push(CheckRow::new(
        s,
        "kappa_bessel_ratio",
        b.pass && dev <= tol.bessel,
        Some(dev),
        format!("oracle/closed form = {ratio:.12}"),
        A_LOOP,
    ));
    let np = loops::nonplanar_from_c(0.01, 1.0)?;
    rep.push(CheckRow::new(s, "moyal_nonplanar_closed_form", np.rel_error <= tol.nonplanar, Some(np.rel_error), "c = 0.01, m = 1", A_LOOP));
    let mut worst: f64 = 0.0;
    let mut quad: f64 = 0.0;
    for c in [1e-4, 1e-5, 1e-6, 1e-8] {
        let v = loops::nonplanar_from_c(c, 1.0)?;
        worst = worst.max((v.asymptotic_ratio - 1.0).abs());
        quad = quad.max(v.rel_error);
    }
    rep.push(CheckRow::new(
        s,
        "moyal_nonplanar_asymptotic",
        worst <= tol.asymptotic && quad <= tol.nonplanar,
        Some(worst),
        "m²c ∈ {1e-4, 1e-5, 1e-6, 1e-8}",
        A_MIXING,
    ));
    let rec = loops::two_point_assemble();
    let abelian = GroupDescriptor::from_structure(StructureConstants::zero("abelian", 4, 0.0), 1);
    let c = loops::specialize(&rec, &abelian)?.total_coefficient();
    rep.push(CheckRow::new(
        s,
        "commutative_limit_coefficient",
        c == Some(q(1, 2)),
        None,
        format!("{}", c.map(|c| c.to_string()).unwrap_or("none".into())),
        A_LOOP,
    ));
    let moyal = GroupDescriptor::moyal(moyal_theta_of(cfg), 4, MoyalConvention::PaperVerbatim)?;
    let f = loops::specialize(&rec, &moyal)?.phase_form();
    rep.push(CheckRow::new(
        s,
        "moyal_phase_form",
        f == Some((q(1, 6), q(2, 1), q(1, 1))),
        None,
        match &f {
            Some((a, b, c)) => format!("({a})({b} + {c}·phase)"),
            None => "none".into(),
        },
        A_LOOP,
    ));
    for (label, kind, want) in [
        ("real_phi4", FieldKind::RealPhi4, (12, 8)),
        ("charged_orientable", FieldKind::ChargedOrientable, (4, 4)),
        ("charged_nonorientable", FieldKind::ChargedNonorientable, (4, 2)),
    ] {
        let d = loops::diagram_enumerate(kind);
        let got = (d.len(), d.iter().filter(|c| c.planar).count());
        rep.push(CheckRow::new(
            s,
            format!("diagram_count:{label}"),
            got == want,
            None,
            format!("{} total, {} planar, {} non-planar", got.0, got.1, got.0 - got.1),
            A_WICK,
        ));
    }
    Ok(rep)
}

fn kappa_setup(cfg: &RunConfig) -> (f64, usize) {
    match cfg.spacetime {
        Spacetime::Preset {
            preset: Preset::KappaMinkowski,
            parameter,
            dim,
        } => (parameter, dim - 1),
        _ => (1.0, 3),
    }
}

fn random_poly(r: &mut ChaCha8Rng, n: usize, max_degree: u32) -> MPoly {
    let mut p = MPoly::zero(n);
    for _ in 0..r.gen_range(0..=4) {
        let mut e = vec![0u32; n];
        for _ in 0..r.gen_range(0..=max_degree) {
            e[r.gen_range(0..n)] += 1;
        }
        p.add_term(e, q(r.gen_range(-5..=5), r.gen_range(1..=3)));
    }
    p
}

fn random_theta(r: &mut ChaCha8Rng, n: usize) -> Vec<Vec<Q>> {
    let mut t = vec![vec![Q::zero(); n]; n];
    for a in 0..n {
        for b in a + 1..n {
            t[a][b] = q(r.gen_range(-4..=4), r.gen_range(1..=3));
            t[b][a] = -t[a][b].clone();
        }
    }
    t
}

pub fn gauge_suite(cfg: &RunConfig) -> Result<Report> {
    let s = "gauge";
    let tol = cfg.tolerances.gauge;
    let mut rep = Report::new(s, cfg.seed);
    let (kappa, d) = kappa_setup(cfg);
    let ds: Vec<usize> = (1..=8).collect();
    let p0s: Vec<f64> = [-2.0, -0.3, 0.0, 0.7, 3.0].iter().map(|x| x * kappa).collect();
    let rows = gauge::dimension_constraint_scan(&ds, kappa, &p0s)?;
    let zs = gauge::dimension_zero_set(&rows);
    let nearest = fmax(rows.iter().filter(|r| r.d != 4).map(|r| -r.max_deviation)).abs();
    rep.push(CheckRow::new(s, "dimension_zero_set", zs == vec![4], Some(nearest), format!("zero set {zs:?} over d = 1..8"), A_DIM));

    let g = Arc::new(GroupDescriptor::kappa_minkowski(kappa, d)?);
    let mut r = rng(cfg, 5);
    let wave_at = |r: &mut ChaCha8Rng, amp: C64| -> Result<WavePacket> {
        let p: Vec<f64> = (0..=d).map(|_| r.gen_range(-1.0..=1.0) * kappa).collect();
        WavePacket::plane(g.clone(), &p)?.scale(amp)
    };
    let cases = 50;
    let (mut leib, mut real, mut flat, mut cov) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..cases {
        let a = GaugeField::new(
            (0..=d)
                .map(|_| {
                    let amp = C64::new(r.gen_range(-1.0..=1.0), r.gen_range(-1.0..=1.0));
                    wave_at(&mut r, amp)
                })
                .collect::<Result<_>>()?,
        )?;
        let phase = C64::from_polar(1.0, r.gen_range(0.0..std::f64::consts::TAU));
        let u = wave_at(&mut r, phase)?;
        let mu = r.gen_range(0..=d);
        let f = &a.components[0];
        let h = &a.components[d];
        leib = leib.max(gauge::twisted_leibniz_check(mu, f, h)?);
        real = real.max(gauge::twisted_reality_check(mu, &f.add(h)?)?);
        let pure = gauge::gauge_transform(&GaugeField::zero(&g), &u)?;
        for row in gauge::field_strength(&pure)? {
            for c in row {
                flat = flat.max(gauge::packet_norm(&c));
            }
        }
        cov = cov.max(gauge::covariance_check(&a, &u)?);
    }
    let detail = format!("{cases} single-wave configurations, kappa = {kappa}, d = {d}");
    rep.push(CheckRow::new(s, "twisted_leibniz", leib < tol, Some(leib), detail.clone(), A_GAUGE));
    rep.push(CheckRow::new(s, "twisted_reality", real < tol, Some(real), detail.clone(), A_GAUGE));
    rep.push(CheckRow::new(s, "pure_gauge_flatness", flat < tol, Some(flat), detail.clone(), A_GAUGE));
    rep.push(CheckRow::new(s, "covariance", cov < tol, Some(cov), detail, A_GAUGE));

    let p: Vec<f64> = (0..=d).map(|j| 0.4 - 0.3 * j as f64).collect();
    let ep = WavePacket::plane(g.clone(), &p)?;
    let herm = ep.add(&ep.act(Generator::E(-1))?.dagger()?)?;
    let h = gauge::hermiticity_check(&GaugeField::new(vec![herm; d + 1])?)?;
    let hr = fmax(h.into_iter());
    rep.push(CheckRow::new(s, "hermiticity", hr < tol, Some(hr), "A = e_p + (E⁻¹e_p)†", A_GAUGE));

    let nvars = 3;
    let mut bad = 0;
    let fields = 20;
    for _ in 0..fields {
        let th = random_theta(&mut r, nvars);
        let a: Vec<MPoly> = (0..nvars).map(|_| random_poly(&mut r, nvars, 2)).collect();
        let l = random_poly(&mut r, nvars, 2);
        let pr = SwProblem::new(th, a, Some(l))?;
        if sw::sw_run(&pr).consistency_zero != Some(true) {
            bad += 1;
        }
    }
    rep.push(CheckRow::new(
        s,
        "sw_consistency",
        bad == 0,
        None,
        format!("{bad} of {fields} degree-2 fields with nonzero residual"),
        A_SW,
    ));
    let th = random_theta(&mut r, 2);
    let lin = SwProblem::new(th.clone(), vec![MPoly::zero(2), MPoly::var(2, 0)], None)?;
    let f = sw::sw_field_strength(&lin);
    let want = MPoly::constant(2, q(1, 1) + th[0][1].clone());
    rep.push(CheckRow::new(s, "sw_linear_field_strength", f[0][1] == want, None, "A = (0, x⁰)", A_SW));
    Ok(rep)
}

pub fn causality_suite(cfg: &RunConfig) -> Result<Report> {
    let s = "causality";
    let mut rep = Report::new(s, cfg.seed);
    let (kappa, _) = kappa_setup(cfg);
    let seed = cfg.seed ^ 0xC0DE;
    let grid = GridSpec::standard(cfg.grid, GridScheme::Spectral, kappa)?;
    let vs = [-1.0, -0.5, 0.0, 0.5, 1.0];
    for row in causality::cone_sweep(&grid, kappa, &vs, cfg.states, seed)? {
        rep.push(CheckRow::new(
            s,
            format!("cone:v={}", row.v),
            row.pass,
            Some(row.margin),
            format!("{} points, {} states, worst of a = ±1", cfg.grid, cfg.states),
            A_CONE,
        ));
    }
    let fast = causality::cone_condition(&grid, kappa, 1, 1.0, 2.0, cfg.states, seed)?;
    rep.push(CheckRow::new(
        s,
        "cone_rejects:v=2",
        !fast.pass,
        Some(fast.margin),
        "superluminal direction must fail",
        A_CONE,
    ));
    let lr = causality::lorentzian_axiom_check(&grid, kappa)?;
    rep.push(CheckRow::new(s, "fundamental_symmetry_involutive", lr.involutive, None, "I² = 1", A_LORENTZ));
    rep.push(CheckRow::new(s, "fundamental_symmetry_self_adjoint", lr.self_adjoint, None, "I† = I", A_LORENTZ));
    let w = grid.w;
    let fwd = causality::dirac_refinement(64, 3, w, GridScheme::Forward, kappa)?;
    let ratios: Vec<f64> = fwd.windows(2).map(|x| x[0].1 / x[1].1).collect();
    let ok = ratios.iter().all(|r| (1.8..=2.2).contains(r));
    let worst = fmax(ratios.iter().map(|r| (r - 2.0).abs()));
    rep.push(CheckRow::new(
        s,
        "dirac_residual_refinement:forward",
        ok,
        Some(worst),
        format!("r(n)/r(2n) = {ratios:.4?}"),
        A_LORENTZ,
    ));
    for sch in [GridScheme::Central, GridScheme::Spectral] {
        let res = causality::dirac_refinement(64, 2, w, sch, kappa)?;
        let worst = fmax(res.iter().map(|x| x.1));
        rep.push(CheckRow::new(
            s,
            format!("dirac_residual:{}", serde_json::to_value(sch).unwrap().as_str().unwrap()),
            worst < 1e-12,
            Some(worst),
            "antisymmetric derivative",
            A_LORENTZ,
        ));
    }
    let mut worst: f64 = 0.0;
    let mut r = rng(cfg, 6);
    for gp in causality::state_family(20, seed, kappa) {
        let psi = StateVector::gaussian(&grid, gp.center, gp.sigma, 0.0)?;
        let t = r.gen_range(0.0..3.0);
        let a = if r.gen_bool(0.5) { 1 } else { -1 };
        let m = causality::sll_margin(&psi, &psi.phase_shifted(&grid, t), &grid, kappa, a)?;
        worst = worst.max((m - t).abs());
    }
    rep.push(CheckRow::new(
        s,
        "sll_phase_shift",
        worst < cfg.tolerances.sll,
        Some(worst),
        "sll margin of ψ and ψ·e^{itp₀} equals t",
        A_SLL,
    ));
    Ok(rep)
}
