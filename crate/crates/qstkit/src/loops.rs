//! One-loop two-point machinery for φ⁴ on a deformed momentum group.

use crate::exact::{q, Q};
use crate::group::{GroupDescriptor, Law, MoyalConvention, Ordering};
use crate::quad::{integrate_real, integrate_with_breaks, QuadOptions};
use crate::special::{bessel_k, sphere_area};
use crate::{Error, Result, C64};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;

pub const DIVERGENT_SLOPE: f64 = 0.1;
pub const CONVERGENT_SLOPE: f64 = 0.02;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[derive(Clone, Debug)]
pub struct KineticSpec {
    pub group: GroupDescriptor,
    /// Diagonal metric g^{μμ}; for Moyal the phase slot is excluded.
    pub signature: Vec<f64>,
    pub mass: f64,
}

/// Number of momentum components entering the kinetic term.
pub fn kinetic_dim(group: &GroupDescriptor) -> usize {
    match group.law {
        Law::Moyal { .. } => group.dim() - 1,
        _ => group.dim(),
    }
}

impl KineticSpec {
    pub fn new(group: GroupDescriptor, signature: Vec<f64>, mass: f64) -> Result<Self> {
        let n = kinetic_dim(&group);
        if signature.len() != n {
            return Err(Error::DimMismatch { expected: n, got: signature.len() });
        }
        if signature.iter().any(|s| s.abs() != 1.0) {
            return Err(Error::BadParameter("signature entries must be ±1".into()));
        }
        if !(mass >= 0.0) {
            return Err(Error::BadParameter(format!("mass {mass} must be non-negative")));
        }
        Ok(KineticSpec { group, signature, mass })
    }

    /// (+,−,…,−): K = −k₀² + k_j² + m² in the commutative limit.
    pub fn minkowski(group: GroupDescriptor, mass: f64) -> Result<Self> {
        let n = kinetic_dim(&group);
        let mut s = vec![-1.0; n];
        s[0] = 1.0;
        Self::new(group, s, mass)
    }

    /// g = −δ, so that K = k² + m² when ⊟ = −.
    pub fn euclidean(group: GroupDescriptor, mass: f64) -> Result<Self> {
        let n = kinetic_dim(&group);
        Self::new(group, vec![-1.0; n], mass)
    }
}

fn full_momentum(group: &GroupDescriptor, k: &[f64]) -> Vec<C64> {
    let mut v: Vec<C64> = k.iter().map(|&x| c(x)).collect();
    v.resize(group.dim(), c(0.0));
    v
}

/// K(k) = g^{μν} k_μ (⊟k)_ν + m²
pub fn kinetic_eval(ks: &KineticSpec, k: &[f64]) -> Result<f64> {
    let n = kinetic_dim(&ks.group);
    if k.len() != n {
        return Err(Error::DimMismatch { expected: n, got: k.len() });
    }
    let kk = full_momentum(&ks.group, k);
    let inv = ks.group.inv(&kk)?;
    let s: f64 = (0..n).map(|mu| ks.signature[mu] * k[mu] * inv[mu].re).sum();
    Ok(s + ks.mass * ks.mass)
}

/// K(⊟k) − K(k)
pub fn parity_residual(ks: &KineticSpec, k: &[f64]) -> Result<f64> {
    let n = kinetic_dim(&ks.group);
    let inv = ks.group.inv(&full_momentum(&ks.group, k))?;
    let mk: Vec<f64> = inv[..n].iter().map(|z| z.re).collect();
    Ok(kinetic_eval(ks, &mk)? - kinetic_eval(ks, k)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    SharpCutoff,
    Schwinger,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegulatorSpec {
    pub scheme: Scheme,
    pub lambda: f64,
    pub wick: bool,
}

impl RegulatorSpec {
    pub fn new(scheme: Scheme, lambda: f64, wick: bool) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::BadParameter(format!("cutoff Λ = {lambda} must be positive")));
        }
        Ok(RegulatorSpec { scheme, lambda, wick })
    }
}

fn opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-12,
        max_intervals: 8000,
    }
}

/// ∫₀^∞ α^{−ν−1} e^{−αm² − c/α} dα by quadrature in s = log α.
pub fn schwinger_quadrature(nu: f64, m: f64, cc: f64) -> Result<f64> {
    if !(cc > 0.0) {
        return Err(Error::BadParameter(format!("Schwinger parameter c = {cc} must be positive")));
    }
    let m2 = m * m;
    let f = |s: f64| {
        let a = s.exp();
        let v = (-nu * s - a * m2 - cc / a).exp();
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let lo = (cc / 800.0).ln();
    let hi = if m2 > 0.0 {
        (800.0 / m2).ln()
    } else if nu > 0.0 {
        (cc / nu).ln() + 40.0 / nu
    } else {
        return Err(Error::BadParameter("massless Schwinger integral diverges for ν ≤ 0".into()));
    };
    let peak = if m2 > 0.0 {
        // stationary point of −νs − m²e^s − ce^{−s}
        let a = (-nu + (nu * nu + 4.0 * m2 * cc).sqrt()) / (2.0 * m2);
        a.ln()
    } else {
        (cc / nu).ln()
    };
    let mut pts = vec![lo];
    for off in [-6.0, -2.0, 0.0, 2.0, 6.0] {
        let x = peak + off;
        if x > lo && x < hi {
            pts.push(x);
        }
    }
    pts.push(hi);
    pts.dedup();
    let r = integrate_with_breaks(|s| c(f(s)), &pts, opts())?;
    Ok(r.value.re)
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("{what} = {v}")))
    }
}

/// 2(m²/c)^{ν/2} K_ν(2m√c), or Γ(ν)c^{−ν} at m = 0.
pub fn schwinger_closed_form(nu: f64, m: f64, cc: f64) -> Result<f64> {
    if m == 0.0 {
        if nu <= 0.0 {
            return Err(Error::BadParameter("massless Schwinger integral diverges for ν ≤ 0".into()));
        }
        return finite(gamma(nu) * cc.powf(-nu), "Γ(ν)c^{−ν}");
    }
    let v = 2.0 * (m * m / cc).powf(nu / 2.0) * bessel_k(nu, 2.0 * m * cc.sqrt())?;
    finite(v, "Schwinger closed form")
}

fn gamma(x: f64) -> f64 {
    // half-integer and integer arguments only appear here
    if (x - x.round()).abs() < 1e-12 {
        (1..x.round() as u64).map(|k| k as f64).product()
    } else {
        let mut g = PI.sqrt();
        let mut y = 0.5;
        while y < x - 1e-12 {
            g *= y;
            y += 1.0;
        }
        g
    }
}

/// How the propagator integral reduces to one dimension.
#[derive(Clone, Debug, PartialEq)]
enum Reduction {
    /// Lebesgue measure and K = |k|² + m² in n dimensions (after Wick
    /// rotation when the metric is Lorentzian).
    Radial { n: usize },
    /// Right-ordered κ-Minkowski, Lorentzian metric, Wick-rotated:
    /// inner k₀ integral (π/ω)e^{−aω} with a = d/2κ.
    KappaWick { d: usize, a: f64 },
}

fn is_abelian(group: &GroupDescriptor) -> bool {
    group.structure.entries().iter().all(|(_, _, _, v)| v.norm() == 0.0)
}

fn reduction(ks: &KineticSpec, wick: bool) -> Result<Reduction> {
    let n = kinetic_dim(&ks.group);
    let lorentzian = ks.signature[0] == 1.0 && ks.signature[1..].iter().all(|&s| s == -1.0);
    let euclidean = ks.signature.iter().all(|&s| s == -1.0);
    let unsupported = || {
        Error::BadParameter(format!(
            "no propagator reduction for {} with signature {:?}",
            ks.group.name(),
            ks.signature
        ))
    };
    let flat = matches!(ks.group.law, Law::Moyal { .. }) || (matches!(ks.group.law, Law::Bch { .. }) && is_abelian(&ks.group));
    match &ks.group.law {
        _ if flat => {
            if euclidean || (lorentzian && wick) {
                Ok(Reduction::Radial { n })
            } else if lorentzian {
                Err(Error::BadParameter("Lorentzian propagator integral requires Wick rotation".into()))
            } else {
                Err(unsupported())
            }
        }
        Law::Kappa {
            kappa,
            d,
            ordering: Ordering::Right,
        } if lorentzian => {
            if !wick {
                return Err(Error::BadParameter("Lorentzian propagator integral requires Wick rotation".into()));
            }
            Ok(Reduction::KappaWick {
                d: *d,
                a: *d as f64 / (2.0 * kappa),
            })
        }
        _ => Err(unsupported()),
    }
}

/// ∫λ(k)K⁻¹(k) with the loop normalization and the Wick factor i dropped.
pub fn propagator_value(ks: &KineticSpec, reg: &RegulatorSpec) -> Result<f64> {
    let m = ks.mass;
    let lam = reg.lambda;
    match (reduction(ks, reg.wick)?, reg.scheme) {
        (Reduction::Radial { n }, Scheme::SharpCutoff) => {
            let (v, _) = integrate_real(|r| r.powi(n as i32 - 1) / (r * r + m * m), 0.0, lam, opts())?;
            Ok(sphere_area(n - 1) * v)
        }
        (Reduction::Radial { n }, Scheme::Schwinger) => {
            let nu = n as f64 / 2.0 - 1.0;
            Ok(PI.powf(n as f64 / 2.0) * schwinger_quadrature(nu, m, 1.0 / (lam * lam))?)
        }
        (Reduction::KappaWick { d, a }, Scheme::SharpCutoff) => {
            let (v, _) = integrate_real(
                |r| {
                    let w = (r * r + m * m).sqrt();
                    if w == 0.0 {
                        return 0.0;
                    }
                    r.powi(d as i32 - 1) * PI / w * (-a * w).exp()
                },
                0.0,
                lam,
                opts(),
            )?;
            Ok(sphere_area(d - 1) * v)
        }
        (Reduction::KappaWick { d, a }, Scheme::Schwinger) => {
            let nu = (d as f64 - 1.0) / 2.0;
            Ok(PI.powf((d as f64 + 1.0) / 2.0) * schwinger_quadrature(nu, m, a * a / 4.0 + 1.0 / (lam * lam))?)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Trend {
    Divergent,
    Convergent,
    Inconclusive,
}

/// Least-squares slope of log|v| against log x.
pub fn log_slope(xs: &[f64], vs: &[f64]) -> Option<f64> {
    if xs.len() < 2 || vs.iter().any(|v| !(v.abs() > 0.0) || !v.is_finite()) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let lv: Vec<f64> = vs.iter().map(|v| v.abs().ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let mv = lv.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxv: f64 = lx.iter().zip(&lv).map(|(x, v)| (x - mx) * (v - mv)).sum();
    (sxx > 0.0).then(|| sxv / sxx)
}

pub fn classify_slope(slope: Option<f64>) -> Trend {
    match slope {
        Some(s) if s > DIVERGENT_SLOPE => Trend::Divergent,
        Some(s) if s.abs() < CONVERGENT_SLOPE => Trend::Convergent,
        _ => Trend::Inconclusive,
    }
}

/// Slope over the last decade of the sweep.
pub fn tail_slope(xs: &[f64], vs: &[f64]) -> Option<f64> {
    let top = xs.iter().cloned().fold(f64::MIN, f64::max);
    let idx: Vec<usize> = (0..xs.len()).filter(|&i| xs[i] >= top / 10.0 * (1.0 - 1e-12)).collect();
    let idx = if idx.len() >= 2 { idx } else { (0..xs.len()).collect() };
    let x: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
    let v: Vec<f64> = idx.iter().map(|&i| vs[i]).collect();
    log_slope(&x, &v)
}

/// Geometric grid start, start·factor, … up to stop.
pub fn geometric_grid(start: f64, stop: f64, factor: f64) -> Result<Vec<f64>> {
    if !(start > 0.0) || !(stop >= start) || !(factor > 1.0) {
        return Err(Error::BadParameter(format!("bad geometric grid {start}:{stop}:{factor}")));
    }
    let mut out = Vec::new();
    let mut x = start;
    while x <= stop * (1.0 + 1e-12) {
        out.push(x);
        x *= factor;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropagatorReport {
    pub rows: Vec<SweepRow>,
    pub slope: Option<f64>,
    pub trend: Trend,
}

pub fn propagator_integral(ks: &KineticSpec, scheme: Scheme, wick: bool, grid: &[f64]) -> Result<PropagatorReport> {
    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&l| {
            let reg = RegulatorSpec::new(scheme, l, wick)?;
            Ok(SweepRow { lambda: l, value: propagator_value(ks, &reg)? })
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    let vs: Vec<f64> = rows.iter().map(|r| r.value).collect();
    let slope = tail_slope(&xs, &vs);
    Ok(PropagatorReport {
        rows,
        slope,
        trend: classify_slope(slope),
    })
}

/// 4π(4πκm/d)^{(d−1)/2} K_{(d−1)/2}(md/2κ)
pub fn kmink_bessel_closed_form(m: f64, kappa: f64, d: usize) -> Result<f64> {
    let nu = (d as f64 - 1.0) / 2.0;
    let v = 4.0 * PI * (4.0 * PI * kappa * m / d as f64).powf(nu) * bessel_k(nu, m * d as f64 / (2.0 * kappa))?;
    finite(v, "Bessel closed form")
}

/// Ω_{d−1}∫₀^∞ r^{d−1}(π/ω)e^{−dω/2κ}dr, ω = √(r²+m²).
pub fn kmink_radial_oracle(m: f64, kappa: f64, d: usize) -> Result<f64> {
    let a = d as f64 / (2.0 * kappa);
    let f = |r: f64| {
        let w = (r * r + m * m).sqrt();
        r.powi(d as i32 - 1) * PI / w * (-a * w).exp()
    };
    // integrand is negligible beyond a·r ≈ 800
    let top = (800.0 / a).max(10.0 * m);
    let scale = 1.0 / a;
    let mut pts = vec![0.0];
    let mut x = scale / 16.0;
    while x < top {
        pts.push(x);
        x *= 4.0;
    }
    pts.push(top);
    let r = integrate_with_breaks(|r| c(f(r)), &pts, opts())?;
    Ok(sphere_area(d - 1) * r.value.re)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BesselRow {
    pub m: f64,
    pub kappa: f64,
    pub d: usize,
    pub oracle: f64,
    pub closed_form: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BesselReport {
    pub rows: Vec<BesselRow>,
    /// max |ratio/ratio₀ − 1| per d
    pub max_deviation: BTreeMap<usize, f64>,
    pub pass: bool,
}

pub fn bessel_oracle_compare(ms: &[f64], kappas: &[f64], ds: &[usize], tol: f64) -> Result<BesselReport> {
    let mut cases = Vec::new();
    for &d in ds {
        for &m in ms {
            for &k in kappas {
                cases.push((m, k, d));
            }
        }
    }
    let rows: Vec<BesselRow> = cases
        .par_iter()
        .map(|&(m, kappa, d)| {
            let oracle = kmink_radial_oracle(m, kappa, d)?;
            let closed_form = kmink_bessel_closed_form(m, kappa, d)?;
            Ok(BesselRow {
                m,
                kappa,
                d,
                oracle,
                closed_form,
                ratio: oracle / closed_form,
            })
        })
        .collect::<Result<_>>()?;
    let mut max_deviation = BTreeMap::new();
    for &d in ds {
        let rs: Vec<f64> = rows.iter().filter(|r| r.d == d).map(|r| r.ratio).collect();
        let dev = rs.iter().map(|r| (r / rs[0] - 1.0).abs()).fold(0.0, f64::max);
        max_deviation.insert(d, dev);
    }
    let pass = max_deviation.values().all(|&v| v < tol);
    Ok(BesselReport { rows, max_deviation, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonPlanarValue {
    pub c: f64,
    pub lambda_eff_sq: f64,
    pub quadrature: f64,
    pub closed_form: f64,
    pub rel_error: f64,
    pub asymptotic: f64,
    pub asymptotic_ratio: f64,
}

/// (pΘ)² = p_μΘ^{μν}p_ρΘ^{ρσ}δ_{νσ}
pub fn p_theta_sq(p: &[f64], theta: &[Vec<f64>]) -> f64 {
    let n = theta.len();
    (0..n)
        .map(|nu| (0..n).map(|mu| p[mu] * theta[mu][nu]).sum::<f64>().powi(2))
        .sum()
}

/// Schwinger-regulated non-planar Moyal integral with c = (pΘ)²/4 + 1/Λ².
pub fn moyal_nonplanar(p: &[f64], theta: &[Vec<f64>], m: f64, lambda: f64) -> Result<NonPlanarValue> {
    if !(lambda > 0.0) {
        return Err(Error::BadParameter(format!("cutoff Λ = {lambda} must be positive")));
    }
    let cc = p_theta_sq(p, theta) / 4.0 + 1.0 / (lambda * lambda);
    nonplanar_from_c(cc, m)
}

pub fn nonplanar_from_c(cc: f64, m: f64) -> Result<NonPlanarValue> {
    let quadrature = schwinger_quadrature(1.0, m, cc)?;
    let closed_form = schwinger_closed_form(1.0, m, cc)?;
    let leff = 1.0 / cc;
    let asymptotic = if m > 0.0 { leff - m * m * (leff / (m * m)).ln() } else { leff };
    Ok(NonPlanarValue {
        c: cc,
        lambda_eff_sq: leff,
        quadrature,
        closed_form,
        rel_error: (quadrature / closed_form - 1.0).abs(),
        asymptotic,
        asymptotic_ratio: quadrature / asymptotic,
    })
}

/// Laurent polynomial in Δ(q), Δ(k) with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DeltaPoly(pub BTreeMap<(i32, i32), Q>);

impl DeltaPoly {
    pub fn from_terms(t: &[((i32, i32), i64)]) -> Self {
        let mut p = DeltaPoly::default();
        for &(k, v) in t {
            p.add_term(k, Q::from_integer(v.into()));
        }
        p
    }

    fn add_term(&mut self, k: (i32, i32), v: Q) {
        let e = self.0.entry(k).or_insert_with(Q::zero);
        *e += v;
        if e.is_zero() {
            self.0.remove(&k);
        }
    }

    pub fn mul(&self, o: &DeltaPoly) -> DeltaPoly {
        let mut out = DeltaPoly::default();
        for (&(a, b), x) in &self.0 {
            for (&(c2, d), y) in &o.0 {
                out.add_term((a + c2, b + d), x * y);
            }
        }
        out
    }

    pub fn eval(&self, dq: f64, dk: f64) -> f64 {
        self.0
            .iter()
            .map(|(&(a, b), v)| {
                let f: f64 = num_traits::ToPrimitive::to_f64(v).unwrap();
                f * dq.powi(a) * dk.powi(b)
            })
            .sum()
    }

    /// Value at Δ ≡ 1.
    pub fn at_unimodular(&self) -> Q {
        self.0.values().fold(Q::zero(), |a, b| a + b)
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(&(a, b), v)| {
                let mut s = v.to_string();
                if a != 0 {
                    s += &if a == 1 { "Δ(q)".to_string() } else { format!("Δ(q)^{a}") };
                }
                if b != 0 {
                    s += &if b == 1 { "Δ(k)".to_string() } else { format!("Δ(k)^{b}") };
                }
                s
            })
            .collect();
        parts.join(" + ")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conservation {
    /// δ(p⊞q)
    Planar,
    /// δ(p⊞k⊞q⊟k)
    NonPlanar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoPointTerm {
    /// multiplies g²
    pub coupling: Q,
    pub factors: Vec<DeltaPoly>,
    pub conservation: Conservation,
}

impl TwoPointTerm {
    pub fn expanded(&self) -> DeltaPoly {
        self.factors.iter().fold(DeltaPoly::from_terms(&[((0, 0), 1)]), |a, f| a.mul(f))
    }

    /// λ(k)K⁻¹(k)·Π factors at the given Δ values.
    pub fn integrand(&self, ks: &KineticSpec, q: &[f64], k: &[f64]) -> Result<f64> {
        let kk = full_momentum(&ks.group, k);
        let qq = full_momentum(&ks.group, q);
        let dk = ks.group.modular(&kk);
        let dq = ks.group.modular(&qq);
        Ok(ks.group.haar_left(&kk) / kinetic_eval(ks, k)? * self.expanded().eval(dq, dk))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoPointRecord {
    pub planar: TwoPointTerm,
    pub nonplanar: TwoPointTerm,
}

pub fn two_point_assemble() -> TwoPointRecord {
    let coupling = q(1, 24);
    TwoPointRecord {
        planar: TwoPointTerm {
            coupling: coupling.clone(),
            factors: vec![
                DeltaPoly::from_terms(&[((0, 0), 1), ((1, 0), 1)]),
                DeltaPoly::from_terms(&[((0, 0), 3), ((0, 1), 1)]),
            ],
            conservation: Conservation::Planar,
        },
        nonplanar: TwoPointTerm {
            coupling,
            factors: vec![
                DeltaPoly::from_terms(&[((0, 0), 1), ((0, -1), 1)]),
                DeltaPoly::from_terms(&[((0, 0), 1), ((1, -2), 1)]),
            ],
            conservation: Conservation::NonPlanar,
        },
    }
}

/// What δ(p⊞k⊞q⊟k) becomes on a given group.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum NonPlanarDelta {
    /// k drops out entirely: δ(p⊞q).
    Collapsed,
    /// δ(p+q) on the kinetic components times e^{iφ·k}.
    Phase { phi: Vec<f64> },
    /// genuinely k-dependent constraint, solved by `delta_solve_nonplanar`.
    Deformed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Specialized {
    pub delta: NonPlanarDelta,
    /// planar and non-planar weights at Δ ≡ 1, or None if Δ ≢ 1
    pub planar_weight: Option<Q>,
    pub nonplanar_weight: Option<Q>,
}

impl Specialized {
    /// g²·(this)·δ(p+q)∫K⁻¹ when the non-planar delta collapses.
    pub fn total_coefficient(&self) -> Option<Q> {
        match (&self.delta, &self.planar_weight, &self.nonplanar_weight) {
            (NonPlanarDelta::Collapsed, Some(a), Some(b)) => Some(a + b),
            _ => None,
        }
    }

    /// (w, a, b) with weights w(a + b e^{iφk}).
    pub fn phase_form(&self) -> Option<(Q, Q, Q)> {
        match (&self.delta, &self.planar_weight, &self.nonplanar_weight) {
            (NonPlanarDelta::Phase { .. }, Some(a), Some(b)) => Some((b.clone(), a / b, Q::one())),
            _ => None,
        }
    }
}

/// Linear form φ with p⊞k⊞(⊟p)⊟k = (0, iφ·k) read as a phase.
pub fn moyal_phase_form(group: &GroupDescriptor, p: &[f64]) -> Result<Vec<f64>> {
    let Law::Moyal { convention, .. } = &group.law else {
        return Err(Error::BadParameter(format!("{} is not a Moyal group", group.name())));
    };
    let n = group.dim() - 1;
    let pp = full_momentum(group, p);
    let mp = group.inv(&pp)?;
    let mut phi = Vec::with_capacity(n);
    for mu in 0..n {
        let mut k = vec![c(0.0); n + 1];
        k[mu] = c(1.0);
        let a = group.add(&pp, &k)?;
        let b = group.add(&a, &mp)?;
        let r = group.add(&b, &group.inv(&k)?)?;
        let inc = r[n];
        phi.push(match convention {
            // the increment is i·(2pΘk); its real reading is the phase
            MoyalConvention::PaperVerbatim => (inc / C64::new(0.0, 1.0)).re,
            MoyalConvention::Bch => inc.re,
        });
    }
    Ok(phi)
}

fn nonplanar_delta(group: &GroupDescriptor) -> Result<NonPlanarDelta> {
    let n = kinetic_dim(group);
    let p: Vec<f64> = (0..n).map(|i| 0.3 + 0.1 * i as f64).collect();
    match &group.law {
        Law::Moyal { .. } => Ok(NonPlanarDelta::Phase { phi: moyal_phase_form(group, &p)? }),
        Law::Bch { .. } if is_abelian(group) => {
            let pp = full_momentum(group, &p);
            let qq: Vec<C64> = pp.iter().map(|v| -v * 0.7).collect();
            let k: Vec<C64> = (0..n).map(|i| c(1.1 - 0.2 * i as f64)).collect();
            let a = group.add(&group.add(&group.add(&pp, &k)?, &qq)?, &group.inv(&k)?)?;
            let b = group.add(&pp, &qq)?;
            if crate::group::norm(&a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<_>>()) < 1e-12 {
                Ok(NonPlanarDelta::Collapsed)
            } else {
                Ok(NonPlanarDelta::Deformed)
            }
        }
        _ => Ok(NonPlanarDelta::Deformed),
    }
}

pub fn specialize(record: &TwoPointRecord, group: &GroupDescriptor) -> Result<Specialized> {
    let uni = group.is_unimodular();
    let w = |t: &TwoPointTerm| uni.then(|| &t.coupling * t.expanded().at_unimodular());
    Ok(Specialized {
        delta: nonplanar_delta(group)?,
        planar_weight: w(&record.planar),
        nonplanar_weight: w(&record.nonplanar),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Mixing,
    NoMixing,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Criterion {
    pub holds: Option<bool>,
    pub slope: Option<f64>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvidenceRow {
    pub lambda: f64,
    pub planar: f64,
    pub nonplanar: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingReport {
    pub planar_uv_divergent: Criterion,
    pub nonplanar_ir_singular: Criterion,
    pub nonplanar_uv_finite: Criterion,
    pub verdict: Verdict,
    pub evidence: Vec<EvidenceRow>,
}

pub fn verdict_of(crit: &[&Criterion]) -> Verdict {
    if crit.iter().all(|c| c.holds == Some(true)) {
        Verdict::Mixing
    } else if crit.iter().any(|c| c.holds == Some(false)) {
        Verdict::NoMixing
    } else {
        Verdict::Inconclusive
    }
}

fn decide(slope: Option<f64>, want_divergent: bool) -> Option<bool> {
    match classify_slope(slope) {
        Trend::Divergent => Some(want_divergent),
        Trend::Convergent => Some(!want_divergent),
        Trend::Inconclusive => None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixingOptions {
    pub grid: Vec<f64>,
    pub scheme: Scheme,
    /// external momentum direction for the non-planar sweeps
    pub p: Vec<f64>,
}

impl MixingOptions {
    pub fn standard(ks: &KineticSpec) -> Self {
        let n = kinetic_dim(&ks.group);
        let mut p = vec![0.0; n];
        p[0] = 1.0;
        MixingOptions {
            grid: geometric_grid(1.0, 1e4, 10f64.sqrt()).unwrap(),
            scheme: Scheme::Schwinger,
            p,
        }
    }
}

pub fn mixing_classify(ks: &KineticSpec, o: &MixingOptions) -> Result<MixingReport> {
    let wick = ks.signature[0] == 1.0;
    let prop = propagator_integral(ks, o.scheme, wick, &o.grid)?;
    let planar = Criterion {
        holds: decide(prop.slope, true),
        slope: prop.slope,
        note: "log-log slope of the propagator integral over the last cutoff decade".into(),
    };
    let delta = nonplanar_delta(&ks.group)?;
    let n = kinetic_dim(&ks.group);
    let m = ks.mass;
    let lmax = o.grid.iter().cloned().fold(f64::MIN, f64::max);
    let (ir, uv, np_values) = match &delta {
        NonPlanarDelta::Collapsed => {
            let vals: Vec<f64> = prop.rows.iter().map(|r| r.value).collect();
            (
                Criterion {
                    holds: Some(false),
                    slope: Some(0.0),
                    note: "non-planar momentum conservation is independent of k and p".into(),
                },
                Criterion {
                    holds: decide(prop.slope, false),
                    slope: prop.slope,
                    note: "non-planar sector coincides with the propagator integral".into(),
                },
                Some(vals),
            )
        }
        NonPlanarDelta::Phase { .. } => {
            let value = |p: &[f64], l: f64| -> Result<f64> {
                let phi = moyal_phase_form(&ks.group, p)?;
                let cc = phi.iter().map(|x| x * x).sum::<f64>() / 4.0 + 1.0 / (l * l);
                let nu = n as f64 / 2.0 - 1.0;
                Ok(PI.powf(n as f64 / 2.0) * schwinger_quadrature(nu, m, cc)?)
            };
            let phi1 = moyal_phase_form(&ks.group, &o.p)?;
            let phisq = phi1.iter().map(|x| x * x).sum::<f64>();
            if phisq == 0.0 {
                return Err(Error::BadParameter("external momentum produces no non-planar phase".into()));
            }
            // p → 0 while (φ)²/4 stays above 100/Λ²
            let mut scales = Vec::new();
            let mut s = 1.0;
            while s * s * phisq / 4.0 >= 100.0 / (lmax * lmax) && scales.len() < 40 {
                scales.push(s);
                s /= 2.0;
            }
            let ir_vals: Vec<f64> = scales
                .par_iter()
                .map(|&s| value(&o.p.iter().map(|x| x * s).collect::<Vec<_>>(), lmax))
                .collect::<Result<_>>()?;
            let inv: Vec<f64> = scales.iter().map(|s| 1.0 / s).collect();
            let ir_slope = tail_slope(&inv, &ir_vals);
            let uv_vals: Vec<f64> = o.grid.par_iter().map(|&l| value(&o.p, l)).collect::<Result<_>>()?;
            let uv_slope = tail_slope(&o.grid, &uv_vals);
            (
                Criterion {
                    holds: decide(ir_slope, true),
                    slope: ir_slope,
                    note: format!("slope in 1/|p| at Λ = {lmax}"),
                },
                Criterion {
                    holds: decide(uv_slope, false),
                    slope: uv_slope,
                    note: "cutoff sweep at fixed p".into(),
                },
                Some(uv_vals),
            )
        }
        NonPlanarDelta::Deformed => (
            Criterion {
                holds: planar.holds,
                slope: prop.slope,
                note: "decided through the propagator integral".into(),
            },
            Criterion {
                holds: None,
                slope: None,
                note: "no regulator-free evaluation of the deformed non-planar constraint".into(),
            },
            None,
        ),
    };
    let evidence = prop
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| EvidenceRow {
            lambda: r.lambda,
            planar: r.value,
            nonplanar: np_values.as_ref().map(|v| v[i]),
        })
        .collect();
    let verdict = verdict_of(&[&planar, &ir, &uv]);
    Ok(MixingReport {
        planar_uv_divergent: planar,
        nonplanar_ir_singular: ir,
        nonplanar_uv_finite: uv,
        verdict,
        evidence,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    RealPhi4,
    ChargedOrientable,
    ChargedNonorientable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Contraction {
    /// vertex leg joined to the incoming external field
    pub ext_in: usize,
    /// vertex leg joined to the outgoing external field
    pub ext_out: usize,
    pub loop_legs: (usize, usize),
    pub planar: bool,
}

/// Leg conjugation pattern of the quartic vertex in cyclic order
/// (true = φ†).
fn vertex(field: FieldKind) -> Option<[bool; 4]> {
    match field {
        FieldKind::RealPhi4 => None,
        FieldKind::ChargedOrientable => Some([true, false, true, false]),
        FieldKind::ChargedNonorientable => Some([true, true, false, false]),
    }
}

pub fn diagram_enumerate(field: FieldKind) -> Vec<Contraction> {
    let legs = vertex(field);
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            if a == b {
                continue;
            }
            if let Some(l) = legs {
                // external φ meets a φ† leg, external φ† a φ leg
                if !l[a] || l[b] {
                    continue;
                }
            }
            let rest: Vec<usize> = (0..4).filter(|&i| i != a && i != b).collect();
            let (x, y) = (rest[0], rest[1]);
            if let Some(l) = legs {
                if l[x] == l[y] {
                    continue;
                }
            }
            let adjacent = (x + 1) % 4 == y || (y + 1) % 4 == x;
            out.push(Contraction {
                ext_in: a,
                ext_out: b,
                loop_legs: (x, y),
                planar: adjacent,
            });
        }
    }
    out
}

/// sinh(x)/x with its series near 0.
fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sinh() / x
    }
}

/// e^{dk₀/2κ}(−sinh(k₀/2κ)/k₀)^d / (−k₀² + k_j² + m²)
pub fn sum_order_integrand(k: &[f64], m: f64, kappa: f64, d: usize) -> f64 {
    let k0 = k[0];
    let x = k0 / (2.0 * kappa);
    let ratio = -sinhc(x) / (2.0 * kappa);
    let kj2: f64 = k[1..].iter().map(|v| v * v).sum();
    (d as f64 * x).exp() * ratio.powi(d as i32) / (-k0 * k0 + kj2 + m * m)
}

pub fn graviton_divergence_degree(loops: i64, d: i64) -> i64 {
    (d - 1) * loops + 2
}
