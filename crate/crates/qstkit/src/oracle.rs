//! Quadrature evaluation of the integral star-product formulas, used as an
//! independent check of the algebraic star product on plane waves.
//!
//! Every formula reduces, per pair of plane waves, to integrals of the form
//! ∫ds K_w(s) G(s) where K_w(s) = (w/2√π)e^{−w²s²/4} is the exact y-integral
//! of a Gaussian-damped plane wave e^{−y²/w²}. The limit w → ∞ is taken by
//! Richardson extrapolation in 1/w².

use crate::group::{GroupDescriptor, Law};
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::wave::WavePacket;
use crate::{Error, Result, C64};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleSpec {
    /// Half-width W of the compact integration window.
    pub window: f64,
    /// Initial Gaussian damping width w.
    pub width: f64,
    /// Number of doublings of w.
    pub levels: usize,
    pub tol: f64,
}

impl OracleSpec {
    pub fn for_scale(kappa: f64) -> Self {
        OracleSpec {
            window: 40.0 / kappa,
            width: 10.0 / kappa,
            levels: 5,
            tol: 1e-9,
        }
    }
}

impl Default for OracleSpec {
    fn default() -> Self {
        OracleSpec::for_scale(1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleValue {
    pub value: C64,
    pub error: f64,
}

fn kernel(w: f64, s: f64) -> f64 {
    w / (2.0 * PI.sqrt()) * (-(w * s / 2.0).powi(2)).exp()
}

fn smeared<G: Fn(f64) -> C64>(g: &G, w: f64, window: f64) -> Result<C64> {
    let edge = (14.0 / w).min(window);
    let breaks = [-window, -edge, 0.0, edge, window];
    let opts = QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-14,
        max_intervals: 4000,
    };
    Ok(integrate_with_breaks(|s| g(s) * kernel(w, s), &breaks, opts)?.value)
}

/// lim_{w→∞} ∫ds K_w(s) G(s) = G(0).
pub fn delta_limit<G: Fn(f64) -> C64>(g: G, spec: &OracleSpec) -> Result<OracleValue> {
    let mut table: Vec<Vec<C64>> = Vec::new();
    let mut err = f64::INFINITY;
    for k in 0..=spec.levels {
        let w = spec.width * 2f64.powi(k as i32);
        let mut row = vec![smeared(&g, w, spec.window)?];
        for j in 1..=k {
            let f = 4f64.powi(j as i32);
            let v = (row[j - 1] * f - table[k - 1][j - 1]) / (f - 1.0);
            row.push(v);
        }
        if k > 0 {
            err = (row[k] - table[k - 1][k - 1]).norm();
        }
        table.push(row);
        if err < spec.tol * 1e-2 {
            break;
        }
    }
    let last = table.last().unwrap();
    let value = *last.last().unwrap();
    if err > spec.tol {
        return Err(Error::Quadrature { value: value.re, error: err });
    }
    Ok(OracleValue { value, error: err })
}

fn real_point(p: &[C64]) -> Vec<f64> {
    p.iter().map(|z| z.re).collect()
}

/// (f⋆g)(x) from the integral formula of the space, for plane-wave packets.
pub fn numeric_star_oracle(space: &GroupDescriptor, f: &WavePacket, g: &WavePacket, x: &[f64], spec: &OracleSpec) -> Result<OracleValue> {
    let i = C64::new(0.0, 1.0);
    let mut total = C64::new(0.0, 0.0);
    let mut error = 0.0;
    for (pc, a) in f.terms() {
        for (qc, b) in g.terms() {
            let p = real_point(pc);
            let q = real_point(qc);
            let (v, e) = match &space.law {
                Law::Kappa { kappa, .. } => {
                    // ∫dp₀'/2π dy⁰ e^{−iy⁰p₀'} f(x⁰+y⁰, x) g(x⁰, e^{−p₀'/κ}x)
                    let outer: f64 = p.iter().zip(x).map(|(u, v)| u * v).sum::<f64>() + q[0] * x[0];
                    let gq = |s: f64| {
                        let sc = (-(p[0] + s) / kappa).exp();
                        let ph: f64 = (1..q.len()).map(|j| q[j] * sc * x[j]).sum();
                        (i * ph).exp()
                    };
                    let r = delta_limit(gq, spec)?;
                    ((i * outer).exp() * r.value, r.error)
                }
                Law::Rho { rho } => {
                    // g(x⁰, R(ρp₀')x⃗, x³)
                    let outer: f64 = p.iter().zip(x).map(|(u, v)| u * v).sum::<f64>() + q[0] * x[0] + q[3] * x[3];
                    let gq = |s: f64| {
                        let t = rho * (p[0] + s);
                        let (sn, cs) = t.sin_cos();
                        let y1 = cs * x[1] - sn * x[2];
                        let y2 = sn * x[1] + cs * x[2];
                        (i * (q[1] * y1 + q[2] * y2)).exp()
                    };
                    let r = delta_limit(gq, spec)?;
                    ((i * outer).exp() * r.value, r.error)
                }
                Law::Moyal { theta, .. } => {
                    let n = theta.len();
                    let outer: f64 = (0..n).map(|k| (p[k] + q[k]) * x[k]).sum::<f64>();
                    let mut acc = (i * outer).exp() * (i * (pc[n] + qc[n])).exp();
                    let mut err = 0.0;
                    for blk in 0..n / 2 {
                        let (u, v) = (2 * blk, 2 * blk + 1);
                        let th = theta[u][v];
                        // ∫da db e^{iαa+iβb+iγab} = (2π/|γ|)∫ds K(s) e^{iα(s−β)/γ}
                        for (alpha, beta, gamma) in [(p[u], q[v], 2.0 / th), (p[v], q[u], -2.0 / th)] {
                            let r = delta_limit(|s| (i * alpha * (s - beta) / gamma).exp(), spec)?;
                            acc *= r.value;
                            err += r.error;
                        }
                    }
                    (acc, err)
                }
                _ => {
                    return Err(Error::UndefinedGenerator("integral star product".into(), space.name()));
                }
            };
            total += a * b * v;
            error += (a * b).norm() * e;
        }
    }
    Ok(OracleValue { value: total, error })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_limit_recovers_value_at_zero() {
        let r = delta_limit(|s| C64::new((1.0 + s).cos(), s * s), &OracleSpec::default()).unwrap();
        assert!((r.value - C64::new(1f64.cos(), 0.0)).norm() < 1e-9);
    }
}
