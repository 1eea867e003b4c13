//! Adaptive Gauss–Kronrod (7/15) quadrature for complex integrands.

use crate::{Error, Result, C64};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: C64,
    pub error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

fn kronrod<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += s * WGK[i];
        if i % 2 == 1 {
            g += s * WG[i / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    (k, (k - g).norm())
}

/// ∫_a^b f with global adaptive bisection; the breakpoints split the
/// interval up front.
pub fn integrate<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    integrate_with_breaks(f, &[a, b], opts)
}

pub fn integrate_with_breaks<F: Fn(f64) -> C64>(f: F, points: &[f64], opts: QuadOptions) -> Result<QuadResult> {
    let mut segs: Vec<(f64, f64, C64, f64)> = points
        .windows(2)
        .filter(|w| w[1] != w[0])
        .map(|w| {
            let (v, e) = kronrod(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let total: C64 = segs.iter().map(|s| s.2).sum();
        let err: f64 = segs.iter().map(|s| s.3).sum();
        let tol = opts.abs_tol.max(opts.rel_tol * total.norm());
        if err <= tol {
            return Ok(QuadResult { value: total, error: err });
        }
        if segs.len() >= opts.max_intervals {
            return Err(Error::Quadrature { value: total.re, error: err });
        }
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (a, b, _, _) = segs[idx];
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            return Err(Error::Quadrature { value: total.re, error: err });
        }
        let (v1, e1) = kronrod(&f, a, m);
        let (v2, e2) = kronrod(&f, m, b);
        segs[idx] = (a, m, v1, e1);
        segs.push((m, b, v2, e2));
    }
}

pub fn integrate_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<(f64, f64)> {
    let r = integrate(|x| C64::new(f(x), 0.0), a, b, opts)?;
    Ok((r.value.re, r.error))
}

/// ∫_a^∞ f through x = a + t/(1−t).
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, opts: QuadOptions) -> Result<(f64, f64)> {
    integrate_real(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let u = 1.0 - t;
            let v = f(a + t / u) / (u * u);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let (v, _) = integrate_real(|x| x * x * x - 2.0 * x, 0.0, 2.0, QuadOptions::default()).unwrap();
        assert!((v - 0.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_complex() {
        let r = integrate(|x| C64::new(0.0, 5.0 * x).exp(), 0.0, std::f64::consts::PI, QuadOptions::default()).unwrap();
        // (e^{5iπ} − 1)/(5i) = −2/(5i) = 0.4i
        assert!((r.value - C64::new(0.0, 0.4)).norm() < 1e-12);
    }

    #[test]
    fn semi_infinite_gaussian() {
        let (v, _) = integrate_to_infinity(|x| (-x * x).exp(), 0.0, QuadOptions::default()).unwrap();
        assert!((v - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_reports_error() {
        let opts = QuadOptions { max_intervals: 2, ..Default::default() };
        let r = integrate_real(|x| (1.0 / x).sin(), 1e-6, 1.0, opts);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
