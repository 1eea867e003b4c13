//! Modified Bessel functions of the second kind and sphere areas.

use crate::quad::{integrate_real, QuadOptions};
use crate::Result;
use std::f64::consts::PI;

/// K_ν(z) = ∫₀^∞ e^{−z cosh t} cosh(νt) dt for z > 0.
pub fn bessel_k(nu: f64, z: f64) -> Result<f64> {
    if (nu.abs() - 0.5).abs() < 1e-15 {
        return Ok((PI / (2.0 * z)).sqrt() * (-z).exp());
    }
    bessel_k_integral(nu, z)
}

pub fn bessel_k_integral(nu: f64, z: f64) -> Result<f64> {
    // relative integrand below e^{−60} beyond t_max
    let mut t_max = (1.0 + 60.0 / z).acosh();
    while z * (t_max.cosh() - 1.0) - nu.abs() * t_max < 60.0 {
        t_max += 0.5;
    }
    let scale = (-z).exp();
    let opts = QuadOptions {
        abs_tol: 1e-16,
        rel_tol: 1e-13,
        max_intervals: 4000,
    };
    let (v, _) = integrate_real(
        |t| (-z * (t.cosh() - 1.0)).exp() * (nu * t).cosh(),
        0.0,
        t_max,
        opts,
    )?;
    Ok(v * scale)
}

/// Area of the unit sphere S^n ⊂ ℝ^{n+1}.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (n as f64 - 1.0) * sphere_area(n - 2),
    }
}
