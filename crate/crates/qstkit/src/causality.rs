//! Discretized causality model on 1+1 κ-Minkowski: the affine-group
//! representation on a p₀ grid, the Lorentzian fundamental symmetry, the
//! causal-cone test for linear functions, and the speed-of-light margin.

use crate::{Error, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

pub const NORM_TOL: f64 = 1e-10;
pub const CONE_TOL: f64 = 1e-8;
pub const MIN_POINTS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Central,
    Spectral,
    /// first order, used to exhibit the refinement trend of the 𝔇 axiom
    Forward,
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "central" => Ok(Scheme::Central),
            "spectral" => Ok(Scheme::Spectral),
            "forward" => Ok(Scheme::Forward),
            other => Err(Error::BadParameter(format!("unknown scheme {other}"))),
        }
    }
}

/// Periodic grid p₀ = −W + jh, j = 0..n.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub n: usize,
    pub w: f64,
    pub scheme: Scheme,
}

impl GridSpec {
    pub fn new(n: usize, w: f64, scheme: Scheme, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::BadParameter(format!("κ must be positive, got {kappa}")));
        }
        if n < MIN_POINTS || n % 2 != 0 {
            return Err(Error::CoarseGrid(format!("n = {n}; need an even n ≥ {MIN_POINTS}")));
        }
        if !(w >= 10.0 / kappa) || !w.is_finite() {
            return Err(Error::CoarseGrid(format!("W = {w} < 10/κ = {}", 10.0 / kappa)));
        }
        Ok(GridSpec { n, w, scheme })
    }

    /// W = max(20κ, 10/κ)
    pub fn standard(n: usize, scheme: Scheme, kappa: f64) -> Result<Self> {
        Self::new(n, (20.0 * kappa).max(10.0 / kappa), scheme, kappa)
    }

    pub fn h(&self) -> f64 {
        2.0 * self.w / self.n as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| -self.w + j as f64 * self.h()).collect()
    }

    /// p_j − p_i wrapped to [−W, W)
    fn offset(&self, i: usize, j: usize) -> f64 {
        let n = self.n as i64;
        let mut k = j as i64 - i as i64;
        if k >= n / 2 {
            k -= n;
        } else if k < -n / 2 {
            k += n;
        }
        k as f64 * self.h()
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    pub n: usize,
    pub data: Vec<C64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.data[i * d.len() + i] = v;
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.data[j * self.n + i] = self.get(i, j).conj();
            }
        }
        m
    }

    pub fn add_scaled(&self, o: &Mat, s: C64) -> Self {
        Mat {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// d/dp₀ on the periodic grid.
pub fn derivative_matrix(grid: &GridSpec) -> Mat {
    let n = grid.n;
    let h = grid.h();
    let mut m = Mat::zeros(n);
    match grid.scheme {
        Scheme::Central => {
            for i in 0..n {
                m.data[i * n + (i + 1) % n] += C64::new(0.5 / h, 0.0);
                m.data[i * n + (i + n - 1) % n] -= C64::new(0.5 / h, 0.0);
            }
        }
        Scheme::Forward => {
            for i in 0..n {
                m.data[i * n + (i + 1) % n] += C64::new(1.0 / h, 0.0);
                m.data[i * n + i] -= C64::new(1.0 / h, 0.0);
            }
        }
        Scheme::Spectral => {
            // Nyquist mode dropped so the matrix is exactly antisymmetric
            let l = 2.0 * grid.w;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let k = i as i64 - j as i64;
                        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                        m.data[i * n + j] = C64::new(sign * (PI / l) / (PI * k as f64 / n as f64).tan(), 0.0);
                    }
                }
            }
        }
    }
    m
}

#[derive(Clone, Debug)]
pub struct Operators {
    pub x0: Mat,
    pub x1: Mat,
}

/// x⁰ ↦ −i d/dp₀, x¹ ↦ a e^{−p₀/κ}.
pub fn build_operators(grid: &GridSpec, kappa: f64, a: i32) -> Result<Operators> {
    check_branch(a)?;
    let d = derivative_matrix(grid);
    let x0 = Mat::zeros(grid.n).add_scaled(&d, C64::new(0.0, -1.0));
    let x1 = Mat::diag(&grid.points().iter().map(|p| C64::new(a as f64 * (-p / kappa).exp(), 0.0)).collect::<Vec<_>>());
    Ok(Operators { x0, x1 })
}

fn check_branch(a: i32) -> Result<()> {
    if a != 1 && a != -1 {
        return Err(Error::BadParameter(format!("representation branch a = {a}; only ±1")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub amps: Vec<C64>,
}

impl StateVector {
    pub fn norm_sq(&self, grid: &GridSpec) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.h()
    }

    pub fn normalized(mut self, grid: &GridSpec) -> Result<Self> {
        let n = self.norm_sq(grid);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Unnormalized(n));
        }
        let s = 1.0 / n.sqrt();
        for z in &mut self.amps {
            *z *= s;
        }
        Ok(self)
    }

    /// ψ ∝ exp(−(p₀−c)²/4σ² + i t p₀)
    pub fn gaussian(grid: &GridSpec, center: f64, sigma: f64, t: f64) -> Result<Self> {
        let amps = grid
            .points()
            .iter()
            .map(|&p| C64::from_polar((-(p - center).powi(2) / (4.0 * sigma * sigma)).exp(), t * p))
            .collect();
        StateVector { amps }.normalized(grid)
    }

    pub fn phase_shifted(&self, grid: &GridSpec, t: f64) -> Self {
        StateVector {
            amps: self.amps.iter().zip(grid.points()).map(|(z, p)| z * C64::from_polar(1.0, t * p)).collect(),
        }
    }

    fn check(&self, grid: &GridSpec) -> Result<()> {
        if self.amps.len() != grid.n {
            return Err(Error::DimMismatch { expected: grid.n, got: self.amps.len() });
        }
        let n = self.norm_sq(grid);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized(n));
        }
        Ok(())
    }
}

/// ⟨ψ|Mψ⟩ = Σ ψ̄ (Mψ) h
pub fn expectation(m: &Mat, psi: &StateVector, grid: &GridSpec) -> C64 {
    m.apply(&psi.amps).iter().zip(&psi.amps).map(|(a, b)| b.conj() * a).sum::<C64>() * grid.h()
}

/// Re⟨ψ|Mψ⟩, rejecting an imaginary part above 1e−10.
pub fn real_expectation(m: &Mat, psi: &StateVector, grid: &GridSpec) -> Result<f64> {
    let e = expectation(m, psi, grid);
    if e.im.abs() > NORM_TOL * e.re.abs().max(1.0) {
        return Err(Error::BadParameter(format!("expectation not real: {e}")));
    }
    Ok(e.re)
}

/// (⟨x⁰⟩₂ − ⟨x⁰⟩₁) − |⟨x¹⟩₂ − ⟨x¹⟩₁|
pub fn sll_margin(psi1: &StateVector, psi2: &StateVector, grid: &GridSpec, kappa: f64, a: i32) -> Result<f64> {
    psi1.check(grid)?;
    psi2.check(grid)?;
    let ops = build_operators(grid, kappa, a)?;
    let dx0 = real_expectation(&ops.x0, psi2, grid)? - real_expectation(&ops.x0, psi1, grid)?;
    let dx1 = real_expectation(&ops.x1, psi2, grid)? - real_expectation(&ops.x1, psi1, grid)?;
    Ok(dx0 - dx1.abs())
}

/// γ⁰, γ¹ as printed and I = iγ⁰, entries exact.
pub fn gamma0() -> [[C64; 2]; 2] {
    let (z, i) = (C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    [[z, i], [i, z]]
}

pub fn gamma1() -> [[C64; 2]; 2] {
    let (z, i) = (C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    [[z, -i], [i, z]]
}

pub fn fundamental_symmetry() -> [[C64; 2]; 2] {
    let g = gamma0();
    let i = C64::new(0.0, 1.0);
    [[i * g[0][0], i * g[0][1]], [i * g[1][0], i * g[1][1]]]
}

fn mul2(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let mut c = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LorentzianReport {
    pub n: usize,
    pub scheme: Scheme,
    pub involutive: bool,
    pub self_adjoint: bool,
    /// ‖(𝔇†I + I𝔇)Ψ‖ on the reference spinor
    pub dirac_residual: f64,
}

/// 𝔇 = [[0, X₋], [X₊, 0]] with X₀ = iκ(1 − e^{−p₀/κ}) diagonal and X₁ the
/// grid derivative, both anti-Hermitian in the continuum.
pub fn dirac_operator(grid: &GridSpec, kappa: f64) -> (Mat, Mat) {
    let x0 = Mat::diag(
        &grid
            .points()
            .iter()
            .map(|p| C64::new(0.0, kappa * (1.0 - (-p / kappa).exp())))
            .collect::<Vec<_>>(),
    );
    let x1 = derivative_matrix(grid);
    let one = C64::new(1.0, 0.0);
    (x0.add_scaled(&x1, one), x0.add_scaled(&x1, -one))
}

pub fn lorentzian_axiom_check(grid: &GridSpec, kappa: f64) -> Result<LorentzianReport> {
    let iop = fundamental_symmetry();
    let sq = mul2(&iop, &iop);
    let involutive = sq == [[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]];
    let self_adjoint = (0..2).all(|i| (0..2).all(|j| iop[i][j] == iop[j][i].conj()));
    // I = [[0,−1],[−1,0]] gives 𝔇†I + I𝔇 = −diag(X₊ + X₊†, X₋ + X₋†)
    let (xp, xm) = dirac_operator(grid, kappa);
    let one = C64::new(1.0, 0.0);
    let sp = xp.add_scaled(&xp.adjoint(), one);
    let sm = xm.add_scaled(&xm.adjoint(), one);
    let psi = StateVector::gaussian(grid, 0.0, grid.w / 10.0, 0.0)?;
    let r = |m: &Mat| m.apply(&psi.amps).iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.h();
    // Ψ = (ψ, ψ)/√2
    let dirac_residual = ((r(&sp) + r(&sm)) / 2.0).sqrt();
    Ok(LorentzianReport {
        n: grid.n,
        scheme: grid.scheme,
        involutive,
        self_adjoint,
        dirac_residual,
    })
}

/// Residual ratios r(n)/r(2n) along a doubling sequence starting at n.
pub fn dirac_refinement(n: usize, doublings: usize, w: f64, scheme: Scheme, kappa: f64) -> Result<Vec<(usize, f64)>> {
    (0..=doublings)
        .map(|k| {
            let g = GridSpec::new(n << k, w, scheme, kappa)?;
            Ok((g.n, lorentzian_axiom_check(&g, kappa)?.dirac_residual))
        })
        .collect()
}

/// K = M∘(αX⁰ + βX¹) ± β·1 with M_{pq} = iκ(1 − e^{−(q₀−p₀)/κ}), offsets
/// taken as minimal images on the periodic grid.
pub fn cone_kernel(grid: &GridSpec, kappa: f64, a: i32, alpha: f64, beta: f64, sign: f64) -> Result<Mat> {
    let ops = build_operators(grid, kappa, a)?;
    let f = Mat::zeros(grid.n)
        .add_scaled(&ops.x0, C64::new(alpha, 0.0))
        .add_scaled(&ops.x1, C64::new(beta, 0.0));
    let n = grid.n;
    let mut k = Mat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let m = C64::new(0.0, kappa * (1.0 - (-grid.offset(i, j) / kappa).exp()));
            k.data[i * n + j] = m * f.get(i, j);
        }
        k.data[i * n + i] += C64::new(sign * beta, 0.0);
    }
    Ok(k)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussianParams {
    pub center: f64,
    pub sigma: f64,
    pub kick: f64,
}

/// Seeded Gaussian family: centers in [−3κ, 3κ], widths in [κ/2, κ],
/// phase kicks in [−2/κ, 2/κ].
pub fn state_family(count: usize, seed: u64, kappa: f64) -> Vec<GaussianParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| GaussianParams {
            center: rng.gen_range(-3.0..=3.0) * kappa,
            sigma: rng.gen_range(0.5..=1.0) * kappa,
            kick: rng.gen_range(-2.0..=2.0) / kappa,
        })
        .collect()
}

fn check_resolution(grid: &GridSpec, family: &[GaussianParams]) -> Result<()> {
    let nyquist = PI / grid.h();
    for g in family {
        // Fourier envelope e^{−σ²(k−t)²} must be negligible at the Nyquist edge
        let margin = g.sigma * (nyquist - g.kick.abs());
        if margin < 6.0 {
            return Err(Error::CoarseGrid(format!("state σ = {} with kick {} is unresolved at h = {}", g.sigma, g.kick, grid.h())));
        }
        if g.center.abs() + 8.0 * g.sigma > grid.w {
            return Err(Error::CoarseGrid(format!("state at {} ± {} does not fit in W = {}", g.center, g.sigma, grid.w)));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeReport {
    pub alpha: f64,
    pub beta: f64,
    pub a: i32,
    pub n: usize,
    pub states: usize,
    pub margin_plus: f64,
    pub margin_minus: f64,
    pub margin: f64,
    pub pass: bool,
}

/// min over the seeded family of Re⟨ψ, K±ψ⟩; PASS iff ≥ −1e−8 on both branches.
pub fn cone_condition(grid: &GridSpec, kappa: f64, a: i32, alpha: f64, beta: f64, states: usize, seed: u64) -> Result<ConeReport> {
    let family = state_family(states, seed, kappa);
    check_resolution(grid, &family)?;
    let kp = cone_kernel(grid, kappa, a, alpha, beta, 1.0)?;
    let km = cone_kernel(grid, kappa, a, alpha, beta, -1.0)?;
    let vals: Vec<(f64, f64)> = family
        .par_iter()
        .map(|g| {
            let psi = StateVector::gaussian(grid, g.center, g.sigma, g.kick)?;
            Ok((expectation(&kp, &psi, grid).re, expectation(&km, &psi, grid).re))
        })
        .collect::<Result<_>>()?;
    let margin_plus = vals.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
    let margin_minus = vals.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let margin = margin_plus.min(margin_minus);
    Ok(ConeReport {
        alpha,
        beta,
        a,
        n: grid.n,
        states,
        margin_plus,
        margin_minus,
        margin,
        pass: margin >= -CONE_TOL,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeRow {
    pub v: f64,
    pub margin: f64,
    pub pass: bool,
}

/// f = x⁰ + v x¹ over a velocity list, worst case over a = ±1.
pub fn cone_sweep(grid: &GridSpec, kappa: f64, vs: &[f64], states: usize, seed: u64) -> Result<Vec<ConeRow>> {
    vs.iter()
        .map(|&v| {
            let mut margin = f64::INFINITY;
            for a in [1, -1] {
                margin = margin.min(cone_condition(grid, kappa, a, 1.0, v, states, seed)?.margin);
            }
            Ok(ConeRow {
                v,
                margin,
                pass: margin >= -CONE_TOL,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fundamental_symmetry_exact() {
        let g = GridSpec::standard(32, Scheme::Spectral, 1.0).unwrap();
        let r = lorentzian_axiom_check(&g, 1.0).unwrap();
        assert!(r.involutive && r.self_adjoint);
        assert!(r.dirac_residual < 1e-12);
    }

    #[test]
    fn grid_limits() {
        assert!(matches!(GridSpec::new(8, 20.0, Scheme::Central, 1.0), Err(Error::CoarseGrid(_))));
        assert!(matches!(GridSpec::new(64, 5.0, Scheme::Central, 1.0), Err(Error::CoarseGrid(_))));
        assert!(GridSpec::new(64, 10.0, Scheme::Central, 1.0).is_ok());
    }

    #[test]
    fn spectral_derivative_of_gaussian() {
        let g = GridSpec::standard(256, Scheme::Spectral, 1.0).unwrap();
        let d = derivative_matrix(&g);
        let f: Vec<C64> = g.points().iter().map(|p| C64::new((-p * p / 4.0).exp(), 0.0)).collect();
        let df = d.apply(&f);
        for (p, z) in g.points().iter().zip(&df) {
            assert!((z.re + p / 2.0 * (-p * p / 4.0).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn unnormalized_rejected() {
        let g = GridSpec::standard(64, Scheme::Spectral, 1.0).unwrap();
        let psi = StateVector::gaussian(&g, 0.0, 1.0, 0.0).unwrap();
        let bad = StateVector {
            amps: psi.amps.iter().map(|z| z * 2.0).collect(),
        };
        assert!(matches!(sll_margin(&psi, &bad, &g, 1.0, 1), Err(Error::Unnormalized(_))));
    }
}
