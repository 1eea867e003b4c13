//! Deformed momentum groups: composition ⊞, inverse ⊟, Haar densities,
//! modular function, orderings and the non-planar delta solver.

use crate::bch;
use crate::lie::{self, Preset, StructureConstants};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    Right,
    Sum,
}

/// How the Moyal phase slot composes. `PaperVerbatim` adds i·pΘq to p₅;
/// `Bch` adds −½·pΘq, the increment produced by the integral star product
/// with phase e^{ip₅}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoyalConvention {
    PaperVerbatim,
    Bch,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Law {
    Kappa { kappa: f64, d: usize, ordering: Ordering },
    Moyal { theta: Vec<Vec<f64>>, convention: MoyalConvention },
    Rho { rho: f64 },
    Su2 { lambda: f64 },
    /// Exponential (symmetric-ordering) chart computed from the structure
    /// constants by the truncated BCH series.
    Bch { order: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupDescriptor {
    pub structure: StructureConstants,
    pub law: Law,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HaarResidual {
    pub left: f64,
    pub right: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    RightToSum,
    SumToRight,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dispersion {
    P,
    X,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaSolution {
    pub k: Vec<C64>,
    pub residual: f64,
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn zeros(n: usize) -> Vec<C64> {
    vec![c(0.0); n]
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// g(x) = x/(1−e^{−x}), with its Taylor polynomial near the removable point.
pub fn g_fn(x: C64) -> C64 {
    if x.norm() < 1e-4 {
        c(1.0) + x / 2.0 + x * x / 12.0 - x * x * x * x / 720.0
    } else {
        x / (c(1.0) - (-x).exp())
    }
}

pub fn g_real(x: f64) -> f64 {
    g_fn(c(x)).re
}

impl GroupDescriptor {
    pub fn kappa_minkowski(kappa: f64, d: usize) -> Result<Self> {
        Self::kappa_ordered(kappa, d, Ordering::Right)
    }

    pub fn kappa_ordered(kappa: f64, d: usize, ordering: Ordering) -> Result<Self> {
        let structure = lie::preset(Preset::KappaMinkowski, &[kappa], d + 1)?;
        Ok(GroupDescriptor {
            structure,
            law: Law::Kappa { kappa, d, ordering },
        })
    }

    pub fn moyal(theta: f64, dim: usize, convention: MoyalConvention) -> Result<Self> {
        let structure = lie::preset(Preset::MoyalExtended, &[theta], dim)?;
        Ok(GroupDescriptor {
            structure,
            law: Law::Moyal {
                theta: lie::moyal_theta(theta, dim),
                convention,
            },
        })
    }

    pub fn rho_minkowski(rho: f64) -> Result<Self> {
        let structure = lie::preset(Preset::RhoMinkowski, &[rho], 4)?;
        Ok(GroupDescriptor {
            structure,
            law: Law::Rho { rho },
        })
    }

    pub fn su2(lambda: f64) -> Result<Self> {
        let structure = lie::preset(Preset::Su2Lambda, &[lambda], 3)?;
        Ok(GroupDescriptor {
            structure,
            law: Law::Su2 { lambda },
        })
    }

    pub fn from_structure(structure: StructureConstants, order: usize) -> Self {
        GroupDescriptor {
            structure,
            law: Law::Bch { order },
        }
    }

    pub fn from_preset(p: Preset, params: &[f64], dim: usize) -> Result<Self> {
        let par = *params
            .first()
            .ok_or_else(|| Error::BadParameter("missing deformation parameter".into()))?;
        match p {
            Preset::KappaMinkowski => {
                if dim < 2 {
                    return Err(Error::BadDimension {
                        preset: p.name().into(),
                        dim,
                    });
                }
                Self::kappa_minkowski(par, dim - 1)
            }
            Preset::MoyalExtended => Self::moyal(par, dim, MoyalConvention::PaperVerbatim),
            Preset::RhoMinkowski => {
                if dim != 4 {
                    return Err(Error::BadDimension {
                        preset: p.name().into(),
                        dim,
                    });
                }
                Self::rho_minkowski(par)
            }
            Preset::Su2Lambda => {
                if dim != 3 {
                    return Err(Error::BadDimension {
                        preset: p.name().into(),
                        dim,
                    });
                }
                Self::su2(par)
            }
        }
    }

    pub fn name(&self) -> String {
        match &self.law {
            Law::Kappa {
                ordering: Ordering::Sum, ..
            } => "kappa_minkowski_sum".into(),
            Law::Moyal {
                convention: MoyalConvention::Bch,
                ..
            } => "moyal_extended_bch".into(),
            Law::Bch { .. } => format!("bch:{}", self.structure.name),
            _ => self.structure.name.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.structure.dim
    }

    pub fn kappa(&self) -> Option<f64> {
        match self.law {
            Law::Kappa { kappa, .. } => Some(kappa),
            _ => None,
        }
    }

    pub fn spatial_dim(&self) -> usize {
        match self.law {
            Law::Kappa { d, .. } => d,
            _ => self.dim() - 1,
        }
    }

    pub fn ordering(&self) -> Option<Ordering> {
        match self.law {
            Law::Kappa { ordering, .. } => Some(ordering),
            _ => None,
        }
    }

    /// Δ ≡ 1 exactly when tr ad vanishes.
    pub fn is_unimodular(&self) -> bool {
        match self.law {
            Law::Kappa { .. } => false,
            Law::Bch { .. } => {
                let n = self.dim();
                (0..n).all(|mu| (0..n).map(|nu| self.structure.get(mu, nu, nu)).sum::<C64>().norm() < 1e-14)
            }
            _ => true,
        }
    }

    pub fn same_as(&self, other: &GroupDescriptor) -> bool {
        self == other
    }

    fn check_dim(&self, p: &[C64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                got: p.len(),
            });
        }
        Ok(())
    }

    pub fn add(&self, p: &[C64], q: &[C64]) -> Result<Vec<C64>> {
        self.check_dim(p)?;
        self.check_dim(q)?;
        Ok(match &self.law {
            Law::Kappa { kappa, ordering, .. } => {
                let mut out = zeros(p.len());
                out[0] = p[0] + q[0];
                match ordering {
                    Ordering::Right => {
                        let e = (-p[0] / *kappa).exp();
                        for j in 1..p.len() {
                            out[j] = p[j] + e * q[j];
                        }
                    }
                    Ordering::Sum => {
                        let x = p[0] / *kappa;
                        let y = q[0] / *kappa;
                        let pre = y.exp() * g_fn(-x - y);
                        let gp = g_fn(-x);
                        let gq = g_fn(y);
                        for j in 1..p.len() {
                            out[j] = pre * (p[j] / gp + q[j] / gq);
                        }
                    }
                }
                out
            }
            Law::Moyal { theta, convention } => {
                let n = theta.len();
                let mut out: Vec<C64> = p.iter().zip(q).map(|(a, b)| a + b).collect();
                let mut ptq = c(0.0);
                for mu in 0..n {
                    for nu in 0..n {
                        ptq += p[mu] * theta[mu][nu] * q[nu];
                    }
                }
                out[n] += match convention {
                    MoyalConvention::PaperVerbatim => C64::new(0.0, 1.0) * ptq,
                    MoyalConvention::Bch => -ptq / 2.0,
                };
                out
            }
            Law::Rho { rho } => {
                let a = p[0] * *rho;
                let (s, co) = (a.sin(), a.cos());
                vec![
                    p[0] + q[0],
                    p[1] + co * q[1] - s * q[2],
                    p[2] + s * q[1] + co * q[2],
                    p[3] + q[3],
                ]
            }
            Law::Su2 { lambda } => su2_compose(*lambda, p, q),
            Law::Bch { order } => {
                let i = C64::new(0.0, 1.0);
                let a: Vec<C64> = p.iter().map(|v| i * v).collect();
                let b: Vec<C64> = q.iter().map(|v| i * v).collect();
                let z = bch::bch(&a, &b, *order, |u, v| self.structure.bracket(u, v));
                z.into_iter().map(|v| -i * v).collect()
            }
        })
    }

    pub fn inv(&self, p: &[C64]) -> Result<Vec<C64>> {
        self.check_dim(p)?;
        Ok(match &self.law {
            Law::Kappa { kappa, ordering, .. } => match ordering {
                Ordering::Right => {
                    let e = (p[0] / *kappa).exp();
                    let mut out: Vec<C64> = p.iter().map(|v| -e * v).collect();
                    out[0] = -p[0];
                    out
                }
                Ordering::Sum => p.iter().map(|v| -v).collect(),
            },
            Law::Rho { rho } => {
                // ⊟p⃗ = −R(−ρp₀)p⃗
                let a = -p[0] * *rho;
                let (s, co) = (a.sin(), a.cos());
                vec![
                    -p[0],
                    -(co * p[1] - s * p[2]),
                    -(s * p[1] + co * p[2]),
                    -p[3],
                ]
            }
            _ => p.iter().map(|v| -v).collect(),
        })
    }

    pub fn modular(&self, p: &[C64]) -> f64 {
        match &self.law {
            Law::Kappa { kappa, d, .. } => ((*d as f64) * p[0].re / kappa).exp(),
            Law::Bch { .. } => {
                let l = self.haar_left(p);
                let r = self.haar_right(p);
                l / r
            }
            _ => 1.0,
        }
    }

    pub fn haar_left(&self, p: &[C64]) -> f64 {
        match &self.law {
            Law::Kappa { kappa, d, ordering } => match ordering {
                Ordering::Right => ((*d as f64) * p[0].re / kappa).exp(),
                Ordering::Sum => sum_weight(p[0].re, *kappa, *d),
            },
            Law::Su2 { lambda } => su2_weight(*lambda, p),
            Law::Bch { .. } => {
                let zero = zeros(self.dim());
                match jacobian_fd(|e| self.add(p, e), &zero) {
                    Ok(j) => 1.0 / det(&j).norm(),
                    Err(_) => f64::NAN,
                }
            }
            _ => 1.0,
        }
    }

    pub fn haar_right(&self, p: &[C64]) -> f64 {
        match &self.law {
            Law::Kappa { kappa, d, ordering } => match ordering {
                Ordering::Right => 1.0,
                Ordering::Sum => sum_weight(p[0].re, *kappa, *d) * (-(*d as f64) * p[0].re / kappa).exp(),
            },
            Law::Su2 { lambda } => su2_weight(*lambda, p),
            Law::Bch { .. } => {
                let zero = zeros(self.dim());
                match jacobian_fd(|e| self.add(e, p), &zero) {
                    Ok(j) => 1.0 / det(&j).norm(),
                    Err(_) => f64::NAN,
                }
            }
            _ => 1.0,
        }
    }

    pub fn weight(&self, side: Side, p: &[C64]) -> f64 {
        match side {
            Side::Left => self.haar_left(p),
            Side::Right => self.haar_right(p),
        }
    }

    /// ∂(q⊞p)/∂p (left) or ∂(p⊞q)/∂p (right), closed form where available.
    pub fn translation_jacobian(&self, side: Side, q: &[C64], p: &[C64]) -> Result<Vec<Vec<C64>>> {
        self.check_dim(p)?;
        self.check_dim(q)?;
        let n = self.dim();
        let mut id = vec![zeros(n); n];
        for (i, row) in id.iter_mut().enumerate() {
            row[i] = c(1.0);
        }
        match (&self.law, side) {
            (Law::Kappa { kappa, ordering: Ordering::Right, .. }, Side::Left) => {
                let e = (-q[0] / *kappa).exp();
                for (j, row) in id.iter_mut().enumerate().skip(1) {
                    row[j] = e;
                }
                Ok(id)
            }
            (Law::Kappa { kappa, ordering: Ordering::Right, .. }, Side::Right) => {
                let e = (-p[0] / *kappa).exp();
                for (j, row) in id.iter_mut().enumerate().skip(1) {
                    row[0] = -e * q[j] / *kappa;
                }
                Ok(id)
            }
            (Law::Moyal { theta, convention }, _) => {
                let m = theta.len();
                let f = match convention {
                    MoyalConvention::PaperVerbatim => C64::new(0.0, 1.0),
                    MoyalConvention::Bch => c(-0.5),
                };
                for nu in 0..m {
                    let mut s = c(0.0);
                    for mu in 0..m {
                        s += match side {
                            Side::Left => q[mu] * theta[mu][nu],
                            Side::Right => theta[nu][mu] * q[mu],
                        };
                    }
                    id[m][nu] = f * s;
                }
                Ok(id)
            }
            (Law::Rho { rho }, Side::Left) => {
                let a = q[0] * *rho;
                let (s, co) = (a.sin(), a.cos());
                id[1][1] = co;
                id[1][2] = -s;
                id[2][1] = s;
                id[2][2] = co;
                Ok(id)
            }
            (Law::Rho { rho }, Side::Right) => {
                let a = p[0] * *rho;
                let (s, co) = (a.sin(), a.cos());
                id[1][0] = *rho * (-s * q[1] - co * q[2]);
                id[2][0] = *rho * (co * q[1] - s * q[2]);
                Ok(id)
            }
            _ => match side {
                Side::Left => jacobian_fd(|x| self.add(q, x), p),
                Side::Right => jacobian_fd(|x| self.add(x, q), p),
            },
        }
    }

    /// Pointwise Jacobian form of Haar invariance.
    pub fn haar_invariance_check(&self, q: &[C64], p: &[C64]) -> Result<HaarResidual> {
        let left = self.haar_residual_with(Side::Left, q, p, |x| self.haar_left(x))?;
        let right = self.haar_residual_with(Side::Right, q, p, |x| self.haar_right(x))?;
        Ok(HaarResidual { left, right })
    }

    pub fn haar_residual_with<W>(&self, side: Side, q: &[C64], p: &[C64], w: W) -> Result<f64>
    where
        W: Fn(&[C64]) -> f64,
    {
        let j = self.translation_jacobian(side, q, p)?;
        let dj = det(&j).norm();
        if dj == 0.0 || !dj.is_finite() {
            return Err(Error::SingularJacobian(format!("{q:?}")));
        }
        let moved = match side {
            Side::Left => self.add(q, p)?,
            Side::Right => self.add(p, q)?,
        };
        Ok((w(p) - w(&moved) * dj).abs())
    }

    /// Closed-form mixed Hessian of ⊞ at the origin, where one is known.
    pub fn analytic_hessian(&self) -> Option<Vec<C64>> {
        let n = self.dim();
        let mut h = zeros(n * n * n);
        let at = |mu: usize, nu: usize, rho: usize| (mu * n + nu) * n + rho;
        match &self.law {
            Law::Kappa { kappa, ordering, .. } => {
                for j in 1..n {
                    match ordering {
                        Ordering::Right => h[at(0, j, j)] = c(-1.0 / kappa),
                        Ordering::Sum => {
                            h[at(0, j, j)] = c(-0.5 / kappa);
                            h[at(j, 0, j)] = c(0.5 / kappa);
                        }
                    }
                }
            }
            Law::Moyal { theta, convention } => {
                let m = theta.len();
                let f = match convention {
                    MoyalConvention::PaperVerbatim => C64::new(0.0, 1.0),
                    MoyalConvention::Bch => c(-0.5),
                };
                for mu in 0..m {
                    for nu in 0..m {
                        h[at(mu, nu, m)] = f * theta[mu][nu];
                    }
                }
            }
            Law::Rho { rho } => {
                h[at(0, 2, 1)] = c(-rho);
                h[at(0, 1, 2)] = c(*rho);
            }
            Law::Su2 { lambda } => {
                for a in 0..3 {
                    for b in 0..3 {
                        for r in 0..3 {
                            let e = lie::levi_civita(a, b, r);
                            if e != 0 {
                                h[at(a, b, r)] = c(-0.5 * lambda * e as f64);
                            }
                        }
                    }
                }
            }
            Law::Bch { .. } => {
                for (mu, nu, rho, v) in self.structure.entries() {
                    h[at(mu, nu, rho)] = C64::new(0.0, 0.5) * v;
                }
            }
        }
        Some(h)
    }

    /// Solves p⊞k⊞q⊟k = 0 for the spatial part of k at fixed k₀.
    pub fn delta_solve_nonplanar(&self, p: &[C64], q: &[C64], k0: f64) -> Result<DeltaSolution> {
        self.check_dim(p)?;
        self.check_dim(q)?;
        let n = self.dim();
        let residual = |k: &[C64]| -> Result<Vec<C64>> {
            let a = self.add(p, k)?;
            let b = self.add(&a, q)?;
            self.add(&b, &self.inv(k)?)
        };
        let energy = (p[0] + q[0]).norm();
        let additive_energy = matches!(self.law, Law::Kappa { .. } | Law::Rho { .. });
        if additive_energy && energy > 1e-12 {
            return Err(Error::NoSolution(format!("energy constraint p0+q0 = {energy:e}")));
        }
        if norm(p) == 0.0 && norm(q) == 0.0 {
            let mut k = zeros(n);
            k[0] = c(k0);
            return Ok(DeltaSolution { k, residual: 0.0 });
        }
        if let Law::Kappa {
            kappa,
            ordering: Ordering::Right,
            ..
        } = self.law
        {
            let den = c(1.0) - (-p[0] / kappa).exp();
            if den.norm() < 1e-300 {
                return Err(Error::NoSolution("p0 = 0 with non-zero spatial momenta".into()));
            }
            let e = (-(p[0] + k0) / kappa).exp();
            let mut k = zeros(n);
            k[0] = c(k0);
            for j in 1..n {
                k[j] = (p[j] + e * q[j]) / den;
            }
            let r = norm(&residual(&k)?);
            if r >= 1e-10 * (1.0 + norm(&k)) {
                return Err(Error::NoSolution(format!("closed form residual {r:e}")));
            }
            return Ok(DeltaSolution { k, residual: r });
        }
        // damped Gauss–Newton over the components 1..n
        let mut k = zeros(n);
        k[0] = c(k0);
        let mut r = residual(&k)?;
        let mut rn = norm(&r);
        for _ in 0..200 {
            if rn < 1e-12 {
                break;
            }
            let jac = jacobian_fd(
                |x| {
                    let mut kk = k.clone();
                    kk[1..].copy_from_slice(x);
                    residual(&kk)
                },
                &k[1..],
            )?;
            let step = match least_squares(&jac, &r) {
                Some(s) => s,
                None => break,
            };
            let mut t = 1.0;
            let mut improved = false;
            while t > 1e-6 {
                let mut trial = k.clone();
                for j in 1..n {
                    trial[j] = k[j] - step[j - 1] * t;
                }
                let tr = residual(&trial)?;
                let tn = norm(&tr);
                if tn < rn {
                    k = trial;
                    r = tr;
                    rn = tn;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if rn < 1e-10 {
            Ok(DeltaSolution { k, residual: rn })
        } else {
            Err(Error::NoSolution(format!("newton stalled at residual {rn:e}")))
        }
    }
}

fn sum_weight(p0: f64, kappa: f64, d: usize) -> f64 {
    // |(1−e^{p₀/κ})/p₀| = 1/(κ g(−p₀/κ))
    (1.0 / (kappa * g_real(-p0 / kappa))).abs().powi(d as i32)
}

fn su2_weight(lambda: f64, p: &[C64]) -> f64 {
    let a = 0.5 * lambda * norm(p);
    if a < 1e-6 {
        let s = 1.0 - a * a / 6.0;
        s * s
    } else {
        (a.sin() / a).powi(2)
    }
}

/// U(p) = exp(iλ p·σ/2) composed in SU(2) and read back in exponential
/// coordinates.
fn su2_compose(lambda: f64, p: &[C64], q: &[C64]) -> Vec<C64> {
    let unit = |v: &[C64]| -> (f64, [f64; 3]) {
        let r = (v[0].re.powi(2) + v[1].re.powi(2) + v[2].re.powi(2)).sqrt();
        let a = 0.5 * lambda * r;
        let sinc = if a.abs() < 1e-8 { 0.5 * lambda * (1.0 - a * a / 6.0) } else { a.sin() / r };
        (a.cos(), [v[0].re * sinc, v[1].re * sinc, v[2].re * sinc])
    };
    let (ca, va) = unit(p);
    let (cb, vb) = unit(q);
    let dot = va[0] * vb[0] + va[1] * vb[1] + va[2] * vb[2];
    let cross = [
        va[1] * vb[2] - va[2] * vb[1],
        va[2] * vb[0] - va[0] * vb[2],
        va[0] * vb[1] - va[1] * vb[0],
    ];
    let w = ca * cb - dot;
    let v: Vec<f64> = (0..3).map(|i| va[i] * cb + ca * vb[i] - cross[i]).collect();
    let s = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let angle = s.atan2(w);
    // |p⊞q| = 2·angle/λ along v/|v|
    let scale = if s < 1e-12 {
        2.0 / lambda * (1.0 / w) * (1.0 + s * s / (3.0 * w * w))
    } else {
        2.0 * angle / (lambda * s)
    };
    v.iter().map(|x| c(x * scale)).collect()
}

pub fn ordering_transform(p: &[C64], kappa: f64, direction: Direction) -> Vec<C64> {
    let gv = g_fn(p[0] / kappa);
    let mut out = p.to_vec();
    for v in out.iter_mut().skip(1) {
        *v = match direction {
            Direction::RightToSum => *v * gv,
            Direction::SumToRight => *v / gv,
        };
    }
    out
}

pub fn dispersion(choice: Dispersion, e: f64, kappa: f64) -> f64 {
    match choice {
        Dispersion::P => e * e,
        Dispersion::X => e * e - e * e * e / kappa,
    }
}

/// Central-difference Jacobian with one Richardson step.
pub fn jacobian_fd<F>(f: F, x: &[C64]) -> Result<Vec<Vec<C64>>>
where
    F: Fn(&[C64]) -> Result<Vec<C64>>,
{
    let n = x.len();
    let m = f(x)?.len();
    let mut jac = vec![zeros(n); m];
    let h = 1e-4 * (1.0 + norm(x)).min(10.0);
    for j in 0..n {
        let d = |h: f64| -> Result<Vec<C64>> {
            let mut a = x.to_vec();
            let mut b = x.to_vec();
            a[j] += h;
            b[j] -= h;
            let fa = f(&a)?;
            let fb = f(&b)?;
            Ok(fa.iter().zip(&fb).map(|(u, v)| (u - v) / (2.0 * h)).collect())
        };
        let d1 = d(h)?;
        let d2 = d(h / 2.0)?;
        for i in 0..m {
            jac[i][j] = (d2[i] * 4.0 - d1[i]) / 3.0;
        }
    }
    Ok(jac)
}

pub fn det(m: &[Vec<C64>]) -> C64 {
    let n = m.len();
    let mut a: Vec<Vec<C64>> = m.to_vec();
    let mut d = c(1.0);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].norm().partial_cmp(&a[j][col].norm()).unwrap())
            .unwrap();
        if a[piv][col].norm() == 0.0 {
            return c(0.0);
        }
        if piv != col {
            a.swap(piv, col);
            d = -d;
        }
        d *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for k in col..n {
                let v = a[col][k];
                a[r][k] -= f * v;
            }
        }
    }
    d
}

/// Solves the normal equations (JᴴJ) s = Jᴴ r.
fn least_squares(j: &[Vec<C64>], r: &[C64]) -> Option<Vec<C64>> {
    let m = j.len();
    let n = j.first()?.len();
    let mut a = vec![zeros(n + 1); n];
    for row in 0..n {
        for col in 0..n {
            a[row][col] = (0..m).map(|i| j[i][row].conj() * j[i][col]).sum();
        }
        a[row][n] = (0..m).map(|i| j[i][row].conj() * r[i]).sum();
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].norm().partial_cmp(&a[y][col].norm()).unwrap())?;
        if a[piv][col].norm() < 1e-300 {
            return None;
        }
        a.swap(piv, col);
        for r2 in 0..n {
            if r2 != col {
                let f = a[r2][col] / a[col][col];
                for k in col..=n {
                    let v = a[col][k];
                    a[r2][k] -= f * v;
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

/// BCH oracle for laws written in the time-to-the-right chart
/// e_p = e^{i p_j x^j} e^{i p_0 x^0}: composes in the exponential chart and
/// converts back by fixed-point iteration.
pub fn bch_add_time_right(sc: &StructureConstants, p: &[C64], q: &[C64], order: usize) -> Vec<C64> {
    let i = C64::new(0.0, 1.0);
    let br = |u: &[C64], v: &[C64]| sc.bracket(u, v);
    let split = |v: &[C64]| -> (Vec<C64>, Vec<C64>) {
        let mut sp: Vec<C64> = v.iter().map(|x| i * x).collect();
        let mut t = zeros(v.len());
        t[0] = i * v[0];
        sp[0] = c(0.0);
        (sp, t)
    };
    let (ps, pt) = split(p);
    let (qs, qt) = split(q);
    let mut w = bch::bch(&ps, &pt, order, br);
    w = bch::bch(&w, &qs, order, br);
    w = bch::bch(&w, &qt, order, br);
    // find r with BCH(i r_s, i r_0) = w
    let mut r: Vec<C64> = w.iter().map(|x| -i * x).collect();
    for _ in 0..200 {
        let (rs, rt) = split(&r);
        let z = bch::bch(&rs, &rt, order, br);
        let mut delta = 0.0f64;
        for k in 0..r.len() {
            let corr = -i * (w[k] - z[k]);
            r[k] += corr;
            delta = delta.max(corr.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    r
}
