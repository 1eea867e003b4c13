//! Structure constants C^{μν}_ρ of Lie-algebra-type coordinate algebras,
//! [x^μ, x^ν] = C^{μν}_ρ x^ρ, and the four shipped presets.

use crate::group::GroupDescriptor;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    KappaMinkowski,
    MoyalExtended,
    RhoMinkowski,
    Su2Lambda,
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kappa_minkowski" | "kappa" => Ok(Preset::KappaMinkowski),
            "moyal_extended" | "moyal" => Ok(Preset::MoyalExtended),
            "rho_minkowski" | "rho" => Ok(Preset::RhoMinkowski),
            "su2_lambda" | "su2" => Ok(Preset::Su2Lambda),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::KappaMinkowski => "kappa_minkowski",
            Preset::MoyalExtended => "moyal_extended",
            Preset::RhoMinkowski => "rho_minkowski",
            Preset::Su2Lambda => "su2_lambda",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    pub name: String,
    pub dim: usize,
    pub deformation: f64,
    pub labels: Vec<String>,
    c: Vec<C64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JacobiReport {
    pub max_violation: f64,
    pub passes: bool,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    mu: usize,
    nu: usize,
    rho: usize,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScJson {
    name: String,
    dim: usize,
    deformation: f64,
    entries: Vec<EntryJson>,
}

pub const JACOBI_TOL: f64 = 1e-12;

fn default_labels(dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("x{i}")).collect()
}

impl StructureConstants {
    pub fn zero(name: &str, dim: usize, deformation: f64) -> Self {
        StructureConstants {
            name: name.to_string(),
            dim,
            deformation,
            labels: default_labels(dim),
            c: vec![C64::new(0.0, 0.0); dim * dim * dim],
        }
    }

    fn idx(&self, mu: usize, nu: usize, rho: usize) -> usize {
        (mu * self.dim + nu) * self.dim + rho
    }

    pub fn get(&self, mu: usize, nu: usize, rho: usize) -> C64 {
        self.c[self.idx(mu, nu, rho)]
    }

    pub fn set(&mut self, mu: usize, nu: usize, rho: usize, v: C64) {
        let i = self.idx(mu, nu, rho);
        self.c[i] = v;
    }

    /// Sets C^{μν}_ρ = v and C^{νμ}_ρ = −v.
    pub fn set_antisym(&mut self, mu: usize, nu: usize, rho: usize, v: C64) {
        self.set(mu, nu, rho, v);
        self.set(nu, mu, rho, -v);
    }

    pub fn entries(&self) -> Vec<(usize, usize, usize, C64)> {
        let mut out = Vec::new();
        for mu in 0..self.dim {
            for nu in 0..self.dim {
                for rho in 0..self.dim {
                    let v = self.get(mu, nu, rho);
                    if v.norm() != 0.0 {
                        out.push((mu, nu, rho, v));
                    }
                }
            }
        }
        out
    }

    /// [u, v]_ρ = C^{μν}_ρ u_μ v_ν for elements u_μ x^μ, v_ν x^ν.
    pub fn bracket(&self, u: &[C64], v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for mu in 0..self.dim {
            for nu in 0..self.dim {
                let uv = u[mu] * v[nu];
                if uv.norm_sqr() == 0.0 {
                    continue;
                }
                for (rho, o) in out.iter_mut().enumerate() {
                    *o += self.get(mu, nu, rho) * uv;
                }
            }
        }
        out
    }

    pub fn antisymmetry_violation(&self) -> f64 {
        let mut worst = 0.0f64;
        for mu in 0..self.dim {
            for nu in 0..self.dim {
                for rho in 0..self.dim {
                    worst = worst.max((self.get(mu, nu, rho) + self.get(nu, mu, rho)).norm());
                }
            }
        }
        worst
    }

    pub fn jacobi_check(&self) -> JacobiReport {
        let n = self.dim;
        let mut worst = 0.0f64;
        for mu in 0..n {
            for nu in 0..n {
                for rho in 0..n {
                    for tau in 0..n {
                        let mut s = C64::new(0.0, 0.0);
                        for sg in 0..n {
                            s += self.get(mu, nu, sg) * self.get(sg, rho, tau)
                                + self.get(nu, rho, sg) * self.get(sg, mu, tau)
                                + self.get(rho, mu, sg) * self.get(sg, nu, tau);
                        }
                        worst = worst.max(s.norm());
                    }
                }
            }
        }
        JacobiReport {
            max_violation: worst,
            passes: worst <= JACOBI_TOL,
        }
    }

    pub fn max_diff(&self, other: &StructureConstants) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.c
            .iter()
            .zip(&other.c)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: C64) -> StructureConstants {
        let mut out = self.clone();
        for v in out.c.iter_mut() {
            *v *= s;
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<EntryJson> = self
            .entries()
            .into_iter()
            .map(|(mu, nu, rho, v)| EntryJson {
                mu,
                nu,
                rho,
                re: v.re,
                im: v.im,
            })
            .collect();
        serde_json::to_value(ScJson {
            name: self.name.clone(),
            dim: self.dim,
            deformation: self.deformation,
            entries,
        })
        .expect("structure constants serialize")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let parsed: ScJson = serde_path_to_error::deserialize(v).map_err(|e| {
            let msg = e.inner().to_string();
            Error::Config {
                path: crate::error::json_pointer(e.path()),
                msg,
            }
        })?;
        if parsed.dim == 0 {
            return Err(Error::BadDimension {
                preset: parsed.name,
                dim: 0,
            });
        }
        let mut sc = StructureConstants::zero(&parsed.name, parsed.dim, parsed.deformation);
        for e in parsed.entries {
            if e.mu >= sc.dim || e.nu >= sc.dim || e.rho >= sc.dim {
                return Err(Error::Config {
                    path: "/entries".into(),
                    msg: format!("index ({},{},{}) out of range", e.mu, e.nu, e.rho),
                });
            }
            sc.set(e.mu, e.nu, e.rho, C64::new(e.re, e.im));
        }
        Ok(sc)
    }
}

/// Canonical symplectic Θ = θ·diag(J, J, …) with J = [[0,1],[−1,0]].
pub fn moyal_theta(theta: f64, dim: usize) -> Vec<Vec<f64>> {
    let mut t = vec![vec![0.0; dim]; dim];
    for b in 0..dim / 2 {
        t[2 * b][2 * b + 1] = theta;
        t[2 * b + 1][2 * b] = -theta;
    }
    t
}

pub fn levi_civita(i: usize, j: usize, k: usize) -> i32 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// `dim` is the space-time dimension: d+1 for κ-Minkowski, the even dimension
/// of the Moyal plane (one phase slot is appended), 4 for ρ-Minkowski and 3
/// for su(2).
pub fn preset(p: Preset, params: &[f64], dim: usize) -> Result<StructureConstants> {
    let par = *params
        .first()
        .ok_or_else(|| Error::BadParameter(format!("{} needs a deformation parameter", p.name())))?;
    if !par.is_finite() {
        return Err(Error::BadParameter(format!("non-finite parameter {par}")));
    }
    let i = C64::new(0.0, 1.0);
    match p {
        Preset::KappaMinkowski => {
            if par <= 0.0 {
                return Err(Error::BadParameter(format!("κ must be positive, got {par}")));
            }
            if dim < 2 {
                return Err(Error::BadDimension {
                    preset: p.name().into(),
                    dim,
                });
            }
            let mut sc = StructureConstants::zero(p.name(), dim, par);
            sc.labels = (0..dim).map(|j| format!("x{j}")).collect();
            for j in 1..dim {
                sc.set_antisym(0, j, j, i / par);
            }
            Ok(sc)
        }
        Preset::MoyalExtended => {
            if par == 0.0 {
                return Err(Error::BadParameter("θ must be non-zero".into()));
            }
            if dim < 2 || dim % 2 != 0 {
                return Err(Error::BadDimension {
                    preset: p.name().into(),
                    dim,
                });
            }
            let slots = dim + 1;
            let mut sc = StructureConstants::zero(p.name(), slots, par);
            sc.labels = (0..dim).map(|j| format!("x{j}")).chain(["x5".to_string()]).collect();
            let th = moyal_theta(par, dim);
            for a in 0..dim {
                for b in 0..dim {
                    if th[a][b] != 0.0 {
                        sc.set(a, b, dim, i * th[a][b]);
                    }
                }
            }
            Ok(sc)
        }
        Preset::RhoMinkowski => {
            if par == 0.0 {
                return Err(Error::BadParameter("ρ must be non-zero".into()));
            }
            if dim != 4 {
                return Err(Error::BadDimension {
                    preset: p.name().into(),
                    dim,
                });
            }
            let mut sc = StructureConstants::zero(p.name(), 4, par);
            sc.set_antisym(0, 1, 2, i * par);
            sc.set_antisym(0, 2, 1, -i * par);
            Ok(sc)
        }
        Preset::Su2Lambda => {
            if par == 0.0 {
                return Err(Error::BadParameter("λ must be non-zero".into()));
            }
            if dim != 3 {
                return Err(Error::BadDimension {
                    preset: p.name().into(),
                    dim,
                });
            }
            let mut sc = StructureConstants::zero(p.name(), 3, par);
            sc.labels = vec!["x1".into(), "x2".into(), "x3".into()];
            for a in 0..3 {
                for b in 0..3 {
                    for c in 0..3 {
                        let e = levi_civita(a, b, c);
                        if e != 0 {
                            sc.set(a, b, c, i * par * e as f64);
                        }
                    }
                }
            }
            Ok(sc)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryMethod {
    Analytic,
    FiniteDifference,
}

pub const FD_STEP: f64 = 1e-4;

/// Mixed Hessian H^{μν}_ρ = ∂²(p⊞q)_ρ/∂p_μ∂q_ν at the origin by central
/// differences with one Richardson step.
pub fn hessian_fd(g: &GroupDescriptor) -> Result<Vec<C64>> {
    let n = g.dim();
    let zero = vec![C64::new(0.0, 0.0); n];
    let mut out = vec![C64::new(0.0, 0.0); n * n * n];
    let stencil = |mu: usize, nu: usize, h: f64| -> Result<Vec<C64>> {
        let mut acc = vec![C64::new(0.0, 0.0); n];
        for (sp, sq, w) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
            let mut p = zero.clone();
            let mut q = zero.clone();
            p[mu] = C64::new(sp * h, 0.0);
            q[nu] = C64::new(sq * h, 0.0);
            let s = g.add(&p, &q)?;
            for r in 0..n {
                acc[r] += s[r] * w;
            }
        }
        Ok(acc.into_iter().map(|v| v / (4.0 * h * h)).collect())
    };
    let mut spread = 0.0f64;
    for mu in 0..n {
        for nu in 0..n {
            let d1 = stencil(mu, nu, FD_STEP)?;
            let d2 = stencil(mu, nu, FD_STEP / 2.0)?;
            for rho in 0..n {
                let r = (d2[rho] * 4.0 - d1[rho]) / 3.0;
                spread = spread.max((d1[rho] - d2[rho]).norm() / (1.0 + r.norm()));
                out[(mu * n + nu) * n + rho] = r;
            }
        }
    }
    if !spread.is_finite() || spread > 1e-3 {
        return Err(Error::UnstableHessian(spread));
    }
    Ok(out)
}

/// C^{μν}_ρ = −i (H^{μν}_ρ − H^{νμ}_ρ).
pub fn structure_from_hessian(name: &str, dim: usize, deformation: f64, h: &[C64]) -> StructureConstants {
    let mut sc = StructureConstants::zero(name, dim, deformation);
    let i = C64::new(0.0, 1.0);
    for mu in 0..dim {
        for nu in 0..dim {
            for rho in 0..dim {
                let a = h[(mu * dim + nu) * dim + rho];
                let b = h[(nu * dim + mu) * dim + rho];
                sc.set(mu, nu, rho, -i * (a - b));
            }
        }
    }
    sc
}

pub fn recover_from_group_law(g: &GroupDescriptor, method: RecoveryMethod) -> Result<StructureConstants> {
    let h = match method {
        RecoveryMethod::Analytic => g
            .analytic_hessian()
            .ok_or_else(|| Error::BadParameter(format!("no closed-form hessian for {}", g.name())))?,
        RecoveryMethod::FiniteDifference => hessian_fd(g)?,
    };
    Ok(structure_from_hessian(
        &format!("recovered:{}", g.name()),
        g.dim(),
        g.structure.deformation,
        &h,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_preset_entries() {
        let sc = preset(Preset::KappaMinkowski, &[1.0], 2).unwrap();
        assert_eq!(sc.get(0, 1, 1), C64::new(0.0, 1.0));
        assert_eq!(sc.get(1, 0, 1), C64::new(0.0, -1.0));
        assert_eq!(sc.entries().len(), 2);
    }

    #[test]
    fn su2_preset_is_levi_civita() {
        let sc = preset(Preset::Su2Lambda, &[1.0], 3).unwrap();
        assert_eq!(sc.get(0, 1, 2), C64::new(0.0, 1.0));
        assert_eq!(sc.get(2, 1, 0), C64::new(0.0, -1.0));
        assert_eq!(sc.get(0, 0, 2), C64::new(0.0, 0.0));
    }

    #[test]
    fn presets_satisfy_jacobi_and_antisymmetry() {
        for (p, dim) in [
            (Preset::KappaMinkowski, 2),
            (Preset::KappaMinkowski, 4),
            (Preset::MoyalExtended, 4),
            (Preset::RhoMinkowski, 4),
            (Preset::Su2Lambda, 3),
        ] {
            let sc = preset(p, &[0.7], dim).unwrap();
            assert_eq!(sc.jacobi_check().max_violation, 0.0);
            assert_eq!(sc.antisymmetry_violation(), 0.0);
        }
    }

    #[test]
    fn corrupted_tensor_violates_jacobi() {
        let mut sc = preset(Preset::Su2Lambda, &[1.0], 3).unwrap();
        sc.set(0, 1, 2, C64::new(0.0, -1.0));
        let r = sc.jacobi_check();
        assert!(r.max_violation > 0.5);
        assert!(!r.passes);
    }

    #[test]
    fn preset_errors() {
        assert!(matches!(preset(Preset::KappaMinkowski, &[-1.0], 2), Err(Error::BadParameter(_))));
        assert!(matches!(preset(Preset::MoyalExtended, &[1.0], 3), Err(Error::BadDimension { .. })));
        assert!(matches!(preset(Preset::RhoMinkowski, &[1.0], 3), Err(Error::BadDimension { .. })));
        assert!("nope".parse::<Preset>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let sc = preset(Preset::MoyalExtended, &[0.5], 4).unwrap();
        let v = sc.to_json();
        let back = StructureConstants::from_json(&v).unwrap();
        assert_eq!(back.max_diff(&sc), 0.0);
        assert_eq!(v["dim"], 5);
        let bad = serde_json::json!({"name":"x","dim":2,"deformation":1.0,"entries":[],"extra":1});
        assert!(StructureConstants::from_json(&bad).is_err());
    }
}
