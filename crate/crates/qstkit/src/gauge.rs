//! Twisted U(1) gauge structures on κ-Minkowski plane-wave packets, and the
//! curvature of a constant connection on the tangent algebra.

use crate::group::GroupDescriptor;
use crate::lie::StructureConstants;
use crate::wave::{Generator, WavePacket};
use crate::{Error, Result, C64};
use serde::Serialize;
use std::sync::Arc;

pub const TOL: f64 = 1e-12;

fn i() -> C64 {
    C64::new(0.0, 1.0)
}

/// Largest coefficient modulus.
pub fn packet_norm(w: &WavePacket) -> f64 {
    w.terms().iter().map(|(_, a)| a.norm()).fold(0.0, f64::max)
}

pub fn diff_norm(a: &WavePacket, b: &WavePacket) -> Result<f64> {
    Ok(packet_norm(&a.add(&b.scale(C64::new(-1.0, 0.0))?)?))
}

pub fn unit(group: &Arc<GroupDescriptor>) -> Result<WavePacket> {
    WavePacket::plane(group.clone(), &vec![0.0; group.dim()])
}

#[derive(Clone, Debug)]
pub struct GaugeField {
    pub components: Vec<WavePacket>,
}

impl GaugeField {
    pub fn new(components: Vec<WavePacket>) -> Result<Self> {
        let g = components
            .first()
            .ok_or_else(|| Error::BadParameter("gauge field needs components".into()))?
            .group()
            .clone();
        if components.len() != g.dim() {
            return Err(Error::DimMismatch {
                expected: g.dim(),
                got: components.len(),
            });
        }
        for c in &components {
            if c.group() != &g {
                return Err(Error::GroupMismatch(g.name(), c.group().name()));
            }
        }
        Ok(GaugeField { components })
    }

    pub fn zero(group: &Arc<GroupDescriptor>) -> Self {
        GaugeField {
            components: (0..group.dim()).map(|_| WavePacket::new(group.clone())).collect(),
        }
    }

    pub fn group(&self) -> &Arc<GroupDescriptor> {
        self.components[0].group()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }
}

/// ‖X_μ(f⋆g) − X_μ(f)⋆g − E(f)⋆X_μ(g)‖
pub fn twisted_leibniz_check(mu: usize, f: &WavePacket, g: &WavePacket) -> Result<f64> {
    let x = Generator::X(mu);
    let lhs = f.star(g)?.act(x)?;
    let rhs = f.act(x)?.star(g)?.add(&f.act(Generator::E(1))?.star(&g.act(x)?)?)?;
    diff_norm(&lhs, &rhs)
}

/// ‖(X_μ f)† + E⁻¹X_μ(f†)‖
pub fn twisted_reality_check(mu: usize, f: &WavePacket) -> Result<f64> {
    let x = Generator::X(mu);
    let lhs = f.act(x)?.dagger()?;
    let rhs = f.dagger()?.act(x)?.act(Generator::E(-1))?.scale(C64::new(-1.0, 0.0))?;
    diff_norm(&lhs, &rhs)
}

/// F_{μν} = X_μ(A_ν) − X_ν(A_μ) − i(E(A_μ)⋆A_ν − E(A_ν)⋆A_μ)
pub fn field_strength(a: &GaugeField) -> Result<Vec<Vec<WavePacket>>> {
    let n = a.dim();
    let g = a.group();
    let mut f = vec![vec![WavePacket::new(g.clone()); n]; n];
    let ea: Vec<WavePacket> = a.components.iter().map(|c| c.act(Generator::E(1))).collect::<Result<_>>()?;
    for mu in 0..n {
        for nu in mu + 1..n {
            let lin = a.components[nu]
                .act(Generator::X(mu))?
                .add(&a.components[mu].act(Generator::X(nu))?.scale(C64::new(-1.0, 0.0))?)?;
            let comm = ea[mu]
                .star(&a.components[nu])?
                .add(&ea[nu].star(&a.components[mu])?.scale(C64::new(-1.0, 0.0))?)?;
            let v = lin.add(&comm.scale(-i())?)?;
            f[nu][mu] = v.scale(C64::new(-1.0, 0.0))?;
            f[mu][nu] = v;
        }
    }
    Ok(f)
}

/// u⋆u† and u†⋆u against the unit.
pub fn unitarity_residual(u: &WavePacket) -> Result<f64> {
    let one = unit(u.group())?;
    let ud = u.dagger()?;
    Ok(diff_norm(&u.star(&ud)?, &one)?.max(diff_norm(&ud.star(u)?, &one)?))
}

/// A_μ^u = E(u†)⋆A_μ⋆u + i E(u†)⋆X_μ(u), i.e. i E(u†)⋆∇_μ(u) for ∇_μ = X_μ − iA_μ⋆
pub fn gauge_transform(a: &GaugeField, u: &WavePacket) -> Result<GaugeField> {
    let r = unitarity_residual(u)?;
    if r > TOL {
        return Err(Error::NotUnitary(r));
    }
    let eud = u.dagger()?.act(Generator::E(1))?;
    let comps = a
        .components
        .iter()
        .enumerate()
        .map(|(mu, am)| eud.star(am)?.star(u)?.add(&eud.star(&u.act(Generator::X(mu))?)?.scale(i())?))
        .collect::<Result<_>>()?;
    GaugeField::new(comps)
}

/// max_{μν} ‖F(A^u)_{μν} − E²(u†)⋆F(A)_{μν}⋆u‖
pub fn covariance_check(a: &GaugeField, u: &WavePacket) -> Result<f64> {
    let au = gauge_transform(a, u)?;
    let fu = field_strength(&au)?;
    let f = field_strength(a)?;
    let e2ud = u.dagger()?.act(Generator::E(2))?;
    let mut worst: f64 = 0.0;
    for mu in 0..a.dim() {
        for nu in 0..a.dim() {
            let rhs = e2ud.star(&f[mu][nu])?.star(u)?;
            worst = worst.max(diff_norm(&fu[mu][nu], &rhs)?);
        }
    }
    Ok(worst)
}

/// ‖A_μ† − E⁻¹(A_μ)‖ per component.
pub fn hermiticity_check(a: &GaugeField) -> Result<Vec<f64>> {
    a.components
        .iter()
        .map(|c| diff_norm(&c.dagger()?, &c.act(Generator::E(-1))?))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimRow {
    pub d: usize,
    /// max_p₀ |e^{(4−d)p₀/κ} − 1|, from the exponent count
    pub max_deviation: f64,
    /// the same prefactor evaluated through packet products
    pub packet_deviation: f64,
}

/// Prefactor E^{d−2}(u)⋆E²(u†) for plane-wave unitaries u = e_p.
pub fn dimension_constraint_scan(ds: &[usize], kappa: f64, p0s: &[f64]) -> Result<Vec<DimRow>> {
    let mut rows = Vec::new();
    for &d in ds {
        let g = Arc::new(GroupDescriptor::kappa_minkowski(kappa, d)?);
        let one = unit(&g)?;
        let mut max_deviation: f64 = 0.0;
        let mut packet_deviation: f64 = 0.0;
        for &p0 in p0s {
            // E^k acts on e_p by e^{−kp₀/κ}; (d−2) on u and 2 on u† with energy −p₀
            let exponent = (4 - d as i64) as f64 * p0 / kappa;
            max_deviation = max_deviation.max((exponent.exp() - 1.0).abs());
            let mut p = vec![0.0; d + 1];
            p[0] = p0;
            for (j, v) in p.iter_mut().enumerate().skip(1) {
                *v = 0.3 * j as f64;
            }
            let u = WavePacket::plane(g.clone(), &p)?;
            let pre = u.act(Generator::E(d as i32 - 2))?.star(&u.dagger()?.act(Generator::E(2))?)?;
            packet_deviation = packet_deviation.max(diff_norm(&pre, &one)?);
        }
        rows.push(DimRow {
            d,
            max_deviation,
            packet_deviation,
        });
    }
    Ok(rows)
}

pub fn dimension_zero_set(rows: &[DimRow]) -> Vec<usize> {
    rows.iter().filter(|r| r.max_deviation == 0.0).map(|r| r.d).collect()
}

/// Constant central connection Γ^σ_{μν}, stored as gamma[σ][μ][ν].
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionCoefficients {
    pub gamma: Vec<Vec<Vec<C64>>>,
    pub structure: StructureConstants,
}

impl ConnectionCoefficients {
    pub fn new(gamma: Vec<Vec<Vec<C64>>>, structure: StructureConstants) -> Result<Self> {
        let n = structure.dim;
        if gamma.len() != n || gamma.iter().any(|m| m.len() != n || m.iter().any(|r| r.len() != n)) {
            return Err(Error::DimMismatch { expected: n, got: gamma.len() });
        }
        Ok(ConnectionCoefficients { gamma, structure })
    }

    pub fn dim(&self) -> usize {
        self.structure.dim
    }

    /// max |Γ̄ + Γ|, zero for a Hermitian connection
    pub fn hermiticity_residual(&self) -> f64 {
        self.gamma
            .iter()
            .flatten()
            .flatten()
            .map(|g| (g.conj() + g).norm())
            .fold(0.0, f64::max)
    }
}

/// R_{μνρ}^σ stored as r[μ][ν][ρ][σ]; the action terms vanish for constant Γ.
pub fn tangent_curvature(c: &ConnectionCoefficients) -> Vec<Vec<Vec<Vec<C64>>>> {
    let n = c.dim();
    let g = |s: usize, m: usize, r: usize| c.gamma[s][m][r];
    let mut r = vec![vec![vec![vec![C64::new(0.0, 0.0); n]; n]; n]; n];
    for mu in 0..n {
        for nu in 0..n {
            for rho in 0..n {
                for sigma in 0..n {
                    let mut v = C64::new(0.0, 0.0);
                    for tau in 0..n {
                        v += g(tau, nu, rho) * g(sigma, mu, tau) - g(tau, mu, rho) * g(sigma, nu, tau)
                            - c.structure.get(mu, nu, tau) * g(sigma, tau, rho);
                    }
                    r[mu][nu][rho][sigma] = v;
                }
            }
        }
    }
    r
}

/// max |R_{μνρ}^σ + R_{νμρ}^σ|
pub fn curvature_antisymmetry(r: &[Vec<Vec<Vec<C64>>>]) -> f64 {
    let n = r.len();
    let mut worst: f64 = 0.0;
    for mu in 0..n {
        for nu in 0..n {
            for rho in 0..n {
                for sigma in 0..n {
                    worst = worst.max((r[mu][nu][rho][sigma] + r[nu][mu][rho][sigma]).norm());
                }
            }
        }
    }
    worst
}
