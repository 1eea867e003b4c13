//! First-order Seiberg–Witten map for U(1) fields given as exact
//! polynomials.

use crate::exact::Q;
use crate::{Error, Result};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const MAX_VARS: usize = 4;
pub const MAX_DEGREE: u32 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, Q>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = MPoly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = MPoly::zero(nvars);
        p.add_term(e, Q::one());
        p
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Q) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn sub(&self, o: &MPoly) -> MPoly {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn mul(&self, o: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                out.add_term(a.iter().zip(b).map(|(u, v)| u + v).collect(), x * y);
            }
        }
        out
    }

    pub fn deriv(&self, i: usize) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c * Q::from_integer(e[i].into()));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<PolyTerm> = self
            .terms
            .iter()
            .map(|(e, c)| PolyTerm {
                exponents: e.clone(),
                coeff: c.to_string(),
            })
            .collect();
        serde_json::to_value(terms).unwrap()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub exponents: Vec<u32>,
    /// rational as "n" or "n/d"
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwInput {
    pub nvars: usize,
    /// antisymmetric Θ^{ρσ}, rationals as strings
    pub theta: Vec<Vec<String>>,
    /// A_μ, one term list per component
    pub field: Vec<Vec<PolyTerm>>,
    #[serde(default)]
    pub gauge_parameter: Option<Vec<PolyTerm>>,
}

fn parse_q(s: &str) -> Result<Q> {
    s.trim()
        .parse::<Q>()
        .map_err(|_| Error::BadParameter(format!("not a rational: {s}")))
}

fn parse_poly(nvars: usize, terms: &[PolyTerm]) -> Result<MPoly> {
    let mut p = MPoly::zero(nvars);
    for t in terms {
        if t.exponents.len() != nvars {
            return Err(Error::DimMismatch {
                expected: nvars,
                got: t.exponents.len(),
            });
        }
        p.add_term(t.exponents.clone(), parse_q(&t.coeff)?);
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwProblem {
    pub theta: Vec<Vec<Q>>,
    pub field: Vec<MPoly>,
    pub gauge_parameter: Option<MPoly>,
}

impl SwProblem {
    pub fn new(theta: Vec<Vec<Q>>, field: Vec<MPoly>, gauge_parameter: Option<MPoly>) -> Result<Self> {
        let n = field.len();
        if n == 0 || n > MAX_VARS {
            return Err(Error::BadParameter(format!("{n} variables; 1..={MAX_VARS} supported")));
        }
        if theta.len() != n || theta.iter().any(|r| r.len() != n) {
            return Err(Error::DimMismatch { expected: n, got: theta.len() });
        }
        for a in 0..n {
            for b in 0..n {
                if theta[a][b] != -theta[b][a].clone() {
                    return Err(Error::BadParameter("Θ must be antisymmetric".into()));
                }
            }
        }
        for p in field.iter().chain(gauge_parameter.iter()) {
            if p.nvars != n {
                return Err(Error::DimMismatch { expected: n, got: p.nvars });
            }
            if p.degree() > MAX_DEGREE {
                return Err(Error::DegreeOverflow {
                    degree: p.degree() as usize,
                    limit: MAX_DEGREE as usize,
                });
            }
        }
        Ok(SwProblem {
            theta,
            field,
            gauge_parameter,
        })
    }

    /// Parses an [`SwInput`] JSON document and validates it.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        let inp: SwInput = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let msg = e.inner().to_string();
            Error::Config {
                path: crate::error::json_pointer(e.path()),
                msg,
            }
        })?;
        Self::from_input(&inp)
    }

    pub fn from_input(inp: &SwInput) -> Result<Self> {
        let theta = inp
            .theta
            .iter()
            .map(|r| r.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let field = inp.field.iter().map(|t| parse_poly(inp.nvars, t)).collect::<Result<Vec<_>>>()?;
        let gp = inp.gauge_parameter.as_ref().map(|t| parse_poly(inp.nvars, t)).transpose()?;
        Self::new(theta, field, gp)
    }
}

/// F_{μν} = ∂_μA_ν − ∂_νA_μ
pub fn field_strength(a: &[MPoly]) -> Vec<Vec<MPoly>> {
    let n = a.len();
    (0..n)
        .map(|mu| (0..n).map(|nu| a[nu].deriv(mu).sub(&a[mu].deriv(nu))).collect())
        .collect()
}

/// −½Θ^{ρσ}A_ρ(∂_σB_μ + F(B)_{σμ})
fn bilinear(theta: &[Vec<Q>], a: &[MPoly], b: &[MPoly]) -> Vec<MPoly> {
    let n = a.len();
    let fb = field_strength(b);
    let half = Q::new((-1).into(), 2.into());
    (0..n)
        .map(|mu| {
            let mut acc = MPoly::zero(a[0].nvars);
            for rho in 0..n {
                for sigma in 0..n {
                    let t = &theta[rho][sigma];
                    if t.is_zero() {
                        continue;
                    }
                    let inner = b[mu].deriv(sigma).add(&fb[sigma][mu]);
                    acc = acc.add(&a[rho].mul(&inner).scale(&(t * &half)));
                }
            }
            acc
        })
        .collect()
}

/// Â_μ = A_μ − ½Θ^{ρσ}A_ρ(∂_σA_μ + F_{σμ})
pub fn sw_map_order1(p: &SwProblem) -> Vec<MPoly> {
    let corr = bilinear(&p.theta, &p.field, &p.field);
    p.field.iter().zip(corr).map(|(a, c)| a.add(&c)).collect()
}

/// F̂_{μν} = F_{μν} + Θ^{ρσ}(F_{μρ}F_{νσ} − A_ρ∂_σF_{μν})
pub fn sw_field_strength(p: &SwProblem) -> Vec<Vec<MPoly>> {
    let n = p.field.len();
    let f = field_strength(&p.field);
    let mut out = f.clone();
    for mu in 0..n {
        for nu in 0..n {
            for rho in 0..n {
                for sigma in 0..n {
                    let t = &p.theta[rho][sigma];
                    if t.is_zero() {
                        continue;
                    }
                    let term = f[mu][rho].mul(&f[nu][sigma]).sub(&p.field[rho].mul(&f[mu][nu].deriv(sigma)));
                    out[mu][nu] = out[mu][nu].add(&term.scale(t));
                }
            }
        }
    }
    out
}

/// λ̂ = λ + ½Θ^{ρσ}∂_ρλ A_σ
pub fn sw_gauge_parameter(theta: &[Vec<Q>], a: &[MPoly], lambda: &MPoly) -> MPoly {
    let n = a.len();
    let half = Q::new(1.into(), 2.into());
    let mut acc = lambda.clone();
    for rho in 0..n {
        for sigma in 0..n {
            let t = &theta[rho][sigma];
            if !t.is_zero() {
                acc = acc.add(&lambda.deriv(rho).mul(&a[sigma]).scale(&(t * &half)));
            }
        }
    }
    acc
}

/// Linear-in-λ O(Θ) part of Â(A+∂λ) − Â(A) − δ̂_λ̂Â with
/// δ̂_λ̂Â_μ = ∂_μλ̂ − Θ^{ρσ}∂_ρλ∂_σA_μ. Zero for a consistent map.
pub fn sw_consistency(theta: &[Vec<Q>], a: &[MPoly], lambda: &MPoly) -> Vec<MPoly> {
    let n = a.len();
    let dl: Vec<MPoly> = (0..n).map(|mu| lambda.deriv(mu)).collect();
    let q1 = bilinear(theta, &dl, a);
    let q2 = bilinear(theta, a, &dl);
    let lh = sw_gauge_parameter(theta, a, lambda);
    (0..n)
        .map(|mu| {
            let lhs = dl[mu].add(&q1[mu]).add(&q2[mu]);
            let mut rhs = lh.deriv(mu);
            for rho in 0..n {
                for sigma in 0..n {
                    let t = &theta[rho][sigma];
                    if !t.is_zero() {
                        rhs = rhs.sub(&dl[rho].mul(&a[mu].deriv(sigma)).scale(t));
                    }
                }
            }
            lhs.sub(&rhs)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SwOutput {
    pub a_hat: Vec<serde_json::Value>,
    pub f_hat: Vec<Vec<serde_json::Value>>,
    pub consistency_zero: Option<bool>,
}

pub fn sw_run(p: &SwProblem) -> SwOutput {
    let a_hat = sw_map_order1(p).iter().map(MPoly::to_json).collect();
    let f_hat = sw_field_strength(p)
        .iter()
        .map(|r| r.iter().map(MPoly::to_json).collect())
        .collect();
    let consistency_zero = p
        .gauge_parameter
        .as_ref()
        .map(|l| sw_consistency(&p.theta, &p.field, l).iter().all(MPoly::is_zero));
    SwOutput {
        a_hat,
        f_hat,
        consistency_zero,
    }
}
