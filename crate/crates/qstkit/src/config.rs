//! Run configuration: JSON parsing, validation and defaults.

use crate::group::GroupDescriptor;
use crate::lie::{Preset, StructureConstants};
use crate::report::Format;
use crate::error::json_pointer;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::str::FromStr;

pub const SEED_ENV: &str = "QSTKIT_SEED";
pub const DEFAULT_BCH_ORDER: usize = 8;

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum SpacetimeJson {
    Preset(String),
    Inline(serde_json::Value),
}

#[derive(Clone, Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct OutputJson {
    path: Option<String>,
    format: Option<Format>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigJson {
    spacetime: SpacetimeJson,
    kappa: Option<f64>,
    theta: Option<f64>,
    rho: Option<f64>,
    lambda: Option<f64>,
    d: Option<usize>,
    dim: Option<usize>,
    bch_order: Option<usize>,
    seed: Option<u64>,
    jobs: Option<usize>,
    samples: Option<usize>,
    grid: Option<usize>,
    states: Option<usize>,
    twist_order: Option<usize>,
    truncation: Option<usize>,
    output: Option<OutputJson>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Spacetime {
    Preset { preset: Preset, parameter: f64, dim: usize },
    Inline { structure: serde_json::Value, bch_order: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub associativity: f64,
    pub identity: f64,
    pub haar: f64,
    pub modular: f64,
    pub recovery_fd: f64,
    pub matrix: f64,
    pub bessel: f64,
    pub nonplanar: f64,
    pub asymptotic: f64,
    pub gauge: f64,
    pub cone: f64,
    pub sll: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            associativity: 1e-9,
            identity: 1e-12,
            haar: 1e-8,
            modular: 1e-10,
            recovery_fd: 1e-6,
            matrix: 1e-13,
            bessel: 1e-6,
            nonplanar: 1e-6,
            asymptotic: 0.02,
            gauge: 1e-12,
            cone: 1e-8,
            sll: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn set(&mut self, key: &str, v: f64) -> Result<()> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Config {
                path: format!("/tolerances/{key}"),
                msg: format!("tolerance must be positive, got {v}"),
            });
        }
        let slot = match key {
            "associativity" => &mut self.associativity,
            "identity" => &mut self.identity,
            "haar" => &mut self.haar,
            "modular" => &mut self.modular,
            "recovery_fd" => &mut self.recovery_fd,
            "matrix" => &mut self.matrix,
            "bessel" => &mut self.bessel,
            "nonplanar" => &mut self.nonplanar,
            "asymptotic" => &mut self.asymptotic,
            "gauge" => &mut self.gauge,
            "cone" => &mut self.cone,
            "sll" => &mut self.sll,
            other => {
                return Err(Error::Config {
                    path: format!("/tolerances/{other}"),
                    msg: "unknown tolerance key".into(),
                })
            }
        };
        *slot = v;
        Ok(())
    }

    /// `key=value`
    pub fn apply_override(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::BadParameter(format!("tolerance override `{kv}` is not key=value")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::BadParameter(format!("tolerance override `{kv}` has no numeric value")))?;
        self.set(k.trim(), v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub spacetime: Spacetime,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub samples: usize,
    pub grid: usize,
    pub states: usize,
    pub twist_order: usize,
    pub truncation: usize,
    pub output_path: Option<String>,
    pub format: Format,
    pub tolerances: Tolerances,
}

impl RunConfig {
    /// A preset at unit deformation with all defaults.
    pub fn default_for(preset: Preset) -> Self {
        let (parameter, dim) = preset_defaults(preset, None, None);
        RunConfig {
            spacetime: Spacetime::Preset { preset, parameter, dim },
            seed: 0,
            jobs: None,
            samples: 10_000,
            grid: 256,
            states: 200,
            twist_order: 4,
            truncation: 32,
            output_path: None,
            format: Format::Json,
            tolerances: Tolerances::default(),
        }
    }

    pub fn group(&self) -> Result<GroupDescriptor> {
        match &self.spacetime {
            Spacetime::Preset { preset, parameter, dim } => GroupDescriptor::from_preset(*preset, &[*parameter], *dim),
            Spacetime::Inline { structure, bch_order } => {
                Ok(GroupDescriptor::from_structure(StructureConstants::from_json(structure)?, *bch_order))
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::Map::new();
        match &self.spacetime {
            Spacetime::Preset { preset, parameter, dim } => {
                v.insert("spacetime".into(), preset.name().into());
                let key = match preset {
                    Preset::KappaMinkowski => "kappa",
                    Preset::MoyalExtended => "theta",
                    Preset::RhoMinkowski => "rho",
                    Preset::Su2Lambda => "lambda",
                };
                v.insert(key.into(), (*parameter).into());
                v.insert("dim".into(), (*dim).into());
            }
            Spacetime::Inline { structure, bch_order } => {
                v.insert("spacetime".into(), structure.clone());
                v.insert("bch_order".into(), (*bch_order).into());
            }
        }
        v.insert("seed".into(), self.seed.into());
        if let Some(j) = self.jobs {
            v.insert("jobs".into(), j.into());
        }
        v.insert("samples".into(), self.samples.into());
        v.insert("grid".into(), self.grid.into());
        v.insert("states".into(), self.states.into());
        v.insert("twist_order".into(), self.twist_order.into());
        v.insert("truncation".into(), self.truncation.into());
        let mut out = serde_json::Map::new();
        if let Some(p) = &self.output_path {
            out.insert("path".into(), p.clone().into());
        }
        out.insert("format".into(), serde_json::to_value(self.format).unwrap());
        v.insert("output".into(), out.into());
        v.insert("tolerances".into(), serde_json::to_value(&self.tolerances).unwrap());
        v.into()
    }
}

fn preset_defaults(p: Preset, d: Option<usize>, dim: Option<usize>) -> (f64, usize) {
    let dim = dim.or(d.map(|d| d + 1));
    match p {
        Preset::KappaMinkowski => (1.0, dim.unwrap_or(4)),
        Preset::MoyalExtended => (1.0, dim.unwrap_or(4)),
        Preset::RhoMinkowski => (1.0, dim.unwrap_or(4)),
        Preset::Su2Lambda => (1.0, dim.unwrap_or(3)),
    }
}

fn cfg_err(path: &str, msg: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        msg: msg.into(),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut de = serde_json::Deserializer::from_str(text);
    let raw: ConfigJson = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let msg = e.inner().to_string();
        cfg_err(&json_pointer(e.path()), msg)
    })?;
    de.end().map_err(|e| cfg_err("/", e.to_string()))?;
    let spacetime = match raw.spacetime {
        SpacetimeJson::Preset(name) => {
            let preset = Preset::from_str(&name)?;
            let (default_par, dim) = preset_defaults(preset, raw.d, raw.dim);
            let (key, given) = match preset {
                Preset::KappaMinkowski => ("kappa", raw.kappa),
                Preset::MoyalExtended => ("theta", raw.theta),
                Preset::RhoMinkowski => ("rho", raw.rho),
                Preset::Su2Lambda => ("lambda", raw.lambda),
            };
            for (k, v) in [("kappa", raw.kappa), ("theta", raw.theta), ("rho", raw.rho), ("lambda", raw.lambda)] {
                if k != key && v.is_some() {
                    return Err(cfg_err(&format!("/{k}"), format!("parameter not used by {}", preset.name())));
                }
            }
            let parameter = given.unwrap_or(default_par);
            GroupDescriptor::from_preset(preset, &[parameter], dim).map_err(|e| match e {
                Error::BadDimension { .. } => cfg_err(if raw.dim.is_some() { "/dim" } else { "/d" }, e.to_string()),
                other => cfg_err(&format!("/{key}"), other.to_string()),
            })?;
            Spacetime::Preset { preset, parameter, dim }
        }
        SpacetimeJson::Inline(v) => {
            StructureConstants::from_json(&v).map_err(|e| match e {
                Error::Config { path, msg } => cfg_err(&format!("/spacetime{}", if path == "/" { "" } else { &path }), msg),
                other => cfg_err("/spacetime", other.to_string()),
            })?;
            Spacetime::Inline {
                structure: v,
                bch_order: raw.bch_order.unwrap_or(DEFAULT_BCH_ORDER),
            }
        }
    };
    let mut tolerances = Tolerances::default();
    for (k, v) in &raw.tolerances {
        tolerances.set(k, *v)?;
    }
    let out = raw.output.unwrap_or_default();
    let cfg = RunConfig {
        spacetime,
        seed: raw.seed.unwrap_or(0),
        jobs: raw.jobs,
        samples: raw.samples.unwrap_or(10_000),
        grid: raw.grid.unwrap_or(256),
        states: raw.states.unwrap_or(200),
        twist_order: raw.twist_order.unwrap_or(4),
        truncation: raw.truncation.unwrap_or(32),
        output_path: out.path,
        format: out.format.unwrap_or_default(),
        tolerances,
    };
    if cfg.jobs == Some(0) {
        return Err(cfg_err("/jobs", "must be at least 1"));
    }
    if cfg.samples == 0 {
        return Err(cfg_err("/samples", "must be at least 1"));
    }
    Ok(cfg)
}
