//! TOML model configuration.
//!
//! ```toml
//! bulk = "rational:n=2,c=1"     # identity:n=<d> | permutation:n=<d> | rational:n=<d>,c=<c>
//! defect = "delta:eta=1"        # delta:eta=<η> | pure-transmission | pure-reflection | custom
//! doubled = true                # block-doubled bulk and (τ, ρ) instead of calS/calRT
//! cal_s_order = "uncrossed"     # uncrossed | printed (embedding route only)
//! samples = 50
//! exclusion_radius = 1e-3
//! seed = 7
//! tolerance = 1e-9
//! checks = ["ybe", "TST"]       # omitted: every check applicable to the model
//!
//! [custom_defect]               # only with defect = "custom"
//! dim = 1
//! transmission = [["k/(k+1i)"]]
//! reflection = [["-1i/(k+1i)"]]
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use rtcheck_core::defect::{delta_defect, pure_reflection, pure_transmission, DefectPair};
use rtcheck_core::doubling::{CalSOrder, DoubledModel};
use rtcheck_core::smatrix::{identity_s, permutation_s, rational_s, BulkSMatrix, DEFAULT_EXCLUSION_RADIUS};
use rtcheck_core::tensor::AuxMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{Expr, ParseError};
use crate::suite::CheckId;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_SAMPLES: usize = 50;
pub const TOLERANCE_ENV: &str = "RTCHECK_TOLERANCE";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid TOML: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("unknown {kind} {name:?}")]
    UnknownName { kind: &'static str, name: String },
    #[error("{0}")]
    Invalid(String),
    #[error("custom defect entry {entry}: {source}")]
    Expression { entry: String, source: ParseError },
    #[error(transparent)]
    Model(#[from] rtcheck_core::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CalSOrderConfig {
    Uncrossed,
    Printed,
}

impl From<CalSOrderConfig> for CalSOrder {
    fn from(c: CalSOrderConfig) -> Self {
        match c {
            CalSOrderConfig::Uncrossed => CalSOrder::Uncrossed,
            CalSOrderConfig::Printed => CalSOrder::Printed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomDefect {
    pub dim: usize,
    pub transmission: Vec<Vec<String>>,
    pub reflection: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    bulk: String,
    defect: String,
    #[serde(default)]
    doubled: bool,
    cal_s_order: Option<CalSOrderConfig>,
    samples: Option<usize>,
    exclusion_radius: Option<f64>,
    seed: Option<u64>,
    tolerance: Option<f64>,
    checks: Option<Vec<String>>,
    custom_defect: Option<CustomDefect>,
}

/// Validated configuration with every default filled in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub bulk: String,
    pub defect: String,
    pub doubled: bool,
    pub cal_s_order: CalSOrderConfig,
    pub samples: usize,
    pub exclusion_radius: f64,
    pub seed: u64,
    pub tolerance: f64,
    /// `None` selects every applicable check.
    pub checks: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub custom_defect: Option<CustomDefect>,
}

/// Parses with the default tolerance taken from `RTCHECK_TOLERANCE` when set.
pub fn parse_config(text: &str) -> Result<ModelConfig, ConfigError> {
    let default = match std::env::var(TOLERANCE_ENV) {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .map_err(|_| ConfigError::Invalid(format!("{TOLERANCE_ENV}={v:?} is not a number")))?,
        Err(_) => DEFAULT_TOLERANCE,
    };
    parse_config_with_default_tolerance(text, default)
}

pub fn parse_config_with_default_tolerance(text: &str, default_tolerance: f64) -> Result<ModelConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text)?;
    let cfg = ModelConfig {
        bulk: raw.bulk,
        defect: raw.defect,
        doubled: raw.doubled,
        cal_s_order: raw.cal_s_order.unwrap_or(CalSOrderConfig::Uncrossed),
        samples: raw.samples.unwrap_or(DEFAULT_SAMPLES),
        exclusion_radius: raw.exclusion_radius.unwrap_or(DEFAULT_EXCLUSION_RADIUS),
        seed: raw.seed.unwrap_or(0),
        tolerance: raw.tolerance.unwrap_or(default_tolerance),
        checks: raw.checks,
        custom_defect: raw.custom_defect,
    };
    cfg.validate()?;
    Ok(cfg)
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(ConfigError::Invalid(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.samples == 0 {
            return Err(ConfigError::Invalid("samples must be at least 1".into()));
        }
        if !(self.exclusion_radius > 0.0 && self.exclusion_radius.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "exclusion_radius must be positive, got {}",
                self.exclusion_radius
            )));
        }
        if self.doubled && self.cal_s_order == CalSOrderConfig::Printed {
            return Err(ConfigError::Invalid(
                "cal_s_order applies only to the embedding route (doubled = false)".into(),
            ));
        }
        match (self.defect.as_str(), &self.custom_defect) {
            ("custom", None) => {
                return Err(ConfigError::Invalid("defect = \"custom\" needs a [custom_defect] table".into()))
            }
            (d, Some(_)) if d != "custom" => {
                return Err(ConfigError::Invalid("[custom_defect] is only allowed with defect = \"custom\"".into()))
            }
            _ => {}
        }
        if let Some(checks) = &self.checks {
            for c in checks {
                CheckId::parse(c)?;
            }
        }
        self.build()?;
        Ok(())
    }

    /// Requested checks, or every check applicable to this model.
    pub fn check_ids(&self) -> Result<Vec<CheckId>, ConfigError> {
        match &self.checks {
            Some(list) => list.iter().map(|c| CheckId::parse(c)).collect(),
            None => Ok(CheckId::defaults(self.doubled, self.bulk_is_identity()?)),
        }
    }

    fn bulk_is_identity(&self) -> Result<bool, ConfigError> {
        Ok(parse_spec(&self.bulk)?.0 == "identity")
    }

    pub fn bulk_s(&self) -> Result<BulkSMatrix, ConfigError> {
        let (name, params) = parse_spec(&self.bulk)?;
        let mut params = Params::new("bulk", &name, params);
        let s = match name.as_str() {
            "identity" => identity_s(params.dim("n")?),
            "permutation" => permutation_s(params.dim("n")?),
            "rational" => {
                let n = params.dim("n")?;
                let c = params.real("c")?.unwrap_or(1.0);
                rational_s(n, c)?
            }
            _ => return Err(ConfigError::UnknownName { kind: "bulk S-matrix", name }),
        };
        params.finish()?;
        Ok(s)
    }

    /// The defect in the bulk dimension `n`: `(R, T)` or `(ρ, τ)` depending on the route.
    pub fn defect_pair(&self, n: usize) -> Result<DefectPair, ConfigError> {
        let (name, params) = parse_spec(&self.defect)?;
        let mut params = Params::new("defect", &name, params);
        let d = match name.as_str() {
            "delta" => {
                let eta = params.real("eta")?.ok_or_else(|| ConfigError::Invalid("delta needs eta=<value>".into()))?;
                delta_defect(eta)?.lift_scalar(n)?
            }
            "pure-transmission" => pure_transmission(n),
            "pure-reflection" => pure_reflection(n),
            "custom" => custom_defect(self.custom_defect.as_ref().expect("checked in validate"), n)?,
            _ => return Err(ConfigError::UnknownName { kind: "defect", name }),
        };
        params.finish()?;
        Ok(d)
    }

    /// Assembles the doubled model.
    pub fn build(&self) -> Result<DoubledModel, ConfigError> {
        let s = self.bulk_s()?;
        let d = self.defect_pair(s.leg_dim())?;
        Ok(if self.doubled {
            DoubledModel::from_impurity(&s, &d, false)?
        } else {
            DoubledModel::from_embedding(&s, &d, self.cal_s_order.into())?
        })
    }
}

fn custom_defect(c: &CustomDefect, n: usize) -> Result<DefectPair, ConfigError> {
    if c.dim != n {
        return Err(ConfigError::Invalid(format!("custom defect has dim {} but the bulk has dim {n}", c.dim)));
    }
    let parse = |label: &str, rows: &[Vec<String>]| -> Result<Arc<Vec<Expr>>, ConfigError> {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(ConfigError::Invalid(format!("custom {label} must be a {n}x{n} array of strings")));
        }
        let mut out = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            for (j, text) in row.iter().enumerate() {
                let e = Expr::parse(text)
                    .map_err(|source| ConfigError::Expression { entry: format!("{label}[{i}][{j}]"), source })?;
                out.push(e);
            }
        }
        Ok(Arc::new(out))
    };
    let t = parse("transmission", &c.transmission)?;
    let r = parse("reflection", &c.reflection)?;
    let matrix = move |cells: &Arc<Vec<Expr>>, k: f64| AuxMatrix::from_fn(n, |i, j| cells[i * n + j].eval(k));
    let (rr, tt) = (r.clone(), t.clone());
    Ok(DefectPair::new("custom", n, move |k| matrix(&rr, k), move |k| matrix(&tt, k)))
}

/// Splits `name:key=value,key=value`.
fn parse_spec(spec: &str) -> Result<(String, BTreeMap<String, String>), ConfigError> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n.trim(), r.trim()),
        None => (spec.trim(), ""),
    };
    let mut params = BTreeMap::new();
    if !rest.is_empty() {
        for item in rest.split(',') {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| ConfigError::Invalid(format!("parameter {item:?} in {spec:?} is not key=value")))?;
            if params.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(ConfigError::Invalid(format!("parameter {k:?} repeated in {spec:?}")));
            }
        }
    }
    Ok((name.to_string(), params))
}

struct Params {
    kind: &'static str,
    name: String,
    values: BTreeMap<String, String>,
}

impl Params {
    fn new(kind: &'static str, name: &str, values: BTreeMap<String, String>) -> Self {
        Self { kind, name: name.to_string(), values }
    }

    fn real(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.values.remove(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| ConfigError::Invalid(format!("{} {}: {key}={v:?} is not a number", self.kind, self.name))),
        }
    }

    /// Positive integer, default 1.
    fn dim(&mut self, key: &str) -> Result<usize, ConfigError> {
        match self.values.remove(key) {
            None => Ok(1),
            Some(v) => match v.parse::<usize>() {
                Ok(d) if d >= 1 => Ok(d),
                _ => Err(ConfigError::Invalid(format!(
                    "{} {}: {key}={v:?} is not a positive integer",
                    self.kind, self.name
                ))),
            },
        }
    }

    fn finish(self) -> Result<(), ConfigError> {
        match self.values.into_keys().next() {
            Some(k) => Err(ConfigError::Invalid(format!("{} {}: unknown parameter {k:?}", self.kind, self.name))),
            None => Ok(()),
        }
    }
}
