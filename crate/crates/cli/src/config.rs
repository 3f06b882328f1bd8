use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::registry;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub horizon: Option<f64>,
    pub n_steps: Option<usize>,
}

/// Everything a run can be configured with. Unset fields fall back to the
/// experiment's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    pub grid: GridConfig,
    pub n_paths: Option<usize>,
    pub master_seed: Option<u64>,
    pub theta: Option<f64>,
    pub order: Option<usize>,
    pub sde: Option<String>,
    pub sigma: Option<f64>,
    pub b: Option<f64>,
    pub x0: Option<f64>,
    pub h_norm_sq: Option<f64>,
    pub inner_paths: Option<usize>,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_owned(),
            source,
        })
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overridden_by(mut self, other: ExperimentConfig) -> Self {
        macro_rules! take {
            ($($field:ident).+) => {
                if other.$($field).+.is_some() {
                    self.$($field).+ = other.$($field).+;
                }
            };
        }
        take!(experiment);
        take!(grid.horizon);
        take!(grid.n_steps);
        take!(n_paths);
        take!(master_seed);
        take!(theta);
        take!(order);
        take!(sde);
        take!(sigma);
        take!(b);
        take!(x0);
        take!(h_norm_sq);
        take!(inner_paths);
        take!(output);
        self
    }

    /// Fills defaults from the registry and validates every value.
    pub fn resolve(&self) -> Result<Params, ConfigError> {
        let name = self
            .experiment
            .as_deref()
            .ok_or_else(|| ConfigError::Invalid("no experiment named".into()))?;
        let info = registry::find(name).ok_or_else(|| ConfigError::Invalid(format!("unknown experiment '{name}'")))?;
        let d = info.defaults();
        let p = Params {
            experiment: info.name.to_string(),
            horizon: self.grid.horizon.unwrap_or(d.horizon),
            grid_steps: self.grid.n_steps.unwrap_or(d.grid_steps),
            n_paths: self.n_paths.unwrap_or(d.n_paths),
            master_seed: self.master_seed.unwrap_or(d.master_seed),
            theta: self.theta.unwrap_or(d.theta),
            order: self.order.or(d.order),
            sde: self.sde.clone().or(d.sde),
            sigma: self.sigma.unwrap_or(d.sigma),
            b: self.b.unwrap_or(d.b),
            x0: self.x0.unwrap_or(d.x0),
            h_norm_sq: self.h_norm_sq.or(d.h_norm_sq),
            inner_paths: self.inner_paths.unwrap_or(d.inner_paths),
        };
        p.validate()?;
        Ok(p)
    }
}

/// Fully resolved parameters, recorded verbatim in the JSON summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub experiment: String,
    pub horizon: f64,
    pub grid_steps: usize,
    pub n_paths: usize,
    pub master_seed: u64,
    pub theta: f64,
    pub order: Option<usize>,
    pub sde: Option<String>,
    pub sigma: f64,
    pub b: f64,
    pub x0: f64,
    pub h_norm_sq: Option<f64>,
    pub inner_paths: usize,
}

impl Params {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |what: &str| Err(ConfigError::Invalid(what.to_string()));
        if !(self.horizon.is_finite() && self.horizon >= 1.0) {
            return bad("horizon must be at least 1 (functionals live on [0, 1])");
        }
        if self.grid_steps == 0 {
            return bad("grid steps must be positive");
        }
        if self.n_paths < 2 {
            return bad("n-paths must be at least 2");
        }
        if self.inner_paths < 2 {
            return bad("inner-paths must be at least 2");
        }
        if !(self.theta.is_finite() && self.theta > 0.0) {
            return bad("theta must be positive");
        }
        if !(self.sigma.is_finite() && self.b.is_finite() && self.x0.is_finite()) {
            return bad("sigma, b and x0 must be finite");
        }
        if let Some(n) = self.order {
            if n == 0 || n > lentparticle::chaos::DEFAULT_MAX_ORDER {
                return Err(ConfigError::Invalid(format!(
                    "order must be between 1 and {}",
                    lentparticle::chaos::DEFAULT_MAX_ORDER
                )));
            }
        }
        if let Some(h) = self.h_norm_sq {
            if !(h.is_finite() && h >= 0.0) {
                return bad("h-norm-sq must be non-negative");
            }
        }
        if let Some(name) = &self.sde {
            if !lentparticle::lent::SdeSpec::REGISTRY.contains(&name.as_str()) {
                return Err(ConfigError::Invalid(format!(
                    "unknown SDE '{name}', expected one of {:?}",
                    lentparticle::lent::SdeSpec::REGISTRY
                )));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> lentparticle::TimeGrid {
        lentparticle::TimeGrid::new(self.horizon, self.grid_steps).expect("validated grid")
    }

    pub fn sde_params(&self) -> lentparticle::lent::SdeParams {
        lentparticle::lent::SdeParams {
            x0: self.x0,
            sigma: self.sigma,
            b: self.b,
        }
    }
}
