//! Resolution of flags and spec files into a fully determined run.

use std::path::{Path, PathBuf};

use clap::Args;
use mrhinf::design::first_order_lag;
use mrhinf::io::{ModelRepr, SpecFile};
use mrhinf::{BaseSpec, DecimationPattern, DesignSpec, SynthesisOptions};
use serde::Serialize;

use crate::CliError;

pub const DEFAULT_H: f64 = 1.0;
pub const DEFAULT_N: usize = 4;
pub const DEFAULT_TIME_CONSTANT: f64 = 10.0;
pub const DEFAULT_GRID: usize = 512;
pub const WORKERS_ENV: &str = "MRHINF_WORKERS";

/// Problem flags. Each one overrides the matching field of `--spec`.
#[derive(Debug, Clone, Default, Args)]
pub struct SpecArgs {
    /// JSON design specification
    #[arg(long, value_name = "PATH")]
    pub spec: Option<PathBuf>,
    /// Decimation pattern as a 0/1 string, e.g. 110
    #[arg(long)]
    pub pattern: Option<DecimationPattern>,
    /// Fast-discretization ratio [default: 4]
    #[arg(long)]
    pub n: Option<usize>,
    /// Reconstruction delay in samples [default: pattern length]
    #[arg(long)]
    pub m: Option<usize>,
    /// Sampling period in seconds [default: 1]
    #[arg(long)]
    pub h: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Relative width of the final gamma bracket
    #[arg(long, default_value_t = 1e-4)]
    pub gamma_tol: f64,
    /// Relative tolerance of H-infinity norm evaluations
    #[arg(long, default_value_t = mrhinf::ltisys::DEFAULT_NORM_TOL)]
    pub norm_tol: f64,
}

impl SolverArgs {
    pub fn options(&self) -> Result<SynthesisOptions, CliError> {
        if !(self.gamma_tol > 0.0 && self.norm_tol > 0.0) {
            return Err(CliError::Invalid("tolerances must be positive".into()));
        }
        Ok(SynthesisOptions { gamma_tol: self.gamma_tol, norm_tol: self.norm_tol, ..SynthesisOptions::default() })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptionsEcho {
    pub gamma_tol: f64,
    pub noise: f64,
    pub norm_tol: f64,
}

impl From<&SynthesisOptions> for OptionsEcho {
    fn from(o: &SynthesisOptions) -> Self {
        Self { gamma_tol: o.gamma_tol, noise: o.noise, norm_tol: o.norm_tol }
    }
}

/// Everything a run depended on; embedded in every JSON artifact.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<SpecFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub options: Option<OptionsEcho>,
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub params: serde_json::Map<String, serde_json::Value>,
}

impl RunConfig {
    pub fn new(command: &'static str) -> Self {
        Self { command, spec: None, options: None, params: serde_json::Map::new() }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_owned(), serde_json::to_value(value).expect("plain data"));
        self
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

impl SpecArgs {
    /// Spec file contents with the flags applied on top.
    pub fn merged(&self) -> Result<SpecFile, CliError> {
        let mut file: SpecFile = match &self.spec {
            Some(path) => read_json(path)?,
            None => SpecFile::default(),
        };
        if let Some(p) = &self.pattern {
            file.pattern = Some(p.clone());
        }
        file.h = self.h.or(file.h);
        file.m = self.m.or(file.m);
        file.n = self.n.or(file.n);
        Ok(file)
    }

    /// Complete design specification, with defaults for everything but the pattern.
    pub fn design_spec(&self) -> Result<DesignSpec, CliError> {
        let file = complete(self.merged()?)?;
        Ok(file.to_spec()?)
    }

    /// Pattern-free part of the specification for searches.
    pub fn base_spec(&self) -> Result<(BaseSpec, SpecFile), CliError> {
        let mut file = self.merged()?;
        file.pattern = None;
        file.h = Some(file.h.unwrap_or(DEFAULT_H));
        file.n = Some(file.n.unwrap_or(DEFAULT_N));
        let f = match &file.f {
            Some(model) => model.to_model()?,
            None => first_order_lag(DEFAULT_TIME_CONSTANT),
        };
        file.f = Some(ModelRepr::from_model(&f));
        let base = BaseSpec { h: file.h.unwrap(), m: file.m, n: file.n.unwrap(), f };
        Ok((base, file))
    }
}

/// Fills defaults into a spec file; the pattern stays mandatory.
pub fn complete(mut file: SpecFile) -> Result<SpecFile, CliError> {
    let pattern = file
        .pattern
        .clone()
        .ok_or_else(|| CliError::Invalid("no decimation pattern given (use --pattern or a spec file)".into()))?;
    file.h = Some(file.h.unwrap_or(DEFAULT_H));
    file.n = Some(file.n.unwrap_or(DEFAULT_N));
    file.m = Some(file.m.unwrap_or(pattern.len()));
    if file.f.is_none() {
        file.f = Some(ModelRepr::from_model(&first_order_lag(DEFAULT_TIME_CONSTANT)));
    }
    Ok(file)
}

/// Worker count: `MRHINF_WORKERS` wins over `--workers`.
pub fn resolve_workers(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&w| w > 0)
            .map(Some)
            .ok_or_else(|| CliError::Invalid(format!("{WORKERS_ENV}={v:?} is not a positive integer"))),
        _ => Ok(flag),
    }
}
