//! JSON run configurations.
//!
//! ```json
//! { "experiment": "thm1", "n": 2, "sigma": 2.0, "t_end": 1.0 }
//! ```
//!
//! Recognized experiments: `thm1`, `ansatz_vs_flow`, `compare`, `evolve`,
//! `residual`, `lowfreq`, `galilean`. Omitted fields take the defaults of
//! [`RunConfig`]; a missing `grid` is sized by the sizing rule and the
//! choice is recorded in the manifest.

use std::path::{Path, PathBuf};

use kp5_core::ansatz::Remainder;
use kp5_core::spectral::TorusGrid;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};
use crate::experiments::{self, RunSpec, Thm1Options};
use crate::manifest::ExperimentManifest;
use crate::output::OutputDir;

fn default_sigma() -> f64 {
    2.0
}
fn default_theta() -> f64 {
    1.0
}
fn default_t_end() -> f64 {
    1.0
}
fn default_sample() -> f64 {
    0.01
}
fn default_fallback() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: String,
    #[serde(default)]
    pub n: Option<u64>,
    /// For `compare` (admissible n) and `galilean` (any n).
    #[serde(default)]
    pub ns: Option<Vec<u64>>,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default)]
    pub grid: Option<[usize; 2]>,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_sample")]
    pub sample: f64,
    /// Residual evaluation times.
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    #[serde(default)]
    pub remainder: Option<String>,
    #[serde(default)]
    pub snapshot_every: Option<usize>,
    #[serde(default)]
    pub conserve_check: bool,
    #[serde(default)]
    pub budget_seconds: Option<f64>,
    #[serde(default = "default_fallback")]
    pub fallback_t_end: f64,
    /// Output directory, relative to the configuration file.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

pub fn parse_remainder(name: &str) -> LabResult<Remainder> {
    match name {
        "corrected" => Ok(Remainder::Corrected),
        "literal" => Ok(Remainder::Literal),
        "omitted" => Ok(Remainder::Omitted),
        other => Err(LabError::Param(format!(
            "unknown remainder `{other}` (expected corrected, literal or omitted)"
        ))),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> LabResult<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn spec(&self, threads: usize) -> LabResult<RunSpec> {
        let n = self
            .n
            .ok_or_else(|| LabError::Param(format!("experiment `{}` needs `n`", self.experiment)))?;
        let mut spec = RunSpec::new(n)?;
        spec.sigma = self.sigma;
        spec.theta = self.theta;
        spec.grid = self.grid.map(|[nx, ny]| TorusGrid::new(nx, ny)).transpose()?;
        spec.dt = self.dt;
        spec.t_end = self.t_end;
        spec.sample = self.sample;
        spec.threads = threads;
        spec.conserve_check = self.conserve_check;
        Ok(spec)
    }

    /// Runs the experiment into `out` and saves `<experiment>_manifest.json`
    /// beside its outputs.
    pub fn run(&self, out: &mut OutputDir, threads: usize) -> LabResult<ExperimentManifest> {
        let manifest = match self.experiment.as_str() {
            "thm1" => {
                let opts = Thm1Options {
                    budget_seconds: self.budget_seconds,
                    fallback_t_end: self.fallback_t_end,
                };
                experiments::thm1_experiment(&self.spec(threads)?, &opts, out)?
            }
            "ansatz_vs_flow" => experiments::ansatz_vs_flow(&self.spec(threads)?, out)?,
            "compare" => {
                let ns = self.ns.clone().unwrap_or_else(|| vec![2, 18]);
                let first = *ns.first().ok_or_else(|| LabError::Param("`ns` is empty".into()))?;
                let template = RunConfig { n: Some(first), ..self.clone() }.spec(threads)?;
                experiments::compare(&template, &ns, out)?
            }
            "evolve" => experiments::evolve_run(&self.spec(threads)?, self.snapshot_every, out)?,
            "residual" => {
                let times = self.times.clone().unwrap_or_else(|| vec![0.25, 0.5, 0.75]);
                let remainder = parse_remainder(self.remainder.as_deref().unwrap_or("corrected"))?;
                experiments::residual_run(&self.spec(threads)?, &times, remainder, out)?
            }
            "lowfreq" => experiments::lowfreq_run(&self.spec(threads)?, out)?,
            "galilean" => {
                let ns: Vec<usize> = self.ns.clone().unwrap_or_else(|| vec![16, 64, 256]).iter().map(|&n| n as usize).collect();
                experiments::galilean_run(self.sigma, &ns, self.t_end, out)?
            }
            other => {
                return Err(LabError::Param(format!(
                    "unknown experiment `{other}` (expected thm1, ansatz_vs_flow, compare, evolve, residual, lowfreq or galilean)"
                )))
            }
        };
        manifest.save(out, &format!("{}_manifest.json", self.experiment))?;
        Ok(manifest)
    }
}

/// Reads a configuration file and runs it. Outputs go to `out_override`,
/// else to the configured `out` (relative to the file), else beside the
/// file. On failure every file written so far is removed.
pub fn run_manifest(config_file: &Path, out_override: Option<&Path>, threads: usize) -> LabResult<ExperimentManifest> {
    let text = std::fs::read_to_string(config_file).map_err(|e| LabError::io(config_file, e))?;
    let cfg = RunConfig::from_json(&text)?;
    let base = config_file.parent().unwrap_or(Path::new("."));
    let dir = match (out_override, &cfg.out) {
        (Some(d), _) => d.to_path_buf(),
        (None, Some(d)) => base.join(d),
        (None, None) => base.to_path_buf(),
    };
    let mut out = OutputDir::new(dir)?;
    let result = cfg.run(&mut out, threads);
    if result.is_err() {
        out.discard();
    }
    result
}
