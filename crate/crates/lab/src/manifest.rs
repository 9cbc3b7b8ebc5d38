use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{LabError, LabResult};
use crate::output::OutputDir;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// What an experiment ran with and what it produced.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub experiment_name: String,
    pub parameters: BTreeMap<String, Value>,
    pub artifact_version: String,
    pub outputs: Vec<String>,
    pub summary_metrics: BTreeMap<String, f64>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl ExperimentManifest {
    pub fn new(name: &str) -> Self {
        ExperimentManifest {
            experiment_name: name.to_string(),
            artifact_version: ARTIFACT_VERSION.to_string(),
            ..Default::default()
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    /// Records a metric; non-finite values are kept out of the JSON and
    /// mentioned in the notes instead.
    pub fn metric(&mut self, key: &str, value: f64) -> &mut Self {
        if value.is_finite() {
            self.summary_metrics.insert(key.to_string(), value);
        } else {
            self.notes.push(format!("metric {key} is not finite ({value})"));
        }
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn output(&mut self, path: &Path) -> &mut Self {
        self.outputs.push(path.display().to_string());
        self
    }

    pub fn metric_value(&self, key: &str) -> Option<f64> {
        self.summary_metrics.get(key).copied()
    }

    /// Merges another manifest's metrics under `prefix`.
    pub fn absorb(&mut self, prefix: &str, other: &ExperimentManifest) {
        for (k, v) in &other.summary_metrics {
            self.summary_metrics.insert(format!("{prefix}{k}"), *v);
        }
        self.outputs.extend(other.outputs.iter().cloned());
        self.notes.extend(other.notes.iter().cloned());
    }

    pub fn to_json(&self) -> LabResult<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Writes `<name>` into `out` (not listed among the outputs).
    pub fn save(&self, out: &mut OutputDir, name: &str) -> LabResult<()> {
        out.write(name, self.to_json()?.as_bytes()).map(|_| ())
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}
