//! Experiment harness around `kp5-core`: run configurations, CSV output,
//! manifests, and the `kp5lab` command line.

pub mod config;
pub mod error;
pub mod experiments;
pub mod manifest;
pub mod output;

pub use config::{run_manifest, RunConfig};
pub use error::{LabError, LabResult};
pub use experiments::{
    ansatz_dump, ansatz_vs_flow, compare, evolve_run, galilean_run, lowfreq_run, pell_run, residual_run,
    resonance_run, thm1_experiment, RunSpec, Thm1Options,
};
pub use manifest::ExperimentManifest;
pub use output::{Csv, OutputDir};
