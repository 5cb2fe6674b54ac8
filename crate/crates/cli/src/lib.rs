//! Experiment harness behind the `rswlab` binary: flat-text manifests,
//! presets, deterministic runs and CSV result tables.

pub mod config;
pub mod manifest;
pub mod run;
pub mod table;

pub use config::Config;
pub use manifest::{preset, Calibration, EstimatorChoice, Experiment, ExperimentManifest, TestShape, PRESETS, VERSION};
pub use run::{resolve_manifest, run_manifest, write_outputs, Overrides};
pub use table::ResultTable;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    /// Bad manifest, preset or override; nothing was computed.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Runtime(_) => 3,
        }
    }

    pub(crate) fn runtime(e: impl std::fmt::Display) -> Self {
        HarnessError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Runtime(e.to_string())
    }
}
