use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sarhue::CoderConfig;
use serde::{Deserialize, Serialize};

/// A saved invocation that can be replayed to regenerate its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    #[serde(flatten)]
    pub run: Run,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Run {
    Encode(EncodeRun),
    Synth(SynthRun),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodeRun {
    pub input: PathBuf,
    pub output: PathBuf,
    pub config: CoderConfig,
    /// Oversampling factor overriding the container's value.
    pub oversample: Option<f64>,
    pub report: Option<PathBuf>,
    pub subbands_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthRun {
    pub scene: PathBuf,
    pub output: PathBuf,
    pub seed: u64,
}

impl RunManifest {
    pub fn new(run: Run) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            run,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing manifest {}", path.display()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading manifest {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
    }
}

/// Manifests store absolute paths so a replay does not depend on the working directory.
pub fn absolute(path: &Path) -> Result<PathBuf> {
    std::path::absolute(path).with_context(|| format!("resolving {}", path.display()))
}
