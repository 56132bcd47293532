//! Timeline document: a header echoing the run, then the scenes.

use molecumentary_core::synthesis::{SynthesisConfig, Timeline};
use serde::{Deserialize, Serialize};

use crate::DocError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    SelfGuided,
    FromText,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelineDocument {
    pub mode: Mode,
    pub seed: u64,
    pub config: SynthesisConfig,
    pub total_duration: f64,
    pub scene_count: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub scenes: Timeline,
}

impl TimelineDocument {
    pub fn new(mode: Mode, config: SynthesisConfig, timeline: Timeline, warnings: Vec<String>) -> Self {
        TimelineDocument {
            mode,
            seed: config.seed,
            total_duration: timeline.total_duration(),
            scene_count: timeline.len(),
            config,
            warnings,
            scenes: timeline,
        }
    }

    /// Compact JSON with a trailing newline. Keyframes make pretty output
    /// very long.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string(self).expect("timeline serializes");
        out.push('\n');
        out
    }

    pub fn to_json_pretty(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("timeline serializes");
        out.push('\n');
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, DocError> {
        Ok(serde_json::from_slice(bytes)?)
    }
}
