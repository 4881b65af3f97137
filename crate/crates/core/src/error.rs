//! Error types shared across the simulator.

use thiserror::Error;

/// Configuration and input validation failures. Messages name the offending
/// field so CLI users can fix the document directly.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config field `{field}`: {reason}")]
    InvalidField { field: String, reason: String },

    #[error("topology is disconnected: chiplet {from} cannot reach chiplet {to}")]
    Disconnected { from: u32, to: u32 },

    #[error("chiplet {a} and chiplet {b} have overlapping footprints")]
    OverlappingFootprints { a: u32, b: u32 },

    #[error("routing has cyclic channel dependencies (deadlock risk) involving link {src}->{dst}")]
    CyclicChannelDependency { src: u32, dst: u32 },

    #[error("no compute backend registered for chiplet type_tag `{0}`")]
    UnknownTypeTag(String),

    #[error("unknown mapping strategy `{0}`")]
    UnknownStrategy(String),

    #[error("workload: {0}")]
    Workload(String),

    #[error("failed to parse config document: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl ConfigError {
    pub fn field(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::InvalidField {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// Runtime simulation failures. Most simulation paths are total once the
/// configuration validates; these signal contract violations between modules.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),

    #[error("scheduling error: {0}")]
    Scheduling(String),

    #[error("flow {flow} has src == dst ({chiplet}); local traffic must be filtered before injection")]
    LocalFlow { flow: u64, chiplet: u32 },

    #[error("internal consistency error: {0}")]
    Internal(String),
}
