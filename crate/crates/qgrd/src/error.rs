use thiserror::Error;

use crate::label::Label;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown instance descriptor: {0}")]
    UnknownDescriptor(String),

    #[error("parameter `{name}` out of range: {reason}")]
    ParameterOutOfRange { name: &'static str, reason: String },

    #[error("label {0} is not an irreducible corepresentation of this instance")]
    UnknownLabel(Label),

    #[error("instance `{instance}` lacks the {capability} capability")]
    CapabilityAbsent {
        instance: String,
        capability: &'static str,
    },

    #[error("intertwiner rank mismatch for {alpha} (x) {beta} -> {gamma}: fusion says {expected}, found {found}")]
    RankMismatch {
        alpha: Label,
        beta: Label,
        gamma: Label,
        expected: usize,
        found: usize,
    },

    #[error("generating set does not generate within radius {radius}: {reason}")]
    NotGenerating { radius: usize, reason: String },

    #[error("length function undefined at {0}")]
    LengthUndefined(Label),

    #[error("length function validated up to {validated}, but {requested} was requested")]
    NotValidated { requested: f64, validated: f64 },

    #[error("block {label} has shape {found}x{found}, expected {expected}x{expected}")]
    ShapeMismatch {
        label: Label,
        expected: usize,
        found: usize,
    },

    #[error("support reaches length {support}, which does not fit truncation {truncation}")]
    SupportTooLarge { support: f64, truncation: usize },

    #[error("dimension of {0} overflows the supported range")]
    DimensionOverflow(Label),

    #[error("state unavailable: {0}")]
    StateUnavailable(String),

    #[error("degenerate growth table: {0}")]
    DegenerateTable(String),

    #[error("missing rapid decay constants: {0}")]
    MissingRdConstants(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
