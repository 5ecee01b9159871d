use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid scenario field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("failed to parse scenario: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("failed to read scenario file: {0}")]
    Io(#[from] std::io::Error),
}

impl ConfigError {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EnvError {
    #[error("action has {got} components, expected {expected}")]
    ActionLength { expected: usize, got: usize },
    #[error("action component (product {product}, node {node}) = {value} outside [0, {upper}]")]
    ActionOutOfBounds {
        product: usize,
        node: usize,
        value: i64,
        upper: i64,
    },
    #[error("step called on a finished episode (t = {t})")]
    EpisodeDone { t: usize },
}
