use serde_json::{json, Value};
use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Core(#[from] weylcurv::Error),
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Self::Io { path: path.as_ref().display().to_string(), source }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Self::Invalid(msg.into())
    }

    /// 1 for I/O failures, 2 for everything the input is to blame for.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io { .. } => 1,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        use weylcurv::Error as E;
        match self {
            Self::Io { .. } => "Io",
            Self::Parse { .. } => "Parse",
            Self::Invalid(_) => "InvalidInput",
            Self::Core(e) => match e {
                E::DimensionMismatch { .. } => "DimensionMismatch",
                E::DimensionTooSmall { .. } => "DimensionTooSmall",
                E::NotAntisymmetric { .. } => "NotAntisymmetric",
                E::JacobiViolation { .. } => "JacobiViolation",
                E::NotPositiveDefinite { .. } => "NotPositiveDefinite",
                E::NotSymmetric { .. } => "NotSymmetric",
                E::NonOrthonormalPlane { .. } => "NonOrthonormalPlane",
                E::ZeroVector(_) => "ZeroVector",
                E::Precondition(_) => "Precondition",
                E::HypothesisViolated(_) => "HypothesisViolated",
                E::InvalidGrid(_) => "InvalidGrid",
                E::InvalidSplitting(_) => "InvalidSplitting",
                E::Divergence(_) => "Divergence",
                E::NonFinite { .. } => "NonFinite",
                E::ModelMismatch(_) => "ModelMismatch",
                E::InvalidParameter(_) => "InvalidParameter",
            },
        }
    }

    pub fn to_json(&self) -> Value {
        let mut obj = json!({
            "kind": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        });
        if let Self::Parse { line, column, .. } = self {
            obj["line"] = json!(line);
            obj["column"] = json!(column);
        }
        obj
    }
}
