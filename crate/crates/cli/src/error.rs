use std::fmt;
use std::path::Path;

/// Failure of a run, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or configuration (exit 2).
    Config(String),
    /// The numerics failed (exit 3).
    Numerical(friedrichs::Error),
    /// Reading or writing files (exit 1).
    Io(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self::Io(format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io(_) => 1,
        }
    }

    /// Diagnostic written next to the outputs on numerical failure.
    pub fn diagnostic(&self) -> serde_json::Value {
        match self {
            Self::Numerical(e) => serde_json::json!({
                "kind": "numerical",
                "error": format!("{e:?}"),
                "message": e.to_string(),
            }),
            Self::Config(m) => serde_json::json!({ "kind": "config", "message": m }),
            Self::Io(m) => serde_json::json!({ "kind": "io", "message": m }),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(m) => write!(f, "configuration error: {m}"),
            Self::Numerical(e) => write!(f, "numerical failure: {e}"),
            Self::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<friedrichs::Error> for CliError {
    fn from(e: friedrichs::Error) -> Self {
        use friedrichs::Error as E;
        // malformed input surfaces from the library as validation errors
        match e {
            E::InvalidParameter { .. }
            | E::LengthMismatch { .. }
            | E::NoLevels
            | E::UnsortedLevels { .. }
            | E::DegenerateLevels { .. }
            | E::EmptyBand { .. }
            | E::NegativeSpectralDensity { .. }
            | E::UnnormalizedInitialState { .. }
            | E::InitialStateLength { .. }
            | E::NegativeGamma { .. } => Self::Config(e.to_string()),
            other => Self::Numerical(other),
        }
    }
}
