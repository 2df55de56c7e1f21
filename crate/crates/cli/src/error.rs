use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),

    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("below-threshold condition violated: Ω_p = {omega_p}κ ≥ Δ_c = {delta_c}κ")]
    Threshold { delta_c: f64, omega_p: f64 },

    #[error("fock cutoff inadequate: {0}")]
    Cutoff(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("record failed validation ({context}): {reason}")]
    InvalidRecord { context: String, reason: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Machine-readable category reported alongside the exit code.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) | CliError::Parse(_) => "config",
            CliError::Threshold { .. } => "threshold",
            CliError::Cutoff(_) => "cutoff",
            CliError::Numerical(_) | CliError::InvalidRecord { .. } => "numerical",
            CliError::Io { .. } => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "config" => 2,
            "threshold" => 3,
            "cutoff" => 4,
            "numerical" => 5,
            _ => 6,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<sqzcav::Error> for CliError {
    fn from(e: sqzcav::Error) -> Self {
        use sqzcav::Error as E;
        match e {
            E::AtThreshold { delta_c, omega_p } => CliError::Threshold { delta_c, omega_p },
            E::TruncationInsufficient(msg) => CliError::Cutoff(msg),
            E::InvalidParameter(msg) | E::WrongFrame(msg) => CliError::Config(msg),
            E::InvalidDims(_) => CliError::Config(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}
