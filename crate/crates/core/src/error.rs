use thiserror::Error;

/// Errors raised by the library.
///
/// Messages name the violated admissibility condition so that the CLI can
/// print them verbatim.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("inadmissible state: {0}")]
    Hyperbolicity(String),

    #[error("light-speed violation: |v| = {speed} must be < 1")]
    LightSpeed { speed: f64 },

    #[error("invalid parameters: {0}")]
    Parameters(String),

    #[error("(fi) front admissibility violated: {0}")]
    FrontAdmissibility(String),

    #[error("causality violated: {0}")]
    Causality(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("audit failed: {0}")]
    Audit(String),

    #[error("eigen-solver failure: {0}")]
    Eigen(String),

    #[error("CFL violation: {0}")]
    Cfl(String),

    #[error("non-finite value at step {step}: {what}")]
    NonFinite { step: usize, what: String },

    #[error("(5.1') hyperbolicity lost at step {step}: {detail}")]
    HyperbolicityLost { step: usize, detail: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
