use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    Mesh(String),
    #[error("MSH line {line}: {msg}")]
    Msh { line: usize, msg: String },
    #[error("unsupported MSH version {0} (only ASCII 2.2 is read)")]
    MshVersion(String),
    #[error("invalid coefficients: {0}")]
    Coefficients(String),
    #[error("unsupported polynomial degree {0} (supported: 1..=6)")]
    Degree(usize),
    #[error("invalid face operator: {0}")]
    FaceOperator(String),
    #[error("{0}")]
    Domain(String),
    #[error("resonance: cavity system condition number {0:.3e} exceeds 1e12")]
    Resonance(f64),
    #[error("singular {what} matrix")]
    Singular { what: &'static str },
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
