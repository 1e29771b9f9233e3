use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("value out of range: {0}")]
    Range(String),

    #[error("channel reconstruction failed: trace-preservation deficit {deficit:e}")]
    Reconstruction { deficit: f64 },

    #[error("non-physical channel: eigenvalue {eigenvalue:e} below tolerance")]
    NonPhysical { eigenvalue: f64 },

    #[error("training failed: {0}")]
    Training(String),

    #[error("ingestion error at row {row}: {msg}")]
    Ingestion { row: usize, msg: String },
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Reconstruction { .. } | Error::NonPhysical { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
