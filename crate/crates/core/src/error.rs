use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian: |H[{row},{col}] - conj(H[{col},{row}])| = {deviation:.3e}")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Probe or environment Fock truncation discards too much weight.
    #[error("{what} truncation leaks {leakage:.3e} of the norm at cutoff {cutoff}; use a cutoff of at least {suggested}")]
    Truncation {
        what: &'static str,
        cutoff: usize,
        leakage: f64,
        suggested: usize,
    },

    #[error("anticommutator solve residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    SylvesterResidual { residual: f64, tolerance: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
