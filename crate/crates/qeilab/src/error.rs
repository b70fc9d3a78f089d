use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("quadrature did not converge in {context}: achieved error estimate {estimate:e}")]
    QuadratureNonConvergence { estimate: f64, context: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Hermiticity defect {defect:e} exceeds tolerance {tol:e}; model evaluator is broken")]
    HermiticityDefect { defect: f64, tol: f64 },

    #[error("quadratic form has non-real value: imaginary part {imag:e} exceeds tolerance {tol:e}")]
    NonRealResult { imag: f64, tol: f64 },

    #[error("eigensolver residual {residual:e} exceeds tolerance {tol:e}")]
    EigenFailure { residual: f64, tol: f64 },

    #[error("asymptote estimate inconclusive: samples at theta = 10, 20, 40 spread {spread:e} relative")]
    InconclusiveAsymptote { spread: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
