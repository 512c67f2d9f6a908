use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Messages name the violated condition in terms of the underlying formula
/// (`det(S−I)=0`, `det B=0`, ...) so a failure can be traced back to it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("not a free symplectic matrix: det B={det_b:e}")]
    NotFree { det_b: f64 },

    #[error("matrix is not symplectic: ‖SᵀJS−J‖_max={residual:e}")]
    NotSymplectic { residual: f64 },

    #[error("eigenvalue one: {0}")]
    EigenvalueOne(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parity error: m={m} is inconsistent with det L={det_l:e}")]
    Parity { m: u8, det_l: f64 },

    #[error("divergent integral: {0}")]
    DivergentIntegral(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("quadrature did not converge: refinements differ by {difference:e}")]
    QuadratureNonconvergence { difference: f64 },

    #[error("inconsistent index bookkeeping: ratio {re:+.6}{im:+.6}i is not ±1")]
    InconsistentIndex { re: f64, im: f64 },

    #[error("factor search exhausted: {0}")]
    ExhaustedSearch(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
