use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid irrep label ({p}, {q}): both indices must be nonnegative")]
    InvalidLabel { p: i64, q: i64 },

    #[error("U_({p},{q}) has no real form: p and q must have the same parity")]
    NoRealForm { p: usize, q: usize },

    #[error("point {point:?} is not interior to the patch domain (required margin {margin})")]
    OutOfDomain { point: [f64; 3], margin: f64 },

    #[error("Jacobian is rank deficient at {point:?} (smallest singular value {sigma_min:e})")]
    RankDeficient { point: [f64; 3], sigma_min: f64 },

    #[error("tangent space is not associative: associativity residual {residual:e} exceeds {tolerance:e}")]
    FrameFailure { residual: f64, tolerance: f64 },

    #[error("seed normal is nearly tangent (normal component {normal_norm:e})")]
    BadSeed { normal_norm: f64 },

    #[error("Newton iteration diverged after {iterations} iterations (last residual {:e})", history.last().copied().unwrap_or(f64::NAN))]
    Diverged {
        iterations: usize,
        history: Vec<f64>,
    },

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("grid is not converged (residual {residual:e}, tolerance {tolerance:e})")]
    Unconverged { residual: f64, tolerance: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed grid file: {0}")]
    GridFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
