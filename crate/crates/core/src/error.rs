use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right} quaternionic coordinates")]
    LengthMismatch { left: usize, right: usize },

    #[error("quaternion has nonzero real part {0:e}; expected pure imaginary")]
    NotPureImaginary(f64),

    #[error("direction is not a unit tangent vector at the base point (residual {0:e})")]
    NotTangent(f64),

    #[error("invalid dimension n = {0}; need n >= 2")]
    InvalidDimension(usize),

    #[error("invalid Jacobi parameters alpha = {alpha}, beta = {beta}")]
    InvalidJacobiParams { alpha: f64, beta: f64 },

    #[error("argument {value} outside the domain {domain}")]
    OutOfDomain { value: f64, domain: &'static str },

    #[error("binomial coefficient C({a}, {b}) out of range")]
    BinomialRange { a: i64, b: i64 },

    #[error("binomial coefficient C({a}, {b}) overflows u128")]
    BinomialOverflow { a: i64, b: i64 },

    #[error("({h}, {m}) is not in the index set (need 2m <= h)")]
    InvalidIndex { h: usize, m: usize },

    #[error("calibration for ({h}, {m}) found no usable probe pair")]
    DegenerateProbes { h: usize, m: usize },

    #[error("kernel ({h}, {m}) is unusable: calibration spread {spread:.4} exceeds the limit")]
    UnusableKernel { h: usize, m: usize, spread: f64 },

    #[error("no calibration for n = {n}, (h, m) = ({h}, {m}); run `qsphere calibrate` first")]
    MissingCalibration { n: usize, h: usize, m: usize },

    #[error("eigencheck for ({h}, {m}): every probe point is degenerate")]
    DegenerateEigencheck { h: usize, m: usize },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
