use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("oscillator is not underdamped: gamma = {gamma:e} >= 2 omega_m = {limit:e}")]
    Overdamped { gamma: f64, limit: f64 },

    #[error("inverse pulse map undefined: middle pulse strength is zero")]
    DegenerateMiddlePulse,

    #[error("cooperativity diverges for an undamped oscillator (epsilon = 0)")]
    UndampedCooperativity,

    #[error("state is unphysical: smallest eigenvalue of V + i Omega is {min_eigenvalue:e} (tolerance {tolerance:e})")]
    Unphysical { min_eigenvalue: f64, tolerance: f64 },

    #[error("matrix is not a squeezed swap: entry residual {residual:e}")]
    NotSqueezedSwap { residual: f64 },

    #[error("minimizer did not converge after {iterations} iterations (simplex diameter {diameter:e}, best value {best:e})")]
    MinimizerNotConverged {
        iterations: usize,
        diameter: f64,
        best: f64,
    },

    #[error("root bracket [{lo}, {hi}] does not straddle the target (f(lo) = {f_lo:e}, f(hi) = {f_hi:e})")]
    BracketFailure {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("state specification invalid: {0}")]
    InvalidState(String),

    #[error("covariance is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("number-basis truncation leaked {leakage:e} (threshold {threshold:e}); increase the dimensions")]
    TruncationLeakage { leakage: f64, threshold: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
