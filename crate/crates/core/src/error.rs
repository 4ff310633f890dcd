use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("tolerance {0:e} outside the supported range (1e-14, 1e-4)")]
    InvalidTolerance(f64),

    #[error("integrator step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("integrator exceeded {0} steps")]
    TooManySteps(usize),

    #[error("state is at {got} but the propagator starts at {expected}")]
    StateMismatch { expected: f64, got: f64 },

    #[error("degenerate point: {0}")]
    DegeneratePoint(String),

    #[error("Wronskian not constant: {first} vs {second}")]
    WronskianDrift { first: f64, second: f64 },

    #[error("root bracket could not be established: {0}")]
    Bracket(String),

    #[error("curve {label} lost at q1 = {q1} (last lambda = {lambda})")]
    CurveLost { label: String, q1: f64, lambda: f64 },

    #[error("(lambda = {lambda}, q1 = {q1}) is not on the requested characteristic curve: |D -/+ 1| = {residual:e}")]
    OffCurve { lambda: f64, q1: f64, residual: f64 },

    #[error("null space of the matching matrix is two-dimensional; request a parity")]
    Degenerate,

    #[error("requested parity does not match the eigenfunction: {0}")]
    ParityMismatch(String),

    #[error("truncation did not converge: change {0:e}")]
    Convergence(f64),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol > 1e-14 && tol < 1e-4 {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol))
    }
}
