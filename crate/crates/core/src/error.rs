use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("component {component}: {source}")]
    Parse {
        component: usize,
        #[source]
        source: ParseError,
    },

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("component {component} references x{index} but the system has dimension {dim}")]
    VariableOutOfRange { component: usize, index: usize, dim: usize },

    #[error("origin is not an equilibrium: |g(0)| = {residual:e} (tolerance {tolerance:e})")]
    OriginNotEquilibrium { residual: f64, tolerance: f64 },

    #[error("point is not an equilibrium: |g(x*)| = {residual:e} (tolerance {tolerance:e})")]
    NotEquilibrium { residual: f64, tolerance: f64 },

    #[error("non-finite Jacobian entry ({row}, {col}) at {point:?}")]
    NonFiniteJacobian { row: usize, col: usize, point: Vec<f64> },

    #[error("non-finite value {value} at {point:?}")]
    NonFinite { value: f64, point: Vec<f64> },

    #[error("ray quadrature did not converge within depth {depth} at {point:?}")]
    QuadratureNonConvergence { depth: u32, point: Vec<f64> },

    #[error("reconstruction residual {residual:e} exceeds bound {bound:e} at {point:?}")]
    ReconstructionFailed { residual: f64, bound: f64, point: Vec<f64> },

    #[error("sampling plan produced no points")]
    EmptySamplingPlan,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NewtonNoConvergence { iterations: usize, residual: f64 },

    #[error("singular Jacobian at iterate {iterate:?}")]
    SingularJacobian { iterate: Vec<f64> },

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}
