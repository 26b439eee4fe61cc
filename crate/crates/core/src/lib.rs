//! Stability certification for autonomous systems `x' = g(x)` with `g(0) = 0`.
//!
//! The vector field is rewritten as `x' = D(x) x`, where each entry of `D` is the
//! average of the Jacobian entry along the ray from the origin to `x`:
//!
//! ```text
//! d_ij(x) = ∫₀¹ J_ij(s x) ds
//! ```
//!
//! With `V(x) = ½‖x‖²` one gets `V'(x) ≤ Σ β_i(x) x_i²` where
//!
//! ```text
//! β_i(x) = d_ii(x) + ½ Σ_{j≠i} (|d_ij(x)| + |d_ji(x)|)
//! ```
//!
//! so sampled negativity of every `β_i` over a ball certifies (asymptotic)
//! stability on that ball. The crate also ships the row-sum and Krasovskii
//! baselines, Hopfield-Tank network compilation, and trajectory simulation for
//! empirical cross-checks.

pub mod corpus;
pub mod criteria;
pub mod error;
pub mod expr;
pub mod hopfield;
pub mod linalg;
pub mod quadrature;
pub mod ray;
pub mod sampling;
pub mod simulate;
pub mod system;

pub use criteria::{
    beta_profile, certified_radius_search, classify, krasovskii_check, lyapunov_derivative, BetaProfile, BetaVariant,
    CertifiedRadius, Classification, KrasovskiiReport, KrasovskiiVerdict, StabilityVerdict,
};
pub use error::{Error, Result};
pub use expr::{Dual, Expression};
pub use hopfield::{compile, find_equilibrium, theorem5_betas, Activation, HopfieldNetwork};
pub use linalg::SquareMatrix;
pub use ray::{ray_matrix, QuadratureConfig, RayMatrix};
pub use sampling::SamplingPlan;
pub use simulate::{
    convergence_experiment, integrate, ConvergenceSummary, Integrator, IntegratorConfig, TrajectoryRecord,
};
pub use system::{build_system, translate_equilibrium, BallRadius, JacobianMode, SystemDef};
