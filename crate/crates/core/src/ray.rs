//! The ray-averaged Jacobian `D(x)`, `d_ij(x) = ∫₀¹ J_ij(s x) ds`.
//!
//! Because `g(0) = 0`, the fundamental theorem of calculus along the segment
//! from `0` to `x` gives `g(x) = D(x) x`; the residual of that identity is
//! recorded on every result and doubles as the correctness check.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{norm, SquareMatrix};
use crate::quadrature::{adaptive_gauss_legendre, gauss_legendre_panel};
use crate::system::{JacobianMode, SystemDef};

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_DEPTH: u32 = 20;
/// Multiple of the difference-quotient rounding level used as the quadrature
/// tolerance floor for finite-difference Jacobians.
pub const FD_NOISE_FACTOR: f64 = 256.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureConfig {
    pub tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { tol: DEFAULT_QUAD_TOL, max_depth: DEFAULT_MAX_DEPTH }
    }
}

impl QuadratureConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// `D(x)` at a point with quadrature bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayMatrix {
    pub point: Vec<f64>,
    pub entries: SquareMatrix,
    /// Jacobian evaluations used.
    pub node_count: usize,
    /// Reconstruction residual `‖D(x) x − g(x)‖`.
    pub est_error: f64,
    /// Accumulated refinement differences; bounds the entrywise quadrature error.
    pub quad_error: f64,
}

/// Allowed reconstruction residual for a given `‖g(x)‖`.
pub fn reconstruction_bound(g_norm: f64) -> f64 {
    1e-8 * (1.0 + g_norm)
}

impl RayMatrix {
    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    /// Splits `g_i(x)` into `(d_ii x_i, Σ_{j≠i} d_ij x_j)`; `i` is 0-based.
    pub fn decoupled_row(&self, i: usize) -> (f64, f64) {
        let x = &self.point;
        let row = self.entries.row(i);
        let diag = row[i] * x[i];
        let off = row.iter().zip(x).enumerate().filter(|(j, _)| *j != i).map(|(_, (d, xj))| d * xj).sum();
        (diag, off)
    }

    /// `D(x) x`.
    pub fn reconstruct(&self) -> Vec<f64> {
        self.entries.mul_vec(&self.point)
    }
}

fn integrand<'a>(sys: &'a SystemDef, point: &'a [f64]) -> impl FnMut(f64, &mut [f64]) -> Result<()> + 'a {
    let n = sys.dim();
    let mut y = vec![0.0; n];
    let mut jac = SquareMatrix::zeros(n);
    move |s, out| {
        for (yk, xk) in y.iter_mut().zip(point) {
            *yk = s * xk;
        }
        sys.jacobian_into(&y, &mut jac)?;
        out.copy_from_slice(jac.as_slice());
        Ok(())
    }
}

fn check_point(sys: &SystemDef, point: &[f64]) -> Result<()> {
    if point.len() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), found: point.len() });
    }
    if let Some(v) = point.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite { value: *v, point: point.to_vec() });
    }
    Ok(())
}

/// Computes `D(point)` by adaptive Gauss-Legendre quadrature along the ray.
///
/// If a panel exhausts the depth limit or the reconstruction residual exceeds
/// `1e-8 (1 + ‖g‖)`, the integration is repeated once with twice the depth.
pub fn ray_matrix(sys: &SystemDef, point: &[f64], cfg: &QuadratureConfig) -> Result<RayMatrix> {
    check_point(sys, point)?;
    if !(cfg.tol.is_finite() && cfg.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("quadrature tolerance must be positive, got {}", cfg.tol)));
    }
    let n = sys.dim();
    if point.iter().all(|v| *v == 0.0) {
        // the ray collapses to the origin: D(0) = J(0)
        let j = sys.jacobian(point)?;
        return Ok(RayMatrix {
            point: point.to_vec(),
            entries: j.entries,
            node_count: 1,
            est_error: 0.0,
            quad_error: 0.0,
        });
    }
    let g = sys.eval(point)?;
    let bound = reconstruction_bound(norm(&g));
    let tol = match sys.jacobian_mode() {
        JacobianMode::Exact => cfg.tol,
        // difference quotients carry rounding noise of order eps·|g| / h
        JacobianMode::FiniteDifference { rel_step } => {
            cfg.tol.max(FD_NOISE_FACTOR * f64::EPSILON / rel_step * (1.0 + norm(&g)))
        }
    };

    let mut depth = cfg.max_depth;
    let mut evaluations = 0;
    for attempt in 0..2 {
        let out = adaptive_gauss_legendre(integrand(sys, point), n * n, 0.0, 1.0, tol, depth)?;
        evaluations += out.evaluations;
        let entries = SquareMatrix::from_fn(n, |i, j| out.values[i * n + j]);
        let recon = entries.mul_vec(point);
        let residual = norm(&recon.iter().zip(&g).map(|(a, b)| a - b).collect::<Vec<_>>());
        if out.converged && residual <= bound {
            return Ok(RayMatrix {
                point: point.to_vec(),
                entries,
                node_count: evaluations,
                est_error: residual,
                quad_error: out.error_estimate,
            });
        }
        if attempt == 1 {
            if !out.converged {
                return Err(Error::QuadratureNonConvergence { depth, point: point.to_vec() });
            }
            return Err(Error::ReconstructionFailed { residual, bound, point: point.to_vec() });
        }
        depth *= 2;
    }
    unreachable!("loop returns on the second attempt")
}

/// `D(point)` from one 4-node panel on `[0, 1]`; exact for polynomial fields of degree ≤ 7.
pub fn ray_matrix_single_panel(sys: &SystemDef, point: &[f64]) -> Result<SquareMatrix> {
    check_point(sys, point)?;
    let n = sys.dim();
    let v = gauss_legendre_panel(integrand(sys, point), n * n, 0.0, 1.0)?;
    Ok(SquareMatrix::from_fn(n, |i, j| v[i * n + j]))
}
