//! Autonomous systems `x' = g(x)` with the origin as equilibrium.

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::linalg::{norm, SquareMatrix};

/// `‖g(0)‖` accepted at construction.
pub const ORIGIN_TOLERANCE: f64 = 1e-10;
/// `‖g(x*)‖` accepted by [`translate_equilibrium`].
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_FD_REL_STEP: f64 = 1e-6;

/// A vector field with exact first derivatives.
pub trait VectorField: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64], out: &mut [f64]) -> Result<()>;

    /// Writes `∂g_i/∂x_j` at `x` into `out`.
    fn jacobian(&self, x: &[f64], out: &mut SquareMatrix) -> Result<()>;

    /// Human-readable component formulas, if any.
    fn components(&self) -> Vec<String> {
        Vec::new()
    }
}

/// Vector field given by one expression per component.
#[derive(Debug, Clone)]
pub struct ExpressionField {
    exprs: Vec<Expression>,
}

impl ExpressionField {
    pub fn new(exprs: Vec<Expression>) -> Result<Self> {
        let n = exprs.len();
        for (i, e) in exprs.iter().enumerate() {
            if e.max_var() > n {
                return Err(Error::VariableOutOfRange { component: i + 1, index: e.max_var(), dim: n });
            }
        }
        Ok(Self { exprs })
    }

    pub fn parse<S: AsRef<str>>(sources: &[S]) -> Result<Self> {
        let exprs = sources
            .iter()
            .enumerate()
            .map(|(i, s)| Expression::parse(s.as_ref()).map_err(|source| Error::Parse { component: i + 1, source }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(exprs)
    }

    pub fn expressions(&self) -> &[Expression] {
        &self.exprs
    }
}

impl VectorField for ExpressionField {
    fn dim(&self) -> usize {
        self.exprs.len()
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        for (o, e) in out.iter_mut().zip(&self.exprs) {
            *o = e.eval(x)?;
        }
        Ok(())
    }

    fn jacobian(&self, x: &[f64], out: &mut SquareMatrix) -> Result<()> {
        let n = self.exprs.len();
        for (i, e) in self.exprs.iter().enumerate() {
            for j in 0..n {
                out[(i, j)] = if e.uses_var(j + 1) { e.eval_dual(x, j + 1)?.deriv } else { 0.0 };
            }
        }
        Ok(())
    }

    fn components(&self) -> Vec<String> {
        self.exprs.iter().map(ToString::to_string).collect()
    }
}

/// `ĝ(y) = g(y + x*) − g(x*)`.
#[derive(Debug, Clone)]
struct ShiftedField {
    inner: Arc<dyn VectorField>,
    shift: Vec<f64>,
    offset: Vec<f64>,
}

impl ShiftedField {
    fn shifted(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.shift).map(|(a, b)| a + b).collect()
    }
}

impl VectorField for ShiftedField {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        self.inner.eval(&self.shifted(y), out)?;
        for (o, c) in out.iter_mut().zip(&self.offset) {
            *o -= c;
        }
        Ok(())
    }

    fn jacobian(&self, y: &[f64], out: &mut SquareMatrix) -> Result<()> {
        self.inner.jacobian(&self.shifted(y), out)
    }

    fn components(&self) -> Vec<String> {
        self.inner.components()
    }
}

/// Radius `M` of the analysis ball `{‖x‖ ≤ M}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BallRadius {
    Finite(f64),
    /// Request the global check.
    Unbounded,
}

impl Serialize for BallRadius {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BallRadius::Finite(r) => s.serialize_f64(*r),
            BallRadius::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JacobianMode {
    /// Exact derivatives: dual numbers for expressions, analytic for compiled networks.
    #[default]
    #[serde(rename = "dual")]
    Exact,
    /// Central differences with step `rel_step · max(1, ‖x‖)`.
    FiniteDifference { rel_step: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobianMatrix {
    pub point: Vec<f64>,
    pub entries: SquareMatrix,
}

/// A validated autonomous system with `g(0) = 0`.
#[derive(Debug, Clone)]
pub struct SystemDef {
    field: Arc<dyn VectorField>,
    ball: BallRadius,
    jacobian_mode: JacobianMode,
    label: String,
}

impl SystemDef {
    /// Wraps `field`, checking `‖g(0)‖ ≤ 1e-10` and a finite Jacobian at the origin.
    pub fn new(
        field: Arc<dyn VectorField>,
        ball: BallRadius,
        jacobian_mode: JacobianMode,
        label: impl Into<String>,
    ) -> Result<Self> {
        if field.dim() == 0 {
            return Err(Error::InvalidArgument("system dimension must be at least 1".into()));
        }
        if let BallRadius::Finite(r) = ball {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidArgument(format!("ball radius must be positive, got {r}")));
            }
        }
        if let JacobianMode::FiniteDifference { rel_step } = jacobian_mode {
            if !(rel_step.is_finite() && rel_step > 0.0) {
                return Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {rel_step}")));
            }
        }
        let sys = Self { field, ball, jacobian_mode, label: label.into() };
        let origin = vec![0.0; sys.dim()];
        let g0 = sys.eval(&origin)?;
        let residual = norm(&g0);
        if residual > ORIGIN_TOLERANCE {
            return Err(Error::OriginNotEquilibrium { residual, tolerance: ORIGIN_TOLERANCE });
        }
        sys.jacobian(&origin)?;
        Ok(sys)
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn ball(&self) -> BallRadius {
        self.ball
    }

    pub fn jacobian_mode(&self) -> JacobianMode {
        self.jacobian_mode
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn field(&self) -> &Arc<dyn VectorField> {
        &self.field
    }

    pub fn components(&self) -> Vec<String> {
        self.field.components()
    }

    pub fn with_ball(mut self, ball: BallRadius) -> Self {
        self.ball = ball;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_jacobian_mode(mut self, mode: JacobianMode) -> Self {
        self.jacobian_mode = mode;
        self
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(())
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.field.eval(x, out)?;
        if let Some(v) = out.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite { value: *v, point: x.to_vec() });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let mut out = vec![0.0; self.dim()];
        self.eval_into(x, &mut out)?;
        Ok(out)
    }

    /// Jacobian at `x` using the configured mode; `out` must be `n × n`.
    pub fn jacobian_into(&self, x: &[f64], out: &mut SquareMatrix) -> Result<()> {
        match self.jacobian_mode {
            JacobianMode::Exact => self.field.jacobian(x, out)?,
            JacobianMode::FiniteDifference { rel_step } => self.fd_jacobian(x, rel_step, out)?,
        }
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                if !out[(i, j)].is_finite() {
                    return Err(Error::NonFiniteJacobian { row: i, col: j, point: x.to_vec() });
                }
            }
        }
        Ok(())
    }

    fn fd_jacobian(&self, x: &[f64], rel_step: f64, out: &mut SquareMatrix) -> Result<()> {
        let n = self.dim();
        let h = rel_step * norm(x).max(1.0);
        let mut xp = x.to_vec();
        let mut fp = vec![0.0; n];
        let mut fm = vec![0.0; n];
        for j in 0..n {
            xp[j] = x[j] + h;
            self.field.eval(&xp, &mut fp)?;
            xp[j] = x[j] - h;
            self.field.eval(&xp, &mut fm)?;
            xp[j] = x[j];
            for i in 0..n {
                out[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        Ok(())
    }

    pub fn jacobian(&self, x: &[f64]) -> Result<JacobianMatrix> {
        self.check_point(x)?;
        if let Some(v) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite { value: *v, point: x.to_vec() });
        }
        let mut entries = SquareMatrix::zeros(self.dim());
        self.jacobian_into(x, &mut entries)?;
        Ok(JacobianMatrix { point: x.to_vec(), entries })
    }
}

/// Parses `sources` as `g_1..g_n` over `x1..xn` and validates `g(0) = 0`.
pub fn build_system<S: AsRef<str>>(
    n: usize,
    sources: &[S],
    ball: BallRadius,
    jacobian_mode: JacobianMode,
) -> Result<SystemDef> {
    if n == 0 {
        return Err(Error::InvalidArgument("system dimension must be at least 1".into()));
    }
    if sources.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: sources.len() });
    }
    let field = ExpressionField::parse(sources)?;
    let label = format!("expressions(n={n})");
    SystemDef::new(Arc::new(field), ball, jacobian_mode, label)
}

/// Like [`build_system`] but for a field whose equilibrium sits at `x_star`; the
/// returned system is expressed in `y = x − x*`.
pub fn build_system_about<S: AsRef<str>>(
    n: usize,
    sources: &[S],
    ball: BallRadius,
    jacobian_mode: JacobianMode,
    x_star: &[f64],
) -> Result<SystemDef> {
    if sources.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: sources.len() });
    }
    let field: Arc<dyn VectorField> = Arc::new(ExpressionField::parse(sources)?);
    shift_field(field, ball, jacobian_mode, format!("expressions(n={n})"), x_star)
}

pub(crate) fn shift_field(
    field: Arc<dyn VectorField>,
    ball: BallRadius,
    jacobian_mode: JacobianMode,
    label: String,
    x_star: &[f64],
) -> Result<SystemDef> {
    let n = field.dim();
    if x_star.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x_star.len() });
    }
    if x_star.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("equilibrium must be finite".into()));
    }
    let mut offset = vec![0.0; n];
    field.eval(x_star, &mut offset)?;
    let residual = norm(&offset);
    if residual.is_nan() || residual > EQUILIBRIUM_TOLERANCE {
        return Err(Error::NotEquilibrium { residual, tolerance: EQUILIBRIUM_TOLERANCE });
    }
    if x_star.iter().all(|v| *v == 0.0) && residual == 0.0 {
        return SystemDef::new(field, ball, jacobian_mode, label);
    }
    let label = format!("{label} shifted by x*={x_star:?}");
    let shifted = ShiftedField { inner: field, shift: x_star.to_vec(), offset };
    SystemDef::new(Arc::new(shifted), ball, jacobian_mode, label)
}

/// Moves the equilibrium `x_star` of `sys` to the origin.
///
/// The equilibrium residual `g(x*)` (at most `1e-8`) is subtracted so the new
/// origin is an exact zero of the field.
pub fn translate_equilibrium(sys: &SystemDef, x_star: &[f64]) -> Result<SystemDef> {
    shift_field(Arc::clone(&sys.field), sys.ball, sys.jacobian_mode, sys.label.clone(), x_star)
}
