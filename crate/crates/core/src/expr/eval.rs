use thiserror::Error;

use super::dual::{sech, Dual};
use super::{BinOp, Expression, Func, Node};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("expression uses x{needed} but the point has dimension {got}")]
    DimensionMismatch { needed: usize, got: usize },

    #[error("seed index {seed} outside 1..={dim}")]
    InvalidSeed { seed: usize, dim: usize },

    #[error("expression evaluated to non-finite value {value}")]
    NonFinite { value: f64 },

    #[error("domain error in {op} at argument {arg}")]
    Domain { op: &'static str, arg: f64 },

    #[error("{op} is not differentiable at {arg}")]
    NonDifferentiable { op: &'static str, arg: f64 },
}

fn is_integer(p: f64) -> bool {
    p.fract() == 0.0 && p.abs() <= f64::from(i32::MAX)
}

fn real_pow(base: f64, exponent: f64) -> Result<f64, EvalError> {
    if is_integer(exponent) {
        Ok(base.powi(exponent as i32))
    } else if base < 0.0 {
        Err(EvalError::Domain { op: "^", arg: base })
    } else {
        Ok(base.powf(exponent))
    }
}

fn eval_real(node: &Node, x: &[f64]) -> Result<f64, EvalError> {
    Ok(match node {
        Node::Const(c) => *c,
        Node::Var(k) => x[k - 1],
        Node::Neg(a) => -eval_real(a, x)?,
        Node::Binary(op, a, b) => {
            let a = eval_real(a, x)?;
            let b = eval_real(b, x)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => real_pow(a, b)?,
            }
        }
        Node::Call(f, a) => {
            let a = eval_real(a, x)?;
            match f {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Tan => a.tan(),
                Func::Tanh => a.tanh(),
                Func::Sech => sech(a),
                Func::Exp => a.exp(),
                Func::Ln if a < 0.0 => return Err(EvalError::Domain { op: "ln", arg: a }),
                Func::Ln => a.ln(),
                Func::Abs => a.abs(),
                Func::Sqrt if a < 0.0 => return Err(EvalError::Domain { op: "sqrt", arg: a }),
                Func::Sqrt => a.sqrt(),
            }
        }
    })
}

fn eval_dual(node: &Node, x: &[f64], seed: usize) -> Result<Dual, EvalError> {
    Ok(match node {
        Node::Const(c) => Dual::constant(*c),
        Node::Var(k) if *k == seed => Dual::variable(x[k - 1]),
        Node::Var(k) => Dual::constant(x[k - 1]),
        Node::Neg(a) => -eval_dual(a, x, seed)?,
        Node::Binary(op, a, b) => {
            let a = eval_dual(a, x, seed)?;
            let b = eval_dual(b, x, seed)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => dual_pow(a, b)?,
            }
        }
        Node::Call(f, a) => {
            let a = eval_dual(a, x, seed)?;
            let v = a.value;
            let moving = a.deriv != 0.0;
            match f {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Tan => a.tan(),
                Func::Tanh => a.tanh(),
                Func::Sech => a.sech(),
                Func::Exp => a.exp(),
                Func::Ln if v < 0.0 => return Err(EvalError::Domain { op: "ln", arg: v }),
                Func::Ln if v == 0.0 && moving => return Err(EvalError::NonDifferentiable { op: "ln", arg: v }),
                Func::Ln => a.ln(),
                Func::Abs if v == 0.0 && moving => return Err(EvalError::NonDifferentiable { op: "abs", arg: v }),
                Func::Abs => a.abs(),
                Func::Sqrt if v < 0.0 => return Err(EvalError::Domain { op: "sqrt", arg: v }),
                Func::Sqrt if v == 0.0 && moving => return Err(EvalError::NonDifferentiable { op: "sqrt", arg: v }),
                Func::Sqrt => a.sqrt(),
            }
        }
    })
}

fn dual_pow(a: Dual, b: Dual) -> Result<Dual, EvalError> {
    if b.deriv == 0.0 {
        let p = b.value;
        if is_integer(p) {
            if a.value == 0.0 && p < 1.0 && p != 0.0 && a.deriv != 0.0 {
                return Err(EvalError::NonDifferentiable { op: "^", arg: a.value });
            }
            return Ok(a.powi(p as i32));
        }
        if a.value < 0.0 {
            return Err(EvalError::Domain { op: "^", arg: a.value });
        }
        if a.value == 0.0 && p < 1.0 && a.deriv != 0.0 {
            return Err(EvalError::NonDifferentiable { op: "^", arg: a.value });
        }
        return Ok(a.powf(p));
    }
    if a.value > 0.0 {
        Ok(a.pow(b))
    } else if a.value == 0.0 {
        Err(EvalError::NonDifferentiable { op: "^", arg: a.value })
    } else {
        Err(EvalError::Domain { op: "^", arg: a.value })
    }
}

impl Expression {
    fn check_dim(&self, point: &[f64]) -> Result<(), EvalError> {
        if self.max_var > point.len() {
            return Err(EvalError::DimensionMismatch { needed: self.max_var, got: point.len() });
        }
        Ok(())
    }

    /// Evaluates at `point`; `point[k-1]` is the value of `xk`.
    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        self.check_dim(point)?;
        let v = eval_real(&self.root, point)?;
        if !v.is_finite() {
            return Err(EvalError::NonFinite { value: v });
        }
        Ok(v)
    }

    /// Value and exact partial derivative with respect to `x{seed_index}` (1-based).
    pub fn eval_dual(&self, point: &[f64], seed_index: usize) -> Result<Dual, EvalError> {
        self.check_dim(point)?;
        if seed_index == 0 || seed_index > point.len() {
            return Err(EvalError::InvalidSeed { seed: seed_index, dim: point.len() });
        }
        let d = eval_dual(&self.root, point, seed_index)?;
        if !d.value.is_finite() {
            return Err(EvalError::NonFinite { value: d.value });
        }
        if !d.deriv.is_finite() {
            return Err(EvalError::NonFinite { value: d.deriv });
        }
        Ok(d)
    }
}
