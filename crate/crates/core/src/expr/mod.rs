//! Arithmetic expressions over the state variables `x1..xn`.
//!
//! Expressions are parsed once and are immutable afterwards. Evaluation is
//! available on plain reals ([`Expression::eval`]) and on forward-mode dual
//! numbers ([`Expression::eval_dual`]), which yields exact partial derivatives.
//!
//! The accepted grammar (whitespace is insignificant):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = atom [ "^" unary ] ;
//! atom    = number | variable | "pi" | call | "(" expr ")" ;
//! call    = function "(" expr ")" ;
//! function = "sin" | "cos" | "tan" | "tanh" | "sech" | "exp" | "ln" | "abs" | "sqrt" ;
//! variable = "x" digit { digit } ;            (* x1, x2, ... ; 1-based *)
//! number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
//! ```

mod dual;
mod eval;
mod parser;

use std::fmt;

pub use dual::{sech, Dual};
pub use eval::EvalError;
pub use parser::ParseError;

/// Unary functions understood by the parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Tanh,
    Sech,
    Exp,
    Ln,
    Abs,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 9] =
        [Func::Sin, Func::Cos, Func::Tan, Func::Tanh, Func::Sech, Func::Exp, Func::Ln, Func::Abs, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Tanh => "tanh",
            Func::Sech => "sech",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn arity(self) -> usize {
        1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

/// Expression tree node. Variable indices are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(usize),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    fn max_var(&self) -> usize {
        match self {
            Node::Const(_) => 0,
            Node::Var(k) => *k,
            Node::Neg(a) | Node::Call(_, a) => a.max_var(),
            Node::Binary(_, a, b) => a.max_var().max(b.max_var()),
        }
    }

    fn is_atom(&self) -> bool {
        match self {
            Node::Const(c) => *c >= 0.0 || c.is_nan(),
            Node::Var(_) | Node::Call(..) => true,
            Node::Neg(_) | Node::Binary(..) => false,
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_atom() {
            write!(f, "{self}")
        } else {
            write!(f, "({self})")
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Const(c) => write!(f, "{c}"),
            Node::Var(k) => write!(f, "x{k}"),
            Node::Neg(a) => {
                write!(f, "-")?;
                a.fmt_operand(f)
            }
            Node::Binary(op, a, b) => {
                a.fmt_operand(f)?;
                write!(f, " {} ", op.symbol())?;
                b.fmt_operand(f)
            }
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// A parsed expression together with the largest variable index it uses.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
    max_var: usize,
}

impl Expression {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        parser::parse(source).map(Self::from_node)
    }

    pub fn from_node(root: Node) -> Self {
        let max_var = root.max_var();
        Self { root, max_var }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Largest variable index referenced (0 for constant expressions).
    pub fn max_var(&self) -> usize {
        self.max_var
    }

    /// Whether variable `k` (1-based) occurs in the expression.
    pub fn uses_var(&self, k: usize) -> bool {
        fn walk(node: &Node, k: usize) -> bool {
            match node {
                Node::Const(_) => false,
                Node::Var(v) => *v == k,
                Node::Neg(a) | Node::Call(_, a) => walk(a, k),
                Node::Binary(_, a, b) => walk(a, k) || walk(b, k),
            }
        }
        walk(&self.root, k)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

impl std::str::FromStr for Expression {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expression::parse(s)
    }
}
