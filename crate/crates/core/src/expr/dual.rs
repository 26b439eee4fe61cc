use std::ops::{Add, Div, Mul, Neg, Sub};

/// Forward-mode dual number `value + deriv·ε` with `ε² = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual {
    pub value: f64,
    pub deriv: f64,
}

impl Dual {
    pub const fn new(value: f64, deriv: f64) -> Self {
        Self { value, deriv }
    }

    pub const fn constant(value: f64) -> Self {
        Self { value, deriv: 0.0 }
    }

    pub const fn variable(value: f64) -> Self {
        Self { value, deriv: 1.0 }
    }

    /// Applies `f` with known derivative `df` at `self.value` (chain rule).
    /// A zero tangent stays exactly zero even if `df` is infinite.
    #[inline]
    fn chain(self, f: f64, df: f64) -> Self {
        let deriv = if self.deriv == 0.0 { 0.0 } else { df * self.deriv };
        Self::new(f, deriv)
    }

    pub fn sin(self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }

    pub fn cos(self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }

    pub fn tan(self) -> Self {
        let t = self.value.tan();
        self.chain(t, 1.0 + t * t)
    }

    pub fn tanh(self) -> Self {
        let t = self.value.tanh();
        self.chain(t, 1.0 - t * t)
    }

    pub fn sech(self) -> Self {
        let s = sech(self.value);
        self.chain(s, -s * self.value.tanh())
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }

    pub fn ln(self) -> Self {
        self.chain(self.value.ln(), 1.0 / self.value)
    }

    pub fn sqrt(self) -> Self {
        let r = self.value.sqrt();
        self.chain(r, 0.5 / r)
    }

    pub fn abs(self) -> Self {
        self.chain(self.value.abs(), self.value.signum())
    }

    pub fn powi(self, n: i32) -> Self {
        let df = if n == 0 { 0.0 } else { f64::from(n) * self.value.powi(n - 1) };
        self.chain(self.value.powi(n), df)
    }

    pub fn powf(self, p: f64) -> Self {
        let df = if p == 0.0 { 0.0 } else { p * self.value.powf(p - 1.0) };
        self.chain(self.value.powf(p), df)
    }

    /// `self^other` where the exponent also carries a tangent; needs `self.value > 0`.
    pub fn pow(self, other: Dual) -> Self {
        let v = self.value.powf(other.value);
        let mut d = 0.0;
        if self.deriv != 0.0 {
            d += other.value * self.value.powf(other.value - 1.0) * self.deriv;
        }
        if other.deriv != 0.0 {
            d += v * self.value.ln() * other.deriv;
        }
        Self::new(v, d)
    }
}

/// `1/cosh(x)` without overflow for large `|x|`.
pub fn sech(x: f64) -> f64 {
    let a = x.abs();
    if a > 20.0 {
        let e = (-a).exp();
        2.0 * e / (1.0 + e * e)
    } else {
        1.0 / a.cosh()
    }
}

impl From<f64> for Dual {
    fn from(v: f64) -> Self {
        Dual::constant(v)
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        Dual::new(self.value + rhs.value, self.deriv + rhs.deriv)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        Dual::new(self.value - rhs.value, self.deriv - rhs.deriv)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        Dual::new(self.value * rhs.value, self.value * rhs.deriv + self.deriv * rhs.value)
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, rhs: Dual) -> Dual {
        let v = self.value / rhs.value;
        Dual::new(v, (self.deriv - v * rhs.deriv) / rhs.value)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.value, -self.deriv)
    }
}
