//! Hopfield-Tank networks `x' = −a ⊙ x + L x + W ν(x)`.
//!
//! `L` is an optional linear coupling matrix (zero in the classical model).
//! Biases are folded into the activations, `ν_i(x) = μ_i(x + θ_i)`. A network
//! compiles to a [`SystemDef`] in coordinates centred on its equilibrium.

use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::criteria::{betas_from_matrix, BetaProfile, BetaVariant};
use crate::error::{Error, Result};
use crate::expr::{sech, Expression};
use crate::linalg::{norm, solve, SquareMatrix};
use crate::quadrature::adaptive_gauss_legendre;
use crate::ray::DEFAULT_QUAD_TOL;
use crate::system::{shift_field, BallRadius, JacobianMode, SystemDef, VectorField};

pub const NEWTON_MAX_ITERATIONS: usize = 100;
pub const NEWTON_TOLERANCE: f64 = 1e-10;
const NEWTON_MAX_HALVINGS: usize = 40;
/// Below this `|g x|` the ratio `tanh(g x)/x` switches to its Taylor series.
const TAU_SERIES_THRESHOLD: f64 = 1e-4;

/// Neuron output function `μ`.
#[derive(Debug, Clone, PartialEq)]
pub enum Activation {
    /// `tanh(gain · x)`
    Tanh { gain: f64 },
    /// `x`
    Linear,
    /// Arbitrary expression in `x1`.
    Expression(Expression),
}

impl Serialize for Activation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Activation::Tanh { gain } => {
                let mut st = s.serialize_struct("Activation", 2)?;
                st.serialize_field("kind", "tanh")?;
                st.serialize_field("gain", gain)?;
                st.end()
            }
            Activation::Linear => {
                let mut st = s.serialize_struct("Activation", 1)?;
                st.serialize_field("kind", "linear")?;
                st.end()
            }
            Activation::Expression(e) => {
                let mut st = s.serialize_struct("Activation", 2)?;
                st.serialize_field("kind", "expression")?;
                st.serialize_field("source", &e.to_string())?;
                st.end()
            }
        }
    }
}

/// `tanh(g x) / x`, equal to `g` at `x = 0`.
pub fn tau(gain: f64, x: f64) -> f64 {
    let u = gain * x;
    if u.abs() < TAU_SERIES_THRESHOLD {
        let g3 = gain * gain * gain;
        let x2 = x * x;
        gain - g3 * x2 / 3.0 + 2.0 * g3 * gain * gain * x2 * x2 / 15.0
    } else {
        u.tanh() / x
    }
}

impl Activation {
    pub fn parse_expression(source: &str) -> Result<Self> {
        let e = Expression::parse(source).map_err(|source| Error::Parse { component: 1, source })?;
        if e.max_var() > 1 {
            return Err(Error::VariableOutOfRange { component: 1, index: e.max_var(), dim: 1 });
        }
        Ok(Activation::Expression(e))
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        let v = match self {
            Activation::Tanh { gain } => (gain * x).tanh(),
            Activation::Linear => x,
            Activation::Expression(e) => e.eval(&[x])?,
        };
        finite(v, x)
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        let d = match self {
            Activation::Tanh { gain } => {
                let s = sech(gain * x);
                gain * s * s
            }
            Activation::Linear => 1.0,
            Activation::Expression(e) => {
                if e.uses_var(1) {
                    e.eval_dual(&[x], 1)?.deriv
                } else {
                    0.0
                }
            }
        };
        finite(d, x)
    }

    /// Mean slope `∫₀¹ μ'(c + s h) ds` over `[c, c + h]`, evaluated without
    /// cancellation for the closed-form kinds.
    pub fn secant_slope(&self, c: f64, h: f64) -> Result<f64> {
        if h == 0.0 {
            return self.derivative(c);
        }
        let v = match self {
            Activation::Tanh { gain } => {
                // tanh(a + u) − tanh(a) = tanh(u) sech²(a) / (1 + tanh(a) tanh(u))
                let a = gain * c;
                let ta = a.tanh();
                let s = sech(a);
                tau(*gain, h) * s * s / (1.0 + ta * (gain * h).tanh())
            }
            Activation::Linear => 1.0,
            Activation::Expression(_) => {
                let out = adaptive_gauss_legendre(
                    |s, out: &mut [f64]| {
                        out[0] = self.derivative(c + s * h)?;
                        Ok::<_, Error>(())
                    },
                    1,
                    0.0,
                    1.0,
                    DEFAULT_QUAD_TOL,
                    crate::ray::DEFAULT_MAX_DEPTH,
                )?;
                if !out.converged {
                    return Err(Error::QuadratureNonConvergence {
                        depth: crate::ray::DEFAULT_MAX_DEPTH,
                        point: vec![c, h],
                    });
                }
                out.values[0]
            }
        };
        finite(v, c + h)
    }

    fn describe(&self, arg: &str) -> String {
        match self {
            Activation::Tanh { gain } => format!("tanh({gain} * ({arg}))"),
            Activation::Linear => format!("({arg})"),
            Activation::Expression(e) => format!("[{e}](x1 := {arg})"),
        }
    }
}

fn finite(v: f64, x: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { value: v, point: vec![x] })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopfieldNetwork {
    decay: Vec<f64>,
    weights: SquareMatrix,
    coupling: Option<SquareMatrix>,
    bias: Vec<f64>,
    activations: Vec<Activation>,
    inputs: Vec<f64>,
    x_star: Option<Vec<f64>>,
}

impl HopfieldNetwork {
    pub fn new(decay: Vec<f64>, weights: SquareMatrix, bias: Vec<f64>, activations: Vec<Activation>) -> Result<Self> {
        let n = decay.len();
        if n == 0 {
            return Err(Error::InvalidArgument("network needs at least one unit".into()));
        }
        for (name, len) in [("weights", weights.dim()), ("theta", bias.len()), ("activations", activations.len())] {
            if len != n {
                return Err(Error::InvalidArgument(format!("{name} has dimension {len}, expected {n}")));
            }
        }
        if let Some((i, a)) = decay.iter().enumerate().find(|(_, a)| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidArgument(format!("decay rate a{} = {a} must be positive", i + 1)));
        }
        if weights.as_slice().iter().chain(&bias).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("weights and biases must be finite".into()));
        }
        for act in &activations {
            if let Activation::Tanh { gain } = act {
                if !(gain.is_finite() && *gain > 0.0) {
                    return Err(Error::InvalidArgument(format!("tanh gain must be positive, got {gain}")));
                }
            }
        }
        Ok(Self { decay, weights, coupling: None, bias, activations, inputs: vec![0.0; n], x_star: None })
    }

    pub fn with_coupling(mut self, coupling: SquareMatrix) -> Result<Self> {
        if coupling.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: coupling.dim() });
        }
        if coupling.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("coupling must be finite".into()));
        }
        self.coupling = Some(coupling);
        Ok(self)
    }

    /// Constant external inputs; only all-zero inputs compile.
    pub fn with_inputs(mut self, inputs: Vec<f64>) -> Result<Self> {
        if inputs.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: inputs.len() });
        }
        self.inputs = inputs;
        Ok(self)
    }

    pub fn with_equilibrium(mut self, x_star: Vec<f64>) -> Result<Self> {
        if x_star.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x_star.len() });
        }
        self.x_star = Some(x_star);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.decay.len()
    }

    pub fn decay(&self) -> &[f64] {
        &self.decay
    }

    pub fn weights(&self) -> &SquareMatrix {
        &self.weights
    }

    pub fn coupling(&self) -> Option<&SquareMatrix> {
        self.coupling.as_ref()
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    pub fn x_star(&self) -> Option<&[f64]> {
        self.x_star.as_deref()
    }

    fn check_autonomous(&self) -> Result<()> {
        if self.inputs.iter().any(|v| *v != 0.0) {
            return Err(Error::Unsupported(
                "external inputs must be identically zero; only autonomous networks can be analysed".into(),
            ));
        }
        Ok(())
    }

    fn field(&self) -> HopfieldField {
        HopfieldField { net: self.clone() }
    }
}

/// Unshifted network dynamics.
#[derive(Debug, Clone)]
struct HopfieldField {
    net: HopfieldNetwork,
}

impl VectorField for HopfieldField {
    fn dim(&self) -> usize {
        self.net.dim()
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let net = &self.net;
        let n = net.dim();
        let mut nu = vec![0.0; n];
        for j in 0..n {
            nu[j] = net.activations[j].value(x[j] + net.bias[j])?;
        }
        let wnu = net.weights.mul_vec(&nu);
        let lx = net.coupling.as_ref().map(|l| l.mul_vec(x));
        for i in 0..n {
            out[i] = -net.decay[i] * x[i] + wnu[i] + net.inputs[i] + lx.as_ref().map_or(0.0, |v| v[i]);
        }
        Ok(())
    }

    fn jacobian(&self, x: &[f64], out: &mut SquareMatrix) -> Result<()> {
        let net = &self.net;
        let n = net.dim();
        let mut slope = vec![0.0; n];
        for j in 0..n {
            slope[j] = net.activations[j].derivative(x[j] + net.bias[j])?;
        }
        for i in 0..n {
            for j in 0..n {
                let l = net.coupling.as_ref().map_or(0.0, |c| c[(i, j)]);
                out[(i, j)] = l + net.weights[(i, j)] * slope[j];
            }
            out[(i, i)] -= net.decay[i];
        }
        Ok(())
    }

    fn components(&self) -> Vec<String> {
        let net = &self.net;
        let n = net.dim();
        (0..n)
            .map(|i| {
                let mut terms = vec![format!("-{} * x{}", net.decay[i], i + 1)];
                for j in 0..n {
                    if let Some(l) = &net.coupling {
                        if l[(i, j)] != 0.0 {
                            terms.push(format!("{} * x{}", l[(i, j)], j + 1));
                        }
                    }
                    let w = net.weights[(i, j)];
                    if w != 0.0 {
                        let arg = if net.bias[j] == 0.0 {
                            format!("x{}", j + 1)
                        } else {
                            format!("x{} + {}", j + 1, net.bias[j])
                        };
                        terms.push(format!("{w} * {}", net.activations[j].describe(&arg)));
                    }
                }
                terms.join(" + ")
            })
            .collect()
    }
}

/// Damped Newton iteration for `−a ⊙ x + L x + W ν(x) = 0` from `guess`.
pub fn find_equilibrium(net: &HopfieldNetwork, guess: &[f64]) -> Result<Vec<f64>> {
    let n = net.dim();
    if guess.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: guess.len() });
    }
    if guess.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("initial guess must be finite".into()));
    }
    net.check_autonomous()?;
    let field = net.field();
    let residual = |x: &[f64]| -> Result<(Vec<f64>, f64)> {
        let mut r = vec![0.0; n];
        field.eval(x, &mut r)?;
        let rn = norm(&r);
        Ok((r, rn))
    };

    let mut x = guess.to_vec();
    let (mut r, mut rn) = residual(&x)?;
    let mut jac = SquareMatrix::zeros(n);
    for _ in 0..NEWTON_MAX_ITERATIONS {
        if rn <= NEWTON_TOLERANCE {
            return Ok(x);
        }
        field.jacobian(&x, &mut jac)?;
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let step = solve(&jac, &neg).ok_or_else(|| Error::SingularJacobian { iterate: x.clone() })?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..NEWTON_MAX_HALVINGS {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, d)| a + lambda * d).collect();
            if let Ok((tr, tn)) = residual(&trial) {
                if tn < rn {
                    x = trial;
                    r = tr;
                    rn = tn;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if rn <= NEWTON_TOLERANCE {
        return Ok(x);
    }
    Err(Error::NewtonNoConvergence { iterations: NEWTON_MAX_ITERATIONS, residual: rn })
}

fn equilibrium(net: &HopfieldNetwork) -> Result<Vec<f64>> {
    match &net.x_star {
        Some(x) => Ok(x.clone()),
        None => find_equilibrium(net, &vec![0.0; net.dim()]),
    }
}

/// Compiles `net` into a system centred on its equilibrium (supplied, or found
/// by Newton iteration from the origin).
pub fn compile(net: &HopfieldNetwork, ball: BallRadius) -> Result<SystemDef> {
    net.check_autonomous()?;
    let x_star = equilibrium(net)?;
    let field = net.field();
    let label = format!("hopfield(n={})", net.dim());
    shift_field(Arc::new(field), ball, JacobianMode::Exact, label, &x_star)
}

/// β for a network, split into decay and connection parts: `D = −diag(a) + F`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopfieldBetas {
    pub profile: BetaProfile,
    /// `−a_i`
    pub decay: Vec<f64>,
    /// `F(y) = L + W diag(mean activation slopes)`
    pub connection: SquareMatrix,
}

impl HopfieldBetas {
    pub fn connection_diagonal(&self) -> Vec<f64> {
        (0..self.connection.dim()).map(|i| self.connection[(i, i)]).collect()
    }
}

/// β at `point` (equilibrium-centred coordinates) from the closed-form ray
/// integral of each activation.
pub fn theorem5_betas(net: &HopfieldNetwork, point: &[f64]) -> Result<HopfieldBetas> {
    let n = net.dim();
    if point.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: point.len() });
    }
    net.check_autonomous()?;
    let x_star = equilibrium(net)?;
    let mut slope = vec![0.0; n];
    for j in 0..n {
        slope[j] = net.activations[j].secant_slope(x_star[j] + net.bias[j], point[j])?;
    }
    let connection = SquareMatrix::from_fn(n, |i, j| {
        net.coupling.as_ref().map_or(0.0, |l| l[(i, j)]) + net.weights[(i, j)] * slope[j]
    });
    let mut d = connection.clone();
    for i in 0..n {
        d[(i, i)] -= net.decay[i];
    }
    let values = betas_from_matrix(&d, BetaVariant::Averaged);
    Ok(HopfieldBetas {
        profile: BetaProfile { point: point.to_vec(), values, variant: BetaVariant::Averaged, slack: 0.0 },
        decay: net.decay.iter().map(|a| -a).collect(),
        connection,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::criteria::{beta_profile, classify, Classification};
    use crate::ray::{ray_matrix, QuadratureConfig};
    use crate::sampling::SamplingPlan;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tanh3() -> Activation {
        Activation::Tanh { gain: 3.0 }
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(3.0, 0.0), 3.0);
        assert!((tau(3.0, 1.0) - 3f64.tanh()).abs() < 1e-15);
        assert!((tau(3.0, -2.0) - 6f64.tanh() / 2.0).abs() < 1e-15);
        // both branches agree at the switch
        let x = TAU_SERIES_THRESHOLD / 3.0;
        let series = tau(3.0, x * 0.999_999);
        let direct = (3.0 * x * 1.000_001).tanh() / (x * 1.000_001);
        assert!((series - direct).abs() < 1e-12);
    }

    #[test]
    fn tau_is_bounded_by_gain() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for k in 0..100_000 {
            let x: f64 = if k % 2 == 0 { rng.random_range(-1e-6..1e-6) } else { rng.random_range(-50.0..50.0) };
            let t = tau(3.0, x);
            assert!(t > 0.0 && t <= 3.0, "tau({x}) = {t}");
        }
        // series branch keeps full precision near zero
        assert_eq!(tau(3.0, 1e-12), 3.0);
        assert!((tau(3.0, 1e-9) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn activation_derivatives() {
        let a = tanh3();
        assert_eq!(a.derivative(0.0).unwrap(), 3.0);
        let e = Activation::parse_expression("tanh(3*x1)").unwrap();
        for x in [-2.0, -0.1, 0.0, 0.7, 4.0] {
            assert!((a.value(x).unwrap() - e.value(x).unwrap()).abs() < 1e-15);
            assert!((a.derivative(x).unwrap() - e.derivative(x).unwrap()).abs() < 1e-13);
            for h in [-1.5, 1e-3, 2.0] {
                let s1 = a.secant_slope(x, h).unwrap();
                let s2 = e.secant_slope(x, h).unwrap();
                let dq = (a.value(x + h).unwrap() - a.value(x).unwrap()) / h;
                assert!((s1 - s2).abs() < 1e-10, "{x} {h}");
                assert!((s1 - dq).abs() < 1e-10);
            }
        }
        assert!(Activation::parse_expression("x2").is_err());
    }

    #[test]
    fn two_neuron_ray_matrix_matches_closed_form() {
        let sys = corpus::hopfield_2();
        let q = QuadratureConfig::default();
        for x in [[0.3, -1.2], [-4.0, 5.0], [1e-5, 2.0]] {
            let d = ray_matrix(&sys, &x, &q).unwrap().entries;
            assert!((d[(0, 0)] - (-13.0 - tau(3.0, x[0]))).abs() < 1e-9);
            assert!((d[(1, 1)] - (-11.0 + tau(3.0, x[1]) / 5.0)).abs() < 1e-9);
            assert!((d[(0, 1)] - 1.0).abs() < 1e-12);
            assert!((d[(1, 0)] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_neuron_betas() {
        let net = corpus::hopfield_2_network();
        let b = theorem5_betas(&net, &[0.0, 0.0]).unwrap();
        assert!((b.profile.values[0] + 15.0).abs() < 1e-12);
        assert!((b.profile.values[1] + 47.0 / 5.0).abs() < 1e-12);
        assert_eq!(b.decay, vec![-10.0, -10.0]);
        let f = b.connection_diagonal();
        assert_eq!(f[0], -6.0);
        assert!((f[1] + 0.4).abs() < 1e-15);
        for x1 in [-3.0, -0.5, 0.2, 4.0] {
            let b = theorem5_betas(&net, &[x1, 1.0]).unwrap();
            assert!((b.profile.values[0] - (-12.0 - tau(3.0, x1))).abs() < 1e-12);
            assert!(b.profile.values[0] < -12.0);
        }
    }

    #[test]
    fn closed_form_and_ray_betas_agree() {
        let net = corpus::hopfield_2_network();
        let sys = compile(&net, BallRadius::Unbounded).unwrap();
        let q = QuadratureConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..1000 {
            let x = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
            let a = theorem5_betas(&net, &x).unwrap().profile.values;
            let b = beta_profile(&sys, &x, BetaVariant::Averaged, &q).unwrap().values;
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).abs() <= 1e-12, "{x:?}: {u} vs {v}");
            }
        }
    }

    #[test]
    fn zero_weights_decouple() {
        let net = HopfieldNetwork::new(
            vec![1.0, 2.0, 0.5],
            SquareMatrix::zeros(3),
            vec![0.3, -0.1, 2.0],
            vec![tanh3(), Activation::Linear, tanh3()],
        )
        .unwrap();
        assert_eq!(find_equilibrium(&net, &[4.0, -7.0, 1.0]).unwrap(), vec![0.0; 3]);
        let sys = compile(&net, BallRadius::Unbounded).unwrap();
        assert_eq!(sys.eval(&[1.0, 1.0, 1.0]).unwrap(), vec![-1.0, -2.0, -0.5]);
        let unit =
            HopfieldNetwork::new(vec![1.0; 2], SquareMatrix::zeros(2), vec![0.0; 2], vec![tanh3(), tanh3()]).unwrap();
        for x in [[0.0, 0.0], [3.0, -1.0]] {
            assert_eq!(theorem5_betas(&unit, &x).unwrap().profile.values, vec![-1.0, -1.0]);
        }
    }

    #[test]
    fn linear_network_is_global() {
        // β_i = −a_i + W_ii + ½ Σ (|W_ij| + |W_ji|): (−3 + 0.5 + 1, −4 − 1 + 1) = (−1.5, −4)
        let w = SquareMatrix::from_rows(&[vec![0.5, 1.5], vec![0.5, -1.0]]).unwrap();
        let net = HopfieldNetwork::new(vec![3.0, 4.0], w, vec![0.0; 2], vec![Activation::Linear; 2]).unwrap();
        assert_eq!(find_equilibrium(&net, &[1.0, 1.0]).unwrap(), vec![0.0, 0.0]);
        let b = theorem5_betas(&net, &[2.0, -1.0]).unwrap();
        assert_eq!(b.profile.values, vec![-1.5, -4.0]);
        let sys = compile(&net, BallRadius::Unbounded).unwrap();
        let plan =
            SamplingPlan { polar_radii: 8, polar_directions: 16, halton_points: 64, ..SamplingPlan::default_for(2) };
        let v = classify(&sys, BetaVariant::Averaged, &plan, &QuadratureConfig::default()).unwrap();
        assert_eq!(v.classification, Classification::GloballyAsymptoticallyStable);
    }

    #[test]
    fn newton_finds_shifted_equilibria() {
        let net = corpus::hopfield_2_network();
        let x = find_equilibrium(&net, &[0.5, 0.5]).unwrap();
        assert!(norm(&x) <= 1e-10);

        // a bias moves the equilibrium away from the origin
        let biased = HopfieldNetwork::new(
            vec![1.0, 1.0],
            SquareMatrix::from_rows(&[vec![0.5, -0.2], vec![0.3, 0.4]]).unwrap(),
            vec![0.4, -0.7],
            vec![tanh3(), tanh3()],
        )
        .unwrap();
        let x = find_equilibrium(&biased, &[0.0, 0.0]).unwrap();
        let mut r = vec![0.0; 2];
        biased.field().eval(&x, &mut r).unwrap();
        assert!(norm(&r) <= 1e-10);
        let sys = compile(&biased, BallRadius::Finite(1.0)).unwrap();
        assert!(norm(&sys.eval(&[0.0, 0.0]).unwrap()) <= 1e-10);
        // closed-form betas still agree with the quadrature after the shift
        let y = [0.3, -0.6];
        let a = theorem5_betas(&biased, &y).unwrap().profile.values;
        let b = beta_profile(&sys, &y, BetaVariant::Averaged, &QuadratureConfig::default()).unwrap().values;
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() < 1e-11);
        }
    }

    #[test]
    fn newton_failures() {
        // x' = −x + 1·x has J ≡ 0
        let net =
            HopfieldNetwork::new(vec![1.0], SquareMatrix::identity(1), vec![1.0], vec![Activation::Linear]).unwrap();
        assert!(matches!(find_equilibrium(&net, &[0.0]), Err(Error::SingularJacobian { .. })));
        assert!(matches!(find_equilibrium(&net, &[f64::NAN]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn invalid_networks() {
        let w = SquareMatrix::zeros(2);
        let acts = vec![tanh3(), tanh3()];
        assert!(HopfieldNetwork::new(vec![1.0, 0.0], w.clone(), vec![0.0; 2], acts.clone()).is_err());
        assert!(HopfieldNetwork::new(vec![1.0], w.clone(), vec![0.0; 2], acts.clone()).is_err());
        assert!(HopfieldNetwork::new(vec![1.0; 2], w.clone(), vec![0.0; 2], vec![Activation::Tanh { gain: -1.0 }; 2])
            .is_err());
        let net = HopfieldNetwork::new(vec![1.0; 2], w, vec![0.0; 2], acts).unwrap();
        let with_input = net.clone().with_inputs(vec![0.0, 0.5]).unwrap();
        assert!(matches!(compile(&with_input, BallRadius::Unbounded), Err(Error::Unsupported(_))));
        let off = net.with_equilibrium(vec![1.0, 0.0]).unwrap();
        assert!(matches!(compile(&off, BallRadius::Unbounded), Err(Error::NotEquilibrium { .. })));
    }
}
