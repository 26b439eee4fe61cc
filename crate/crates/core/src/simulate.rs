//! Trajectory integration for empirical checks of verdicts.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::system::SystemDef;

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_ABS_TOL: f64 = 1e-9;
pub const DEFAULT_REL_TOL: f64 = 1e-9;
pub const DEFAULT_BLOW_UP: f64 = 1e6;
pub const DEFAULT_T_END: f64 = 20.0;
pub const CONVERGENCE_THRESHOLD: f64 = 1e-6;
/// Allowed increase of `V` between recorded steps.
pub const V_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Integrator {
    Rk4 { dt: f64 },
    Rkf45 { abs_tol: f64, rel_tol: f64 },
}

impl Integrator {
    pub fn rk4() -> Self {
        Integrator::Rk4 { dt: DEFAULT_DT }
    }

    pub fn rkf45() -> Self {
        Integrator::Rkf45 { abs_tol: DEFAULT_ABS_TOL, rel_tol: DEFAULT_REL_TOL }
    }
}

impl Default for Integrator {
    fn default() -> Self {
        Self::rk4()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub integrator: Integrator,
    /// State norm above which the trajectory is declared divergent.
    pub blow_up: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { integrator: Integrator::default(), blow_up: DEFAULT_BLOW_UP }
    }
}

impl IntegratorConfig {
    pub fn with_integrator(integrator: Integrator) -> Self {
        Self { integrator, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self.integrator {
            Integrator::Rk4 { dt } => dt.is_finite() && dt > 0.0,
            Integrator::Rkf45 { abs_tol, rel_tol } => {
                abs_tol.is_finite()
                    && rel_tol.is_finite()
                    && abs_tol >= 0.0
                    && rel_tol >= 0.0
                    && abs_tol + rel_tol > 0.0
            }
        };
        if !ok {
            return Err(Error::InvalidArgument(format!("invalid integrator settings {:?}", self.integrator)));
        }
        if self.blow_up.is_nan() || self.blow_up <= 0.0 {
            return Err(Error::InvalidArgument(format!("blow-up bound must be positive, got {}", self.blow_up)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// `½‖x(t)‖²` per recorded state.
    pub v_values: Vec<f64>,
    pub terminal_norm: f64,
    pub integrator: Integrator,
    pub diverged: bool,
}

impl TrajectoryRecord {
    pub fn terminal_state(&self) -> &[f64] {
        self.states.last().expect("a record holds at least the initial state")
    }

    /// Steps where `V` grew by more than `tol`.
    pub fn v_violations(&self, tol: f64) -> usize {
        self.v_values.windows(2).filter(|w| w[1] > w[0] + tol).count()
    }

    /// Writes `t,x1..xn,V` rows with a header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.states.first().map_or(0, Vec::len);
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.push("V".into());
        writeln!(w, "{}", header.join(","))?;
        for ((t, x), v) in self.times.iter().zip(&self.states).zip(&self.v_values) {
            write!(w, "{t}")?;
            for c in x {
                write!(w, ",{c}")?;
            }
            writeln!(w, ",{v}")?;
        }
        Ok(())
    }
}

fn lyapunov(x: &[f64]) -> f64 {
    0.5 * x.iter().map(|v| v * v).sum::<f64>()
}

fn axpy(out: &mut [f64], x: &[f64], a: f64, k: &[f64]) {
    for ((o, xi), ki) in out.iter_mut().zip(x).zip(k) {
        *o = xi + a * ki;
    }
}

/// Outcome of one step attempt.
enum Step {
    Ok,
    Diverged,
}

fn eval_or_diverge(sys: &SystemDef, x: &[f64], out: &mut [f64]) -> Result<Step> {
    match sys.eval_into(x, out) {
        Ok(()) => Ok(Step::Ok),
        Err(Error::NonFinite { .. }) => Ok(Step::Diverged),
        Err(e) => Err(e),
    }
}

struct Rk4 {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Rk4 {
    fn new(n: usize) -> Self {
        Self { k: std::array::from_fn(|_| vec![0.0; n]), tmp: vec![0.0; n] }
    }

    fn step(&mut self, sys: &SystemDef, x: &mut [f64], h: f64) -> Result<Step> {
        let [k1, k2, k3, k4] = &mut self.k;
        if let Step::Diverged = eval_or_diverge(sys, x, k1)? {
            return Ok(Step::Diverged);
        }
        axpy(&mut self.tmp, x, 0.5 * h, k1);
        if let Step::Diverged = eval_or_diverge(sys, &self.tmp, k2)? {
            return Ok(Step::Diverged);
        }
        axpy(&mut self.tmp, x, 0.5 * h, k2);
        if let Step::Diverged = eval_or_diverge(sys, &self.tmp, k3)? {
            return Ok(Step::Diverged);
        }
        axpy(&mut self.tmp, x, h, k3);
        if let Step::Diverged = eval_or_diverge(sys, &self.tmp, k4)? {
            return Ok(Step::Diverged);
        }
        for i in 0..x.len() {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        Ok(Step::Ok)
    }
}

// Fehlberg 4(5) tableau.
const RKF_A: [[f64; 5]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 4.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
];
const RKF_B4: [f64; 6] = [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0];
const RKF_B5: [f64; 6] = [16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0];

struct Rkf45 {
    k: [Vec<f64>; 6],
    tmp: Vec<f64>,
    low: Vec<f64>,
    high: Vec<f64>,
}

impl Rkf45 {
    fn new(n: usize) -> Self {
        Self { k: std::array::from_fn(|_| vec![0.0; n]), tmp: vec![0.0; n], low: vec![0.0; n], high: vec![0.0; n] }
    }

    /// Tries a step of size `h`; returns the scaled error norm, with the
    /// fifth-order candidate left in `self.high`.
    #[allow(clippy::needless_range_loop)]
    fn attempt(&mut self, sys: &SystemDef, x: &[f64], h: f64, abs_tol: f64, rel_tol: f64) -> Result<Option<f64>> {
        let n = x.len();
        for s in 0..6 {
            for i in 0..n {
                let mut acc = x[i];
                for (r, a) in RKF_A[s].iter().enumerate().take(s) {
                    acc += h * a * self.k[r][i];
                }
                self.tmp[i] = acc;
            }
            if let Step::Diverged = eval_or_diverge(sys, &self.tmp, &mut self.k[s])? {
                return Ok(None);
            }
        }
        let mut err: f64 = 0.0;
        for i in 0..n {
            let mut lo = x[i];
            let mut hi = x[i];
            for s in 0..6 {
                lo += h * RKF_B4[s] * self.k[s][i];
                hi += h * RKF_B5[s] * self.k[s][i];
            }
            self.low[i] = lo;
            self.high[i] = hi;
            let scale = abs_tol + rel_tol * x[i].abs().max(hi.abs());
            err = err.max((hi - lo).abs() / scale);
        }
        Ok(Some(err))
    }
}

/// Integrates from `x0` over `[0, t_end]`, calling `observe(t, x)` on the
/// initial state and every accepted step. Returns `true` if the run diverged.
pub fn integrate_with<F>(
    sys: &SystemDef,
    x0: &[f64],
    t_end: f64,
    cfg: &IntegratorConfig,
    mut observe: F,
) -> Result<bool>
where
    F: FnMut(f64, &[f64]),
{
    let n = sys.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x0.len() });
    }
    if let Some(v) = x0.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite { value: *v, point: x0.to_vec() });
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidArgument(format!("t_end must be positive, got {t_end}")));
    }
    cfg.validate()?;

    let blown = |x: &[f64]| x.iter().any(|v| !v.is_finite()) || norm(x) > cfg.blow_up;
    let mut x = x0.to_vec();
    let mut t = 0.0;
    observe(t, &x);
    if blown(&x) {
        return Ok(true);
    }

    match cfg.integrator {
        Integrator::Rk4 { dt } => {
            let mut rk = Rk4::new(n);
            let steps = (t_end / dt).ceil() as u64;
            for k in 1..=steps {
                let t_next = if k == steps { t_end } else { k as f64 * dt };
                if let Step::Diverged = rk.step(sys, &mut x, t_next - t)? {
                    return Ok(true);
                }
                if blown(&x) {
                    return Ok(true);
                }
                t = t_next;
                observe(t, &x);
            }
        }
        Integrator::Rkf45 { abs_tol, rel_tol } => {
            let mut rk = Rkf45::new(n);
            let mut h = (t_end / 100.0).min(1e-2);
            while t < t_end {
                if t + h > t_end {
                    h = t_end - t;
                }
                if h <= 1e-14 * t.abs().max(1.0) {
                    return Err(Error::StepSizeUnderflow { t });
                }
                let Some(err) = rk.attempt(sys, &x, h, abs_tol, rel_tol)? else {
                    // non-finite stage: shrink and retry
                    h *= 0.25;
                    continue;
                };
                if err <= 1.0 {
                    t = if t_end - (t + h) <= 1e-14 * t_end { t_end } else { t + h };
                    x.copy_from_slice(&rk.high);
                    if blown(&x) {
                        return Ok(true);
                    }
                    observe(t, &x);
                }
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h *= factor;
            }
        }
    }
    Ok(false)
}

/// Integrates and records the full trajectory.
pub fn integrate(sys: &SystemDef, x0: &[f64], t_end: f64, cfg: &IntegratorConfig) -> Result<TrajectoryRecord> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut v_values = Vec::new();
    let diverged = integrate_with(sys, x0, t_end, cfg, |t, x| {
        times.push(t);
        states.push(x.to_vec());
        v_values.push(lyapunov(x));
    })?;
    let terminal_norm = states.last().map_or(f64::INFINITY, |s| norm(s));
    Ok(TrajectoryRecord { times, states, v_values, terminal_norm, integrator: cfg.integrator, diverged })
}

/// Per-trajectory outcome without the stored path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySummary {
    pub x0: Vec<f64>,
    pub terminal_state: Vec<f64>,
    pub terminal_norm: f64,
    pub converged: bool,
    pub diverged: bool,
    pub steps: usize,
    pub v_violations: usize,
}

impl TrajectorySummary {
    pub fn from_record(record: &TrajectoryRecord) -> Self {
        let terminal_norm = if record.diverged { f64::INFINITY } else { record.terminal_norm };
        Self {
            x0: record.states[0].clone(),
            terminal_state: record.terminal_state().to_vec(),
            terminal_norm,
            converged: !record.diverged && terminal_norm < CONVERGENCE_THRESHOLD,
            diverged: record.diverged,
            steps: record.times.len() - 1,
            v_violations: record.v_violations(V_TOLERANCE),
        }
    }
}

pub fn summarize_trajectory(
    sys: &SystemDef,
    x0: &[f64],
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<TrajectorySummary> {
    let mut steps = 0usize;
    let mut last_v = f64::NAN;
    let mut v_violations = 0;
    let mut terminal = x0.to_vec();
    let diverged = integrate_with(sys, x0, t_end, cfg, |_, x| {
        let v = lyapunov(x);
        if v > last_v + V_TOLERANCE {
            v_violations += 1;
        }
        last_v = v;
        steps += 1;
        terminal.copy_from_slice(x);
    })?;
    let terminal_norm = if diverged { f64::INFINITY } else { norm(&terminal) };
    Ok(TrajectorySummary {
        x0: x0.to_vec(),
        terminal_state: terminal,
        terminal_norm,
        converged: !diverged && terminal_norm < CONVERGENCE_THRESHOLD,
        diverged,
        steps: steps.saturating_sub(1),
        v_violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceSummary {
    pub count: usize,
    pub radius: f64,
    pub t_end: f64,
    pub converged: usize,
    pub fraction_converged: f64,
    pub diverged: usize,
    pub max_terminal_norm: f64,
    /// Steps (over all trajectories) where `V` grew by more than the tolerance.
    pub v_violations: usize,
    pub trajectories_with_v_violations: usize,
    pub trajectories: Vec<TrajectorySummary>,
}

impl ConvergenceSummary {
    pub fn from_trajectories(radius: f64, t_end: f64, trajectories: Vec<TrajectorySummary>) -> Self {
        let count = trajectories.len();
        let converged = trajectories.iter().filter(|t| t.converged).count();
        Self {
            count,
            radius,
            t_end,
            converged,
            fraction_converged: if count == 0 { 0.0 } else { converged as f64 / count as f64 },
            diverged: trajectories.iter().filter(|t| t.diverged).count(),
            max_terminal_norm: trajectories.iter().map(|t| t.terminal_norm).fold(0.0, f64::max),
            v_violations: trajectories.iter().map(|t| t.v_violations).sum(),
            trajectories_with_v_violations: trajectories.iter().filter(|t| t.v_violations > 0).count(),
            trajectories,
        }
    }
}

/// `count` points uniformly distributed in the closed ball of radius `radius`.
pub fn sample_in_ball(n: usize, radius: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let len = norm(&z);
            let u: f64 = rng.random();
            let r = radius * u.powf(1.0 / n as f64);
            if len == 0.0 {
                vec![0.0; n]
            } else {
                z.iter().map(|v| r * v / len).collect()
            }
        })
        .collect()
}

/// Integrates each initial condition in parallel; results keep input order.
pub fn run_trajectories(
    sys: &SystemDef,
    initial: &[Vec<f64>],
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec<TrajectorySummary>> {
    let results: Vec<Result<TrajectorySummary>> =
        initial.par_iter().map(|x0| summarize_trajectory(sys, x0, t_end, cfg)).collect();
    results.into_iter().collect()
}

/// Integrates `count` seeded random initial conditions from the ball of
/// radius `radius` (`0` means the origin only).
pub fn convergence_experiment(
    sys: &SystemDef,
    radius: f64,
    count: usize,
    t_end: f64,
    seed: u64,
    cfg: &IntegratorConfig,
) -> Result<ConvergenceSummary> {
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be non-negative, got {radius}")));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let initial = sample_in_ball(sys.dim(), radius, count, seed);
    let trajectories = run_trajectories(sys, &initial, t_end, cfg)?;
    Ok(ConvergenceSummary::from_trajectories(radius, t_end, trajectories))
}
