//! Four-node Gauss-Legendre panels with adaptive bisection for vector-valued
//! integrands.

/// Nodes of the 4-point Gauss-Legendre rule on `[-1, 1]`.
pub const GL4_NODES: [f64; 4] =
    [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];

/// Matching weights, summing to 2.
pub const GL4_WEIGHTS: [f64; 4] =
    [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];

/// Hard cap on integrand evaluations per integration; panels still open when
/// it is reached are accepted unconverged.
pub const MAX_EVALUATIONS: usize = 1 << 18;

/// Outcome of an adaptive integration of an `m`-vector valued function.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveOutcome {
    pub values: Vec<f64>,
    /// Integrand evaluations performed.
    pub evaluations: usize,
    /// Sum over accepted panels of the largest entrywise refinement difference.
    pub error_estimate: f64,
    /// Deepest bisection level reached.
    pub max_depth_reached: u32,
    /// False when some panel hit the depth limit or the evaluation cap without
    /// meeting the tolerance.
    pub converged: bool,
}

struct Panel {
    sum: Vec<f64>,
    abs: Vec<f64>,
}

struct Integrator<'f, F> {
    f: &'f mut F,
    m: usize,
    tol_per_unit: f64,
    max_depth: u32,
    buf: Vec<f64>,
    out: AdaptiveOutcome,
}

impl<F, E> Integrator<'_, F>
where
    F: FnMut(f64, &mut [f64]) -> Result<(), E>,
{
    fn panel(&mut self, a: f64, b: f64) -> Result<Panel, E> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = vec![0.0; self.m];
        let mut abs = vec![0.0; self.m];
        for (node, w) in GL4_NODES.iter().zip(GL4_WEIGHTS) {
            (self.f)(mid + half * node, &mut self.buf)?;
            self.out.evaluations += 1;
            for ((s, a), v) in sum.iter_mut().zip(abs.iter_mut()).zip(&self.buf) {
                *s += w * half * v;
                *a += w * half * v.abs();
            }
        }
        Ok(Panel { sum, abs })
    }

    /// Accepts a split once it and its parent split both meet the tolerance, which
    /// guards against coarse and fine estimates agreeing by accident.
    fn refine(&mut self, a: f64, b: f64, coarse: Panel, depth: u32, parent_ok: bool) -> Result<(), E> {
        let mid = 0.5 * (a + b);
        let left = self.panel(a, mid)?;
        let right = self.panel(mid, b)?;
        let budget = self.tol_per_unit * (b - a);
        let mut worst = 0.0_f64;
        let mut ok = true;
        for k in 0..self.m {
            let fine = left.sum[k] + right.sum[k];
            let diff = (fine - coarse.sum[k]).abs();
            let floor = 128.0 * f64::EPSILON * (left.abs[k] + right.abs[k]);
            worst = worst.max(diff);
            if diff > budget.max(floor) {
                ok = false;
            }
        }
        let depth = depth + 1;
        self.out.max_depth_reached = self.out.max_depth_reached.max(depth);
        if (ok && parent_ok) || depth >= self.max_depth || self.out.evaluations >= MAX_EVALUATIONS {
            if !ok {
                self.out.converged = false;
            }
            // the rule's error scales with h^8, so one Richardson step sharpens accepted panels
            let extrapolate = if ok { 1.0 / 255.0 } else { 0.0 };
            for k in 0..self.m {
                let fine = left.sum[k] + right.sum[k];
                self.out.values[k] += fine + extrapolate * (fine - coarse.sum[k]);
            }
            self.out.error_estimate += worst;
            return Ok(());
        }
        self.refine(a, mid, left, depth, ok)?;
        self.refine(mid, b, right, depth, ok)
    }
}

/// Integrates `f` over `[a, b]`. `f(s, out)` writes the `m` integrand values at `s`.
///
/// A panel is accepted once its two halves agree with the whole panel to within
/// `tol` scaled by the panel's share of `[a, b]` (or to rounding level), at two
/// consecutive levels.
pub fn adaptive_gauss_legendre<F, E>(
    mut f: F,
    m: usize,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<AdaptiveOutcome, E>
where
    F: FnMut(f64, &mut [f64]) -> Result<(), E>,
{
    let mut it = Integrator {
        f: &mut f,
        m,
        tol_per_unit: tol / (b - a),
        max_depth,
        buf: vec![0.0; m],
        out: AdaptiveOutcome {
            values: vec![0.0; m],
            evaluations: 0,
            error_estimate: 0.0,
            max_depth_reached: 0,
            converged: true,
        },
    };
    let whole = it.panel(a, b)?;
    it.refine(a, b, whole, 0, false)?;
    Ok(it.out)
}

/// Single 4-node panel over `[a, b]`.
pub fn gauss_legendre_panel<F, E>(mut f: F, m: usize, a: f64, b: f64) -> Result<Vec<f64>, E>
where
    F: FnMut(f64, &mut [f64]) -> Result<(), E>,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut buf = vec![0.0; m];
    let mut sum = vec![0.0; m];
    for (node, w) in GL4_NODES.iter().zip(GL4_WEIGHTS) {
        f(mid + half * node, &mut buf)?;
        for (s, v) in sum.iter_mut().zip(&buf) {
            *s += w * half * v;
        }
    }
    Ok(sum)
}
