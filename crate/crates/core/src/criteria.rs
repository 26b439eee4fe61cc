//! β-profiles, sampled stability verdicts, certified-radius search and the
//! Krasovskii baseline.
//!
//! With `V(x) = ½‖x‖²` and `g(x) = D(x) x`, Young's inequality on the
//! off-diagonal products gives `V'(x) ≤ Σ β_i(x) x_i²`. A verdict is the
//! strongest of the following that holds on every sample of the ball:
//!
//! * all `β_i ≤ 0` → stable,
//! * all `β_i < 0` → asymptotically stable,
//! * all `β_i < 0` on an unbounded ball → globally asymptotically stable
//!   (sampled up to the plan's horizon).
//!
//! "Strictly negative" means `β_i < −(margin + slack)` where `slack` is the
//! quadrature error bound carried by the ray matrix; the non-strict test uses
//! `β_i ≤ margin + slack`.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{norm, symmetric_eigenvalues, SquareMatrix};
use crate::ray::{ray_matrix, QuadratureConfig};
use crate::sampling::SamplingPlan;
use crate::system::{BallRadius, SystemDef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BetaVariant {
    /// `β_i = d_ii + ½ Σ_{j≠i} (|d_ij| + |d_ji|)`.
    #[serde(rename = "theorem2")]
    Averaged,
    /// Lakshmikantham-Matrosov-Sivasundaram row sums, `β_i = d_ii + Σ_{j≠i} |d_ij|`,
    /// required only where `x_i² ≥ x_j²` for all `j`.
    #[serde(rename = "lakshmikantham")]
    RowSum,
}

impl BetaVariant {
    pub fn key(self) -> &'static str {
        match self {
            BetaVariant::Averaged => "theorem2",
            BetaVariant::RowSum => "lakshmikantham",
        }
    }

    /// Whether component `i` is constrained at `x` under this variant.
    pub fn applies(self, x: &[f64], i: usize) -> bool {
        match self {
            BetaVariant::Averaged => true,
            BetaVariant::RowSum => {
                let xi = x[i] * x[i];
                x.iter().all(|v| xi >= v * v)
            }
        }
    }
}

/// `β` computed from a ray matrix.
pub fn betas_from_matrix(d: &SquareMatrix, variant: BetaVariant) -> Vec<f64> {
    let n = d.dim();
    (0..n)
        .map(|i| {
            let off: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| match variant {
                    BetaVariant::Averaged => 0.5 * (d[(i, j)].abs() + d[(j, i)].abs()),
                    BetaVariant::RowSum => d[(i, j)].abs(),
                })
                .sum();
            d[(i, i)] + off
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaProfile {
    pub point: Vec<f64>,
    pub values: Vec<f64>,
    pub variant: BetaVariant,
    /// Quadrature error allowance on each `β_i`.
    pub slack: f64,
}

pub fn beta_profile(
    sys: &SystemDef,
    point: &[f64],
    variant: BetaVariant,
    quad: &QuadratureConfig,
) -> Result<BetaProfile> {
    let d = ray_matrix(sys, point, quad)?;
    let values = betas_from_matrix(&d.entries, variant);
    Ok(BetaProfile { point: point.to_vec(), values, variant, slack: sys.dim() as f64 * d.quad_error })
}

/// `V'(x) = Σ x_i g_i(x)` for `V = ½‖x‖²`.
pub fn lyapunov_derivative(sys: &SystemDef, point: &[f64]) -> Result<f64> {
    let g = sys.eval(point)?;
    Ok(point.iter().zip(&g).map(|(x, g)| x * g).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    GloballyAsymptoticallyStable,
    AsymptoticallyStable,
    Stable,
    Inconclusive,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::GloballyAsymptoticallyStable => "globally_asymptotically_stable",
            Classification::AsymptoticallyStable => "asymptotically_stable",
            Classification::Stable => "stable",
            Classification::Inconclusive => "inconclusive",
        }
    }

    pub fn is_asymptotic(self) -> bool {
        matches!(self, Classification::GloballyAsymptoticallyStable | Classification::AsymptoticallyStable)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CertifiedRadius {
    Finite(f64),
    Unbounded,
}

impl CertifiedRadius {
    pub fn finite(self) -> Option<f64> {
        match self {
            CertifiedRadius::Finite(r) => Some(r),
            CertifiedRadius::Unbounded => None,
        }
    }
}

impl Serialize for CertifiedRadius {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CertifiedRadius::Finite(r) => s.serialize_f64(*r),
            CertifiedRadius::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `β_i ≤ 0`
    NonStrict,
    /// `β_i < 0`
    Strict,
}

/// A sample at which some `β_i` breaks `condition`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub point: Vec<f64>,
    /// 1-based component index.
    pub component: usize,
    pub beta: f64,
    pub condition: Condition,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentEvidence {
    pub component: usize,
    /// Samples at which this component was constrained.
    pub tested: usize,
    pub sup: f64,
    pub argmax: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub samples: usize,
    pub sampled_radius: f64,
    pub horizon: Option<f64>,
    pub margin: f64,
    pub components: Vec<ComponentEvidence>,
    /// Largest sample norm below the first strict violation (or the full range).
    pub strict_radius: f64,
    pub non_strict_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub variant: BetaVariant,
    pub classification: Classification,
    pub certified_radius: CertifiedRadius,
    pub evidence: Evidence,
    pub violation_witness: Option<Witness>,
}

struct Tally {
    min_norm: f64,
    witness: Option<Witness>,
}

impl Tally {
    fn new() -> Self {
        Self { min_norm: f64::INFINITY, witness: None }
    }

    fn record(&mut self, r: f64, w: Witness) {
        if r < self.min_norm {
            self.min_norm = r;
            self.witness = Some(w);
        }
    }
}

/// β at each point, in input order.
pub fn beta_field(
    sys: &SystemDef,
    points: &[Vec<f64>],
    variant: BetaVariant,
    quad: &QuadratureConfig,
) -> Result<Vec<BetaProfile>> {
    let results: Vec<Result<BetaProfile>> = points.par_iter().map(|p| beta_profile(sys, p, variant, quad)).collect();
    results.into_iter().collect()
}

/// Samples `β` over the system's ball and returns the strongest verdict.
///
/// When some sample fails, the verdict falls back to the largest sampled
/// sub-ball that lies strictly inside the first failure.
pub fn classify(
    sys: &SystemDef,
    variant: BetaVariant,
    plan: &SamplingPlan,
    quad: &QuadratureConfig,
) -> Result<StabilityVerdict> {
    let n = sys.dim();
    let ball = sys.ball();
    let points = plan.points(n, ball)?;
    if points.is_empty() {
        return Err(Error::EmptySamplingPlan);
    }
    let profiles = beta_field(sys, &points, variant, quad)?;

    let mut comps: Vec<ComponentEvidence> = (1..=n)
        .map(|component| ComponentEvidence { component, tested: 0, sup: f64::NEG_INFINITY, argmax: Vec::new() })
        .collect();
    let mut strict = Tally::new();
    let mut weak = Tally::new();
    let norms: Vec<f64> = points.iter().map(|p| norm(p)).collect();

    for (prof, &r) in profiles.iter().zip(&norms) {
        let allowance = plan.margin + prof.slack;
        for (i, &b) in prof.values.iter().enumerate() {
            if !variant.applies(&prof.point, i) {
                continue;
            }
            let c = &mut comps[i];
            c.tested += 1;
            if b > c.sup {
                c.sup = b;
                c.argmax = prof.point.clone();
            }
            let w = |condition| Witness { point: prof.point.clone(), component: i + 1, beta: b, condition };
            if b >= -allowance {
                strict.record(r, w(Condition::Strict));
            }
            if b > allowance {
                weak.record(r, w(Condition::NonStrict));
            }
        }
    }

    let outer = plan.outer_radius(ball);
    let inner_radius = |fail: f64| -> f64 {
        if fail.is_infinite() {
            outer
        } else {
            norms.iter().copied().filter(|&r| r < fail).fold(0.0, f64::max)
        }
    };
    let strict_radius = inner_radius(strict.min_norm);
    let non_strict_radius = inner_radius(weak.min_norm);
    let full = match ball {
        BallRadius::Finite(r) => CertifiedRadius::Finite(r),
        BallRadius::Unbounded => CertifiedRadius::Unbounded,
    };

    let (classification, certified_radius, violation_witness) = if strict.witness.is_none() {
        let class = match ball {
            BallRadius::Unbounded => Classification::GloballyAsymptoticallyStable,
            BallRadius::Finite(_) => Classification::AsymptoticallyStable,
        };
        (class, full, None)
    } else if strict_radius > 0.0 {
        (Classification::AsymptoticallyStable, CertifiedRadius::Finite(strict_radius), strict.witness)
    } else if weak.witness.is_none() {
        (Classification::Stable, full, strict.witness)
    } else if non_strict_radius > 0.0 {
        (Classification::Stable, CertifiedRadius::Finite(non_strict_radius), weak.witness)
    } else {
        (Classification::Inconclusive, CertifiedRadius::Finite(0.0), weak.witness)
    };

    Ok(StabilityVerdict {
        variant,
        classification,
        certified_radius,
        evidence: Evidence {
            samples: points.len(),
            sampled_radius: outer,
            horizon: matches!(ball, BallRadius::Unbounded).then_some(plan.horizon),
            margin: plan.margin,
            components: comps,
            strict_radius,
            non_strict_radius,
        },
        violation_witness,
    })
}

/// Whether every sampled `β_i` on the ball of radius `r` is strictly negative.
pub fn ball_is_strictly_negative(
    sys: &SystemDef,
    r: f64,
    plan: &SamplingPlan,
    quad: &QuadratureConfig,
) -> Result<bool> {
    let ball = if r == 0.0 { None } else { Some(BallRadius::Finite(r)) };
    let points = match ball {
        Some(b) => plan.points(sys.dim(), b)?,
        None => vec![vec![0.0; sys.dim()]],
    };
    let verdicts: Vec<Result<bool>> = points
        .par_iter()
        .map(|p| {
            let prof = beta_profile(sys, p, BetaVariant::Averaged, quad)?;
            let allowance = plan.margin + prof.slack;
            Ok(prof.values.iter().all(|&b| b < -allowance))
        })
        .collect();
    for v in verdicts {
        if !v? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusSearch {
    pub radius: f64,
    pub r_max: f64,
    pub tol: f64,
    pub ball_tests: usize,
    pub diagnostic: Option<String>,
}

/// Largest radius in `(0, r_max]` whose sampled ball has all `β_i < 0`.
///
/// The search bisects over multiples of `tol`, so for a fixed plan the result
/// is a non-decreasing function of `r_max`.
pub fn certified_radius_search(
    sys: &SystemDef,
    r_max: f64,
    tol: f64,
    plan: &SamplingPlan,
    quad: &QuadratureConfig,
) -> Result<RadiusSearch> {
    if !(r_max.is_finite() && r_max > 0.0) {
        return Err(Error::InvalidArgument(format!("r_max must be positive, got {r_max}")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let mut tests = 0;
    let mut passes = |r: f64| -> Result<bool> {
        tests += 1;
        ball_is_strictly_negative(sys, r, plan, quad)
    };
    let mut out = RadiusSearch { radius: r_max, r_max, tol, ball_tests: 0, diagnostic: None };
    if passes(r_max)? {
        out.ball_tests = tests;
        return Ok(out);
    }
    if !passes(0.0)? {
        out.radius = 0.0;
        out.ball_tests = tests;
        out.diagnostic = Some("β is not strictly negative at the origin; no ball passes".into());
        return Ok(out);
    }
    let top = (r_max / tol).floor() as u64;
    let (mut lo, mut hi) = (0u64, top + 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if passes(mid as f64 * tol)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out.radius = lo as f64 * tol;
    out.ball_tests = tests;
    if lo == 0 {
        out.diagnostic = Some(format!("no sampled ball of radius ≥ {tol} passes"));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum KrasovskiiVerdict {
    NegativeDefiniteOnSamples,
    IndefiniteWitness { point: Vec<f64>, lambda_max: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KrasovskiiReport {
    pub p: SquareMatrix,
    /// Sampled supremum of `λ_max(P J(x) + Jᵀ(x) P)`.
    pub max_eig_field: f64,
    pub argmax: Vec<f64>,
    pub samples: usize,
    pub verdict: KrasovskiiVerdict,
    pub classification: Classification,
}

/// Samples `λ_max(P J(x) + Jᵀ(x) P)`; `p` defaults to the identity.
pub fn krasovskii_check(sys: &SystemDef, p: Option<&SquareMatrix>, plan: &SamplingPlan) -> Result<KrasovskiiReport> {
    let n = sys.dim();
    let p = match p {
        Some(p) => p.clone(),
        None => SquareMatrix::identity(n),
    };
    if p.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p.dim() });
    }
    if !p.is_symmetric(1e-12) {
        return Err(Error::NotPositiveDefinite("P is not symmetric".into()));
    }
    let pev = symmetric_eigenvalues(&p)?;
    if pev[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite(format!("smallest eigenvalue {}", pev[0])));
    }

    let points = plan.points(n, sys.ball())?;
    let lambdas: Vec<Result<f64>> = points
        .par_iter()
        .map(|x| {
            let j = sys.jacobian(x)?.entries;
            let pj = p.matmul(&j);
            let m = pj.add(&pj.transpose());
            Ok(*symmetric_eigenvalues(&m)?.last().expect("n ≥ 1"))
        })
        .collect();

    let mut sup = f64::NEG_INFINITY;
    let mut argmax = Vec::new();
    let mut witness: Option<(f64, Vec<f64>, f64)> = None;
    for (x, lam) in points.iter().zip(lambdas) {
        let lam = lam?;
        if lam > sup {
            sup = lam;
            argmax = x.clone();
        }
        if lam >= -plan.margin {
            let r = norm(x);
            if witness.as_ref().is_none_or(|(wr, _, _)| r < *wr) {
                witness = Some((r, x.clone(), lam));
            }
        }
    }
    let (verdict, classification) = match witness {
        None => (
            KrasovskiiVerdict::NegativeDefiniteOnSamples,
            match sys.ball() {
                BallRadius::Unbounded => Classification::GloballyAsymptoticallyStable,
                BallRadius::Finite(_) => Classification::AsymptoticallyStable,
            },
        ),
        Some((_, point, lambda_max)) => {
            (KrasovskiiVerdict::IndefiniteWitness { point, lambda_max }, Classification::Inconclusive)
        }
    };
    Ok(KrasovskiiReport { p, max_eig_field: sup, argmax, samples: points.len(), verdict, classification })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::expr::sech;
    use crate::system::{build_system, JacobianMode};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn small_plan(n: usize) -> SamplingPlan {
        SamplingPlan { polar_radii: 16, polar_directions: 32, halton_points: 128, ..SamplingPlan::default_for(n) }
    }

    #[test]
    fn beta_examples() {
        let s = corpus::example_2_1();
        let b = beta_profile(&s, &[1.0, 1.0], BetaVariant::Averaged, &q()).unwrap();
        assert!((b.values[0] + 1.0).abs() < 1e-13);
        assert!((b.values[1] + 1.0).abs() < 1e-13);

        let s = corpus::example_2_2();
        let b = beta_profile(&s, &[0.0, 0.0], BetaVariant::Averaged, &q()).unwrap();
        assert!((b.values[0] + 0.5).abs() < 1e-14);
        assert!((b.values[1] + 4.5).abs() < 1e-14);

        // row sums: -4 + sech(x1) + |4| = sech(x1) > 0
        for x in [[0.0, 0.0], [1.5, -2.0], [-3.0, 0.5]] {
            let b = beta_profile(&s, &x, BetaVariant::RowSum, &q()).unwrap();
            assert!((b.values[0] - sech(x[0])).abs() < 1e-9, "{x:?}");
            assert!(b.values[0] > 0.0);
        }
    }

    #[test]
    fn beta_symmetric_under_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.random_range(1..6);
            let d = SquareMatrix::from_fn(n, |_, _| rng.random_range(-5.0..5.0));
            let a = betas_from_matrix(&d, BetaVariant::Averaged);
            let b = betas_from_matrix(&d.transpose(), BetaVariant::Averaged);
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).abs() < 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn variant_dominance(entries in proptest::collection::vec(-5f64..5.0, 16)) {
            let n = 4;
            let d = SquareMatrix::from_fn(n, |i, j| entries[i * n + j]);
            let avg = betas_from_matrix(&d, BetaVariant::Averaged);
            let row = betas_from_matrix(&d, BetaVariant::RowSum);
            for i in 0..n {
                let shift: f64 = (0..n).filter(|&j| j != i).map(|j| d[(j, i)].abs() - d[(i, j)].abs()).sum();
                prop_assert!(avg[i] <= row[i] + 0.5 * shift + 1e-12);
            }
        }
    }

    #[test]
    fn variants_coincide_on_symmetric_linear_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a: f64 = rng.random_range(-3.0..3.0);
            let b: f64 = rng.random_range(-3.0..3.0);
            let c: f64 = rng.random_range(-3.0..3.0);
            let srcs = [format!("{a}*x1 + {b}*x2"), format!("{b}*x1 + {c}*x2")];
            let s = build_system(2, &srcs, BallRadius::Unbounded, JacobianMode::Exact).unwrap();
            let x = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            let u = beta_profile(&s, &x, BetaVariant::Averaged, &q()).unwrap();
            let v = beta_profile(&s, &x, BetaVariant::RowSum, &q()).unwrap();
            for (p, r) in u.values.iter().zip(&v.values) {
                assert!((p - r).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lyapunov_derivative_examples() {
        let s = corpus::example_2_1();
        assert_eq!(lyapunov_derivative(&s, &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(lyapunov_derivative(&s, &[1.0, 1.0]).unwrap(), -2.0);
        let lin = build_system(3, &["-x1", "-x2", "-x3"], BallRadius::Unbounded, JacobianMode::Exact).unwrap();
        let x = [0.5, -2.0, 3.0];
        assert_eq!(lyapunov_derivative(&lin, &x).unwrap(), -(0.25 + 4.0 + 9.0));
    }

    #[test]
    fn linear_decay_is_global() {
        let s = build_system(2, &["-x1", "-x2"], BallRadius::Unbounded, JacobianMode::Exact).unwrap();
        let v = classify(&s, BetaVariant::Averaged, &small_plan(2), &q()).unwrap();
        assert_eq!(v.classification, Classification::GloballyAsymptoticallyStable);
        assert_eq!(v.certified_radius, CertifiedRadius::Unbounded);
        assert!(v.evidence.components.iter().all(|c| c.sup == -1.0));
        assert_eq!(v.evidence.horizon, Some(100.0));
        assert!(v.violation_witness.is_none());
    }

    #[test]
    fn example_21_small_ball_is_certified() {
        let s = corpus::example_2_1().with_ball(BallRadius::Finite(2.8));
        let v = classify(&s, BetaVariant::Averaged, &SamplingPlan::default_for(2), &q()).unwrap();
        assert_eq!(v.classification, Classification::AsymptoticallyStable);
        assert_eq!(v.certified_radius, CertifiedRadius::Finite(2.8));
    }

    #[test]
    fn example_21_large_ball_shrinks_to_sub_ball() {
        let s = corpus::example_2_1().with_ball(BallRadius::Finite(10.0));
        let v = classify(&s, BetaVariant::Averaged, &SamplingPlan::default_for(2), &q()).unwrap();
        assert_eq!(v.classification, Classification::AsymptoticallyStable);
        let r = v.certified_radius.finite().unwrap();
        let w = v.violation_witness.unwrap();
        // sampled radius: just below the smallest failing sample, within one grid step of √8
        assert!(r < norm(&w.point), "{r}");
        assert!((r - 8f64.sqrt()).abs() < 10.0 / 64.0, "{r}");
        // the witness really violates strict negativity when re-evaluated
        let again = beta_profile(&s, &w.point, BetaVariant::Averaged, &q()).unwrap();
        assert!(again.values[w.component - 1] >= -1e-9);
        assert_eq!(again.values[w.component - 1], w.beta);
        // the x1-axis at radius 8 is a violation: -2 + 8/2 = 2
        let b = beta_profile(&s, &[8.0, 0.0], BetaVariant::Averaged, &q()).unwrap();
        assert!((b.values[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_field_is_only_stable() {
        let s = build_system(1, &["0*x1"], BallRadius::Finite(1.0), JacobianMode::Exact).unwrap();
        let v = classify(&s, BetaVariant::Averaged, &small_plan(1), &q()).unwrap();
        assert_eq!(v.classification, Classification::Stable);
        assert_eq!(v.violation_witness.unwrap().condition, Condition::Strict);
        let r = certified_radius_search(&s, 1.0, 0.01, &small_plan(1), &q()).unwrap();
        assert_eq!(r.radius, 0.0);
        assert!(r.diagnostic.is_some());
    }

    #[test]
    fn unstable_field_is_inconclusive() {
        let s = build_system(1, &["x1"], BallRadius::Finite(1.0), JacobianMode::Exact).unwrap();
        let v = classify(&s, BetaVariant::Averaged, &small_plan(1), &q()).unwrap();
        assert_eq!(v.classification, Classification::Inconclusive);
        assert_eq!(v.certified_radius, CertifiedRadius::Finite(0.0));
        assert_eq!(v.violation_witness.unwrap().point, vec![0.0]);
    }

    #[test]
    fn radius_search_examples() {
        let plan = SamplingPlan::default_for(2);
        let r = certified_radius_search(&corpus::example_2_1(), 10.0, 1e-2, &plan, &q()).unwrap();
        assert!((r.radius - 8f64.sqrt()).abs() <= 2e-2, "{}", r.radius);
        let r = certified_radius_search(&corpus::example_2_2(), 10.0, 1e-2, &plan, &q()).unwrap();
        assert_eq!(r.radius, 10.0);
        assert_eq!(r.ball_tests, 1);
    }

    #[test]
    fn radius_search_is_monotone_in_r_max() {
        let plan = small_plan(2);
        let s = corpus::example_2_1();
        let mut last = 0.0;
        for r_max in [1.0, 2.0, 2.5, 3.0, 4.0, 6.0, 10.0] {
            let r = certified_radius_search(&s, r_max, 1e-2, &plan, &q()).unwrap().radius;
            assert!(r >= last, "r_max {r_max}: {r} < {last}");
            last = r;
        }
    }

    #[test]
    fn krasovskii_examples() {
        let lin = build_system(2, &["-x1", "-x2"], BallRadius::Unbounded, JacobianMode::Exact).unwrap();
        let rep = krasovskii_check(&lin, None, &small_plan(2)).unwrap();
        assert_eq!(rep.verdict, KrasovskiiVerdict::NegativeDefiniteOnSamples);
        assert_eq!(rep.max_eig_field, -2.0);
        assert_eq!(rep.classification, Classification::GloballyAsymptoticallyStable);

        // J + Jᵀ at (1, 1) is [[-4, 4], [4, -4]], eigenvalues {0, -8}
        let s = corpus::example_2_1().with_ball(BallRadius::Finite(2f64.sqrt()));
        let rep = krasovskii_check(&s, None, &SamplingPlan::default_for(2)).unwrap();
        match rep.verdict {
            KrasovskiiVerdict::IndefiniteWitness { lambda_max, .. } => assert!(lambda_max >= -1e-9),
            other => panic!("expected witness, got {other:?}"),
        }
        assert!(rep.max_eig_field.abs() < 1e-12);
        assert_eq!(rep.classification, Classification::Inconclusive);

        // J(0) + J(0)ᵀ = [[-6, 3], [3, -14]]: λ_max = -10 + 5 = -5
        let s = corpus::example_2_2().with_ball(BallRadius::Finite(1e-9));
        let plan = SamplingPlan { polar_radii: 0, halton_points: 1, ..small_plan(2) };
        let rep = krasovskii_check(&s, None, &plan).unwrap();
        assert!((rep.max_eig_field + 5.0).abs() < 1e-6);
    }

    #[test]
    fn krasovskii_rejects_bad_p() {
        let s = corpus::example_2_2();
        let not_sym = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(krasovskii_check(&s, Some(&not_sym), &small_plan(2)), Err(Error::NotPositiveDefinite(_))));
        let indef = SquareMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert!(matches!(krasovskii_check(&s, Some(&indef), &small_plan(2)), Err(Error::NotPositiveDefinite(_))));
        let wrong = SquareMatrix::identity(3);
        assert!(matches!(krasovskii_check(&s, Some(&wrong), &small_plan(2)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn classify_rejects_empty_plan() {
        let s = corpus::example_2_2();
        let plan = SamplingPlan { polar_radii: 0, halton_points: 0, ..small_plan(2) };
        assert_eq!(classify(&s, BetaVariant::Averaged, &plan, &q()).unwrap_err(), Error::EmptySamplingPlan);
    }
}
