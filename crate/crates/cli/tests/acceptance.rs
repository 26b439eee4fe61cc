//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use lyapcert_cli::report::without_timings;
use lyapcert_core::corpus;
use lyapcert_core::criteria::{
    beta_profile, certified_radius_search, classify, lyapunov_derivative, BetaVariant, Classification,
};
use lyapcert_core::hopfield::{tau, theorem5_betas};
use lyapcert_core::linalg::norm;
use lyapcert_core::ray::{ray_matrix, reconstruction_bound, QuadratureConfig};
use lyapcert_core::sampling::{SamplingPlan, DEFAULT_HORIZON};
use lyapcert_core::simulate::{
    convergence_experiment, integrate, sample_in_ball, Integrator, IntegratorConfig, CONVERGENCE_THRESHOLD,
};
use lyapcert_core::system::{build_system, BallRadius, JacobianMode, SystemDef};

type Outcome = Result<String, String>;

struct Suite {
    failures: usize,
}

impl Suite {
    fn run(&mut self, id: u32, title: &str, limit: Option<Duration>, check: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let mut outcome = check();
        let elapsed = start.elapsed();
        if let (Ok(detail), Some(limit)) = (&outcome, limit) {
            if elapsed > limit {
                outcome = Err(format!("{detail}; took {:.2} s, limit {} s", elapsed.as_secs_f64(), limit.as_secs()));
            }
        }
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                self.failures += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} [{id:>2}] {title}: {detail} ({:.2} s)", elapsed.as_secs_f64());
    }
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn quad() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn sample_radius(sys: &SystemDef) -> f64 {
    match sys.ball() {
        BallRadius::Finite(r) => r,
        BallRadius::Unbounded => DEFAULT_HORIZON,
    }
}

fn golden_betas() -> Outcome {
    let sys = corpus::hopfield_2();
    let b = beta_profile(&sys, &[0.0, 0.0], BetaVariant::Averaged, &quad()).map_err(|e| e.to_string())?;
    let closed = theorem5_betas(&corpus::hopfield_2_network(), &[0.0, 0.0]).map_err(|e| e.to_string())?;
    let expected = [-15.0, -47.0 / 5.0];
    let err = b
        .values
        .iter()
        .chain(&closed.profile.values)
        .zip(expected.iter().cycle())
        .map(|(v, e)| (v - e).abs())
        .fold(0.0, f64::max);
    ensure(err <= 1e-9, format!("β(0) = {:?}, max error {err:.1e}", b.values))
}

fn region_radius() -> Outcome {
    let sys = corpus::example_2_1();
    let plan = SamplingPlan::default_for(2);
    let s = certified_radius_search(&sys, 10.0, 0.01, &plan, &quad()).map_err(|e| e.to_string())?;
    let target = 2.0 * 2f64.sqrt();
    ensure((s.radius - target).abs() <= 2e-2, format!("radius {} vs {target:.4}", s.radius))
}

fn gas_verdict(sys: &SystemDef) -> Outcome {
    let plan = SamplingPlan::default_for(sys.dim());
    let v = classify(sys, BetaVariant::Averaged, &plan, &quad()).map_err(|e| e.to_string())?;
    ensure(
        v.classification == Classification::GloballyAsymptoticallyStable,
        format!("{}: {}", sys.label(), v.classification.as_str()),
    )
}

fn criterion_comparison() -> Outcome {
    let sys = corpus::example_2_2();
    let plan = SamplingPlan::default_for(2);
    let avg = classify(&sys, BetaVariant::Averaged, &plan, &quad()).map_err(|e| e.to_string())?;
    let row = classify(&sys, BetaVariant::RowSum, &plan, &quad()).map_err(|e| e.to_string())?;
    let sup = row.evidence.components[0].sup;
    let bound = 0.5 / 4f64.cosh();
    ensure(
        avg.classification == Classification::GloballyAsymptoticallyStable
            && row.classification == Classification::Inconclusive
            && sup >= bound,
        format!(
            "averaged {}, row-sum {}, row-sum sup β1 = {sup:.4} (bound {bound:.4})",
            avg.classification.as_str(),
            row.classification.as_str()
        ),
    )
}

fn reconstruction() -> Outcome {
    let mut failures = Vec::new();
    for (k, sys) in corpus::builtin_systems().iter().enumerate() {
        for x in sample_in_ball(sys.dim(), sample_radius(sys), 1000, 500 + k as u64) {
            let d = ray_matrix(sys, &x, &quad()).map_err(|e| e.to_string())?;
            let g = sys.eval(&x).map_err(|e| e.to_string())?;
            let r: Vec<f64> = d.reconstruct().iter().zip(&g).map(|(a, b)| a - b).collect();
            if norm(&r) > reconstruction_bound(norm(&g)) {
                failures.push(format!("{} at {x:?}", sys.label()));
            }
        }
    }
    ensure(failures.is_empty(), format!("{} failures over 3000 points {}", failures.len(), failures.join("; ")))
}

fn derivative_bound() -> Outcome {
    let mut failures = 0;
    let mut worst = f64::NEG_INFINITY;
    for (k, sys) in corpus::builtin_systems().iter().enumerate() {
        for x in sample_in_ball(sys.dim(), sample_radius(sys), 10_000, 600 + k as u64) {
            let vdot = lyapunov_derivative(sys, &x).map_err(|e| e.to_string())?;
            let b = beta_profile(sys, &x, BetaVariant::Averaged, &quad()).map_err(|e| e.to_string())?;
            let bound: f64 = b.values.iter().zip(&x).map(|(b, x)| b * x * x).sum();
            let sq: f64 = x.iter().map(|v| v * v).sum();
            let excess = vdot - bound - 1e-9 * (1.0 + sq);
            worst = worst.max(excess);
            if excess > 0.0 {
                failures += 1;
            }
        }
    }
    ensure(failures == 0, format!("{failures} failures over 30000 points, worst excess {worst:.2e}"))
}

fn closed_form_match() -> Outcome {
    let sys = corpus::hopfield_2();
    let mut worst: f64 = 0.0;
    for i in 0..=40 {
        for j in 0..=40 {
            let x = [-5.0 + 0.25 * i as f64, -5.0 + 0.25 * j as f64];
            let d = ray_matrix(&sys, &x, &quad()).map_err(|e| e.to_string())?.entries;
            worst = worst.max((d[(0, 0)] - (-13.0 - tau(3.0, x[0]))).abs());
            worst = worst.max((d[(1, 1)] - (-11.0 + tau(3.0, x[1]) / 5.0)).abs());
        }
    }
    ensure(worst <= 1e-9, format!("max diagonal error {worst:.1e} on 41x41 grid"))
}

fn empirical_soundness() -> Outcome {
    let cfg = IntegratorConfig::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for (k, sys) in corpus::builtin_systems().iter().enumerate() {
        let plan = SamplingPlan::default_for(sys.dim());
        let v = classify(sys, BetaVariant::Averaged, &plan, &quad()).map_err(|e| e.to_string())?;
        if !v.classification.is_asymptotic() {
            return Err(format!("{} not certified", sys.label()));
        }
        let radius = v.certified_radius.finite().unwrap_or(plan.horizon);
        let s = convergence_experiment(sys, radius, 100, 20.0, 700 + k as u64, &cfg).map_err(|e| e.to_string())?;
        ok &= s.converged == 100 && s.v_violations == 0 && s.max_terminal_norm <= CONVERGENCE_THRESHOLD;
        parts.push(format!(
            "{} r={radius:.3}: {}/100, max |x(20)| {:.1e}, {} V violations",
            sys.label(),
            s.converged,
            s.max_terminal_norm,
            s.v_violations
        ));
    }
    ensure(ok, parts.join("; "))
}

fn rk4_order() -> Outcome {
    let sys = build_system(1, &["-x1"], BallRadius::Unbounded, JacobianMode::Exact).map_err(|e| e.to_string())?;
    let exact = (-1f64).exp();
    let errors: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&dt| {
            let cfg = IntegratorConfig::with_integrator(Integrator::Rk4 { dt });
            integrate(&sys, &[1.0], 1.0, &cfg).map(|r| (r.terminal_state()[0] - exact).abs())
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    ensure(
        ratios.iter().all(|r| (8.0..=32.0).contains(r)),
        format!(
            "errors {}, halving ratios {ratios:.2?}",
            errors.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(" ")
        ),
    )
}

fn determinism() -> Outcome {
    let run = |name: &str| -> Result<String, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_lyapcert"))
            .args(["analyze", &format!("builtin:{name}"), "--seed", "0"])
            .env_remove("LYAPCERT_SEED")
            .output()
            .map_err(|e| e.to_string())?;
        if out.status.code() != Some(0) {
            return Err(format!("{name}: exit {:?}", out.status.code()));
        }
        String::from_utf8(out.stdout).map_err(|e| e.to_string())
    };
    for name in corpus::BUILTIN_NAMES {
        let (a, b) = (run(name)?, run(name)?);
        let (va, vb) = (without_timings(&a), without_timings(&b));
        if va.is_none() || va != vb {
            return Err(format!("{name}: reports differ"));
        }
        let strip = |s: &str| s.split("\"timings\"").next().map(str::to_string);
        if strip(&a) != strip(&b) {
            return Err(format!("{name}: report bytes differ before the timings block"));
        }
    }
    Ok(format!("{:?} byte-identical modulo timings", corpus::BUILTIN_NAMES))
}

fn main() -> ExitCode {
    let mut suite = Suite { failures: 0 };
    let secs = Duration::from_secs;
    suite.run(1, "golden β at the hopfield-2 origin", Some(secs(1)), golden_betas);
    suite.run(2, "certified radius of example-2.1", Some(secs(10)), region_radius);
    suite.run(3, "GAS verdict for example-2.2", Some(secs(30)), || gas_verdict(&corpus::example_2_2()));
    suite.run(3, "GAS verdict for hopfield-2", Some(secs(30)), || gas_verdict(&corpus::hopfield_2()));
    suite.run(4, "row-sum variant inconclusive on example-2.2", None, criterion_comparison);
    suite.run(5, "reconstruction identity", None, reconstruction);
    suite.run(6, "derivative bound", None, derivative_bound);
    suite.run(7, "closed-form diagonal for hopfield-2", None, closed_form_match);
    suite.run(8, "trajectories inside certified regions", Some(secs(60)), empirical_soundness);
    suite.run(9, "RK4 convergence order", None, rk4_order);
    suite.run(10, "analyze determinism", None, determinism);
    if suite.failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", suite.failures);
        ExitCode::FAILURE
    }
}
