//! Subcommand implementations; each returns its output document and leaves
//! writing to the caller.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use lyapcert_core::criteria::{beta_field as compute_beta_field, certified_radius_search};
use lyapcert_core::linalg::norm;
use lyapcert_core::simulate::{run_trajectories, sample_in_ball, ConvergenceSummary, Integrator, TrajectorySummary};
use lyapcert_core::system::BallRadius;
use lyapcert_core::{
    classify, integrate, krasovskii_check, theorem5_betas, BetaVariant, Error as CoreError, IntegratorConfig,
};

use crate::error::{CliError, CliResult, EXIT_NOT_CERTIFIED, EXIT_OK};
use crate::file::{load_path, LoadedSystem};
use crate::report::{AnalyzeReport, HopfieldSection, RegionReport, SimulateReport, SystemEcho, Timings, ToolInfo};
use crate::settings::{FlagOverrides, Settings};

/// Radius used for random initial conditions when the ball is unbounded.
pub const DEFAULT_RANDOM_RADIUS: f64 = 10.0;
/// Half-width of the β grid when the ball is unbounded.
pub const DEFAULT_GRID_EXTENT: f64 = 5.0;
pub const DEFAULT_REGION_TOL: f64 = 0.01;

fn load(file: &str, flags: &FlagOverrides) -> CliResult<(LoadedSystem, Settings)> {
    let loaded = load_path(file)?;
    let settings = Settings::resolve(loaded.system.dim(), &loaded.analysis, flags)?;
    Ok((loaded, settings))
}

pub fn analyze(file: &str, flags: &FlagOverrides) -> CliResult<(AnalyzeReport, i32)> {
    let mut timings = Timings::default();
    let (loaded, settings) = timings.time("load", || load(file, flags))?;
    let sys = &loaded.system;
    let (plan, quad) = (&settings.sampling, &settings.quadrature);

    let theorem2 = timings.time("theorem2", || classify(sys, BetaVariant::Averaged, plan, quad))?;
    let lakshmikantham = timings.time("lakshmikantham", || classify(sys, BetaVariant::RowSum, plan, quad))?;
    let krasovskii = timings
        .time("krasovskii", || krasovskii_check(sys, settings.krasovskii_p.as_ref(), plan))
        .map_err(|e| match e {
            CoreError::NotPositiveDefinite(_) | CoreError::DimensionMismatch { .. } => {
                CliError::input("/analysis/krasovskii_p", e.to_string())
            }
            other => other.into(),
        })?;

    let hopfield = match &loaded.network {
        Some(net) => {
            let at_equilibrium = theorem5_betas(net, &vec![0.0; net.dim()])?;
            Some(HopfieldSection { network: net.clone(), at_equilibrium })
        }
        None => None,
    };

    let radius = theorem2.certified_radius.finite().unwrap_or(plan.horizon);
    let simulation = if theorem2.classification.is_asymptotic() && settings.trajectories > 0 && radius > 0.0 {
        Some(timings.time("simulation", || {
            lyapcert_core::convergence_experiment(
                sys,
                radius,
                settings.trajectories,
                settings.t_end,
                settings.seed,
                &IntegratorConfig::default(),
            )
        })?)
    } else {
        None
    };

    let code = if theorem2.classification.is_asymptotic() { EXIT_OK } else { EXIT_NOT_CERTIFIED };
    let report = AnalyzeReport {
        tool: ToolInfo::default(),
        command: "analyze",
        seed: settings.seed,
        system: SystemEcho::new(&loaded),
        certified_radius: theorem2.certified_radius,
        theorem2,
        lakshmikantham,
        krasovskii,
        hopfield,
        simulation,
        settings,
        timings,
    };
    Ok((report, code))
}

pub fn region(file: &str, flags: &FlagOverrides, r_max: Option<f64>, tol: f64) -> CliResult<RegionReport> {
    let mut timings = Timings::default();
    let (loaded, settings) = timings.time("load", || load(file, flags))?;
    let sys = &loaded.system;
    let r_max = r_max.unwrap_or(match sys.ball() {
        BallRadius::Finite(r) => r,
        BallRadius::Unbounded => settings.sampling.horizon,
    });
    let search = timings
        .time("search", || certified_radius_search(sys, r_max, tol, &settings.sampling, &settings.quadrature))?;
    Ok(RegionReport {
        tool: ToolInfo::default(),
        command: "region",
        seed: settings.seed,
        system: SystemEcho::new(&loaded),
        settings,
        search,
        timings,
    })
}

#[derive(Debug, Clone, Default)]
pub struct SimulateOptions {
    pub x0: Vec<Vec<f64>>,
    pub random: Option<usize>,
    pub radius: Option<f64>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub integrator: Option<Integrator>,
    pub csv_dir: Option<PathBuf>,
}

fn integrator_config(opts: &SimulateOptions) -> IntegratorConfig {
    let integrator = match (opts.integrator, opts.dt) {
        (Some(Integrator::Rk4 { .. }) | None, Some(dt)) => Integrator::Rk4 { dt },
        (Some(i), _) => i,
        (None, None) => Integrator::rk4(),
    };
    IntegratorConfig::with_integrator(integrator)
}

pub fn simulate(file: &str, flags: &FlagOverrides, opts: &SimulateOptions) -> CliResult<SimulateReport> {
    let mut timings = Timings::default();
    let (loaded, settings) = timings.time("load", || load(file, flags))?;
    let sys = &loaded.system;
    let n = sys.dim();
    let t_end = opts.t_end.unwrap_or(settings.t_end);
    let cfg = integrator_config(opts);

    let (initial, radius) = match (opts.random, opts.x0.is_empty()) {
        (Some(_), false) => return Err(CliError::Usage("--x0 and --random are mutually exclusive".into())),
        (Some(count), true) => {
            let radius = opts.radius.unwrap_or(match sys.ball() {
                BallRadius::Finite(r) => r,
                BallRadius::Unbounded => DEFAULT_RANDOM_RADIUS,
            });
            (sample_in_ball(n, radius, count, settings.seed), radius)
        }
        (None, false) => {
            for x in &opts.x0 {
                if x.len() != n {
                    return Err(CliError::Usage(format!("--x0 has {} components, system has {n}", x.len())));
                }
            }
            let radius = opts.x0.iter().map(|x| norm(x)).fold(0.0, f64::max);
            (opts.x0.clone(), radius)
        }
        (None, true) => return Err(CliError::Usage("give --x0 or --random".into())),
    };

    let mut csv_files = Vec::new();
    let trajectories = match &opts.csv_dir {
        Some(dir) => timings.time("simulation", || {
            fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
            let mut out = Vec::with_capacity(initial.len());
            for (k, x0) in initial.iter().enumerate() {
                let record = integrate(sys, x0, t_end, &cfg)?;
                let path = dir.join(format!("trajectory_{:04}.csv", k + 1));
                write_record(&path, &record)?;
                csv_files.push(path.display().to_string());
                out.push(TrajectorySummary::from_record(&record));
            }
            Ok::<_, CliError>(out)
        })?,
        None => timings.time("simulation", || run_trajectories(sys, &initial, t_end, &cfg))?,
    };

    Ok(SimulateReport {
        tool: ToolInfo::default(),
        command: "simulate",
        seed: settings.seed,
        system: SystemEcho::new(&loaded),
        integrator: cfg,
        summary: ConvergenceSummary::from_trajectories(radius, t_end, trajectories),
        csv_files,
        timings,
    })
}

fn write_record(path: &Path, record: &lyapcert_core::TrajectoryRecord) -> CliResult<()> {
    let ctx = || format!("writing {}", path.display());
    let f = File::create(path).map_err(|e| CliError::io(ctx(), e))?;
    record.write_csv(BufWriter::new(f)).map_err(|e| CliError::io(ctx(), e))
}

#[derive(Debug, Clone)]
pub enum BetaPoints {
    /// `per_axis` points per coordinate over `[-extent, extent]²`.
    Grid {
        per_axis: usize,
        extent: Option<f64>,
    },
    Points(Vec<Vec<f64>>),
    /// The analysis sampling plan.
    Samples,
}

/// β over a grid, explicit points, or the sampling plan, as CSV.
pub fn beta_field(file: &str, flags: &FlagOverrides, points: &BetaPoints, variant: BetaVariant) -> CliResult<String> {
    let (loaded, settings) = load(file, flags)?;
    let sys = &loaded.system;
    let n = sys.dim();
    let points = match points {
        BetaPoints::Grid { per_axis, extent } => {
            if n != 2 {
                return Err(CliError::Usage(format!("grid mode needs a 2-dimensional system, got n = {n}")));
            }
            if *per_axis < 2 {
                return Err(CliError::Usage("--grid needs at least 2 points per axis".into()));
            }
            let e = extent.unwrap_or(match sys.ball() {
                BallRadius::Finite(r) => r,
                BallRadius::Unbounded => DEFAULT_GRID_EXTENT,
            });
            let axis: Vec<f64> = (0..*per_axis).map(|k| -e + 2.0 * e * k as f64 / (*per_axis - 1) as f64).collect();
            axis.iter().flat_map(|&a| axis.iter().map(move |&b| vec![a, b])).collect()
        }
        BetaPoints::Points(ps) => {
            for p in ps {
                if p.len() != n {
                    return Err(CliError::Usage(format!("--point has {} components, system has {n}", p.len())));
                }
            }
            ps.clone()
        }
        BetaPoints::Samples => settings.sampling.points(n, sys.ball())?,
    };
    let profiles = compute_beta_field(sys, &points, variant, &settings.quadrature)?;

    let mut csv = String::new();
    let header: Vec<String> = (1..=n).map(|i| format!("x{i}")).chain((1..=n).map(|i| format!("beta{i}"))).collect();
    csv.push_str(&header.join(","));
    csv.push('\n');
    for p in &profiles {
        let row: Vec<String> = p.point.iter().chain(&p.values).map(|v| format!("{v}")).collect();
        let _ = writeln!(csv, "{}", row.join(","));
    }
    Ok(csv)
}
