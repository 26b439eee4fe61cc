use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lyapcert_cli::commands::{self, BetaPoints, SimulateOptions, DEFAULT_REGION_TOL};
use lyapcert_cli::error::{CliError, CliResult};
use lyapcert_cli::report::to_json;
use lyapcert_cli::settings::FlagOverrides;
use lyapcert_core::simulate::Integrator;
use lyapcert_core::BetaVariant;

/// Sampled Lyapunov stability certificates for autonomous ODE systems.
#[derive(Debug, Parser)]
#[command(name = "lyapcert", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Sampling and simulation seed.
    #[arg(long, global = true, env = "LYAPCERT_SEED")]
    seed: Option<u64>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Ray quadrature tolerance.
    #[arg(long, global = true, value_parser = positive)]
    quad_tol: Option<f64>,
    /// Strictness margin for β < 0.
    #[arg(long, global = true, value_parser = non_negative)]
    margin: Option<f64>,
    /// Sampling horizon for unbounded balls.
    #[arg(long, global = true, value_parser = positive)]
    horizon: Option<f64>,
    /// Halton points per shell.
    #[arg(long, global = true)]
    samples: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify stability and write a JSON report.
    Analyze {
        /// System file, or builtin:<name>.
        file: String,
    },
    /// Search for the largest certified ball radius.
    Region {
        file: String,
        /// Upper end of the search (default: ball radius or horizon).
        #[arg(long, value_parser = positive)]
        rmax: Option<f64>,
        /// Radius resolution.
        #[arg(long, default_value_t = DEFAULT_REGION_TOL, value_parser = positive)]
        tol: f64,
    },
    /// Integrate trajectories and summarize convergence.
    Simulate {
        file: String,
        /// Initial condition as comma-separated values; repeatable.
        #[arg(long, value_parser = point, allow_hyphen_values = true)]
        x0: Vec<Vec<f64>>,
        /// Number of random initial conditions.
        #[arg(long)]
        random: Option<usize>,
        /// Ball radius for --random (default: system ball, or 10 if unbounded).
        #[arg(long, value_parser = non_negative)]
        radius: Option<f64>,
        /// Final time.
        #[arg(long, value_parser = positive)]
        tend: Option<f64>,
        /// RK4 step size.
        #[arg(long, value_parser = positive)]
        dt: Option<f64>,
        #[arg(long, value_enum)]
        integrator: Option<IntegratorArg>,
        /// Directory for per-trajectory CSV files.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Export β over a grid, explicit points, or the sampling plan as CSV.
    BetaField {
        file: String,
        /// Grid points per axis (2-D systems only).
        #[arg(long, conflicts_with = "point")]
        grid: Option<usize>,
        /// Grid half-width (default: ball radius, or 5 if unbounded).
        #[arg(long, value_parser = positive, requires = "grid")]
        extent: Option<f64>,
        /// Point as comma-separated values; repeatable.
        #[arg(long, value_parser = point, allow_hyphen_values = true)]
        point: Vec<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = VariantArg::Theorem2)]
        variant: VariantArg,
        /// CSV output file (default: --out, then stdout).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum IntegratorArg {
    Rk4,
    Rkf45,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    Theorem2,
    Lakshmikantham,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be non-negative, got {v}"))
    }
}

fn point(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_f64).collect()
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e)),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::io("writing stdout", e)),
    }
}

fn run(cli: Cli) -> CliResult<i32> {
    let g = cli.global;
    let flags =
        FlagOverrides { seed: g.seed, quad_tol: g.quad_tol, margin: g.margin, horizon: g.horizon, samples: g.samples };
    let out = g.out.as_deref();
    match cli.command {
        Command::Analyze { file } => {
            let (report, code) = commands::analyze(&file, &flags)?;
            emit(out, &to_json(&report))?;
            Ok(code)
        }
        Command::Region { file, rmax, tol } => {
            let report = commands::region(&file, &flags, rmax, tol)?;
            println!("{}", report.search.radius);
            if let Some(path) = out {
                emit(Some(path), &to_json(&report))?;
            }
            Ok(0)
        }
        Command::Simulate { file, x0, random, radius, tend, dt, integrator, csv } => {
            let integrator = integrator.map(|i| match i {
                IntegratorArg::Rk4 => Integrator::Rk4 { dt: dt.unwrap_or(lyapcert_core::simulate::DEFAULT_DT) },
                IntegratorArg::Rkf45 => Integrator::rkf45(),
            });
            let opts = SimulateOptions { x0, random, radius, t_end: tend, dt, integrator, csv_dir: csv };
            let report = commands::simulate(&file, &flags, &opts)?;
            emit(out, &to_json(&report))?;
            Ok(0)
        }
        Command::BetaField { file, grid, extent, point, variant, csv } => {
            let points = match (grid, point.is_empty()) {
                (Some(per_axis), _) => BetaPoints::Grid { per_axis, extent },
                (None, false) => BetaPoints::Points(point),
                (None, true) => BetaPoints::Samples,
            };
            let variant = match variant {
                VariantArg::Theorem2 => BetaVariant::Averaged,
                VariantArg::Lakshmikantham => BetaVariant::RowSum,
            };
            let text = commands::beta_field(&file, &flags, &points, variant)?;
            emit(csv.as_deref().or(out), &text)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("lyapcert: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
