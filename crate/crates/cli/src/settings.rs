//! Analysis settings: built-in defaults, then file overrides, then flags.

use lyapcert_core::ray::{QuadratureConfig, DEFAULT_MAX_DEPTH, DEFAULT_QUAD_TOL};
use lyapcert_core::sampling::SamplingPlan;
use lyapcert_core::simulate::DEFAULT_T_END;
use lyapcert_core::SquareMatrix;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::file::AnalysisOverrides;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_TRAJECTORIES: usize = 20;

/// Values given on the command line.
#[derive(Debug, Clone, Default)]
pub struct FlagOverrides {
    pub seed: Option<u64>,
    pub quad_tol: Option<f64>,
    pub margin: Option<f64>,
    pub horizon: Option<f64>,
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub seed: u64,
    pub quadrature: QuadratureConfig,
    pub sampling: SamplingPlan,
    pub krasovskii_p: Option<SquareMatrix>,
    pub trajectories: usize,
    pub t_end: f64,
}

impl Settings {
    pub fn resolve(n: usize, file: &AnalysisOverrides, flags: &FlagOverrides) -> CliResult<Self> {
        let mut sampling = SamplingPlan::default_for(n);
        let seed = flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
        sampling.seed = seed;
        if let Some(v) = file.polar_radii {
            sampling.polar_radii = v;
        }
        if let Some(v) = file.polar_directions {
            sampling.polar_directions = v;
        }
        if let Some(v) = flags.samples.or(file.halton_points) {
            sampling.halton_points = v;
        }
        if let Some(v) = flags.horizon.or(file.horizon) {
            sampling.horizon = v;
        }
        if let Some(v) = flags.margin.or(file.margin) {
            sampling.margin = v;
        }
        sampling.validate().map_err(|e| CliError::input("/analysis", e.to_string()))?;

        let tol = flags.quad_tol.or(file.quad_tol).unwrap_or(DEFAULT_QUAD_TOL);
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::input("/analysis/quad_tol", format!("must be positive, got {tol}")));
        }
        let krasovskii_p = match &file.krasovskii_p {
            Some(rows) => Some(
                SquareMatrix::from_rows(rows).map_err(|e| CliError::input("/analysis/krasovskii_p", e.to_string()))?,
            ),
            None => None,
        };
        Ok(Self {
            seed,
            quadrature: QuadratureConfig { tol, max_depth: DEFAULT_MAX_DEPTH },
            sampling,
            krasovskii_p,
            trajectories: file.trajectories.unwrap_or(DEFAULT_TRAJECTORIES),
            t_end: file.t_end.unwrap_or(DEFAULT_T_END),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let file =
            AnalysisOverrides { seed: Some(5), margin: Some(1e-6), halton_points: Some(10), ..Default::default() };
        let s = Settings::resolve(2, &file, &FlagOverrides::default()).unwrap();
        assert_eq!(s.seed, 5);
        assert_eq!(s.sampling.seed, 5);
        assert_eq!(s.sampling.margin, 1e-6);
        assert_eq!(s.sampling.halton_points, 10);
        assert_eq!(s.quadrature.tol, DEFAULT_QUAD_TOL);

        let flags = FlagOverrides { seed: Some(9), samples: Some(33), quad_tol: Some(1e-8), ..Default::default() };
        let s = Settings::resolve(2, &file, &flags).unwrap();
        assert_eq!(s.seed, 9);
        assert_eq!(s.sampling.halton_points, 33);
        assert_eq!(s.quadrature.tol, 1e-8);
        assert_eq!(s.sampling.margin, 1e-6);

        let s = Settings::resolve(3, &AnalysisOverrides::default(), &FlagOverrides::default()).unwrap();
        assert_eq!(s.sampling, SamplingPlan::default_for(3));
        assert_eq!(s.trajectories, DEFAULT_TRAJECTORIES);
    }

    #[test]
    fn rejects_bad_flags() {
        let flags = FlagOverrides { horizon: Some(-1.0), ..Default::default() };
        assert!(Settings::resolve(2, &AnalysisOverrides::default(), &flags).is_err());
        let flags = FlagOverrides { quad_tol: Some(0.0), ..Default::default() };
        assert!(Settings::resolve(2, &AnalysisOverrides::default(), &flags).is_err());
    }
}
