//! Shared fixtures for the benchmarks.

use lyapcert_core::simulate::sample_in_ball;
use lyapcert_core::system::{BallRadius, SystemDef};

/// Seeded points spread over the system's ball, or radius 10 when unbounded.
pub fn fixture_points(sys: &SystemDef, count: usize) -> Vec<Vec<f64>> {
    let r = match sys.ball() {
        BallRadius::Finite(r) => r,
        BallRadius::Unbounded => 10.0,
    };
    sample_in_ball(sys.dim(), r, count, 42)
}
