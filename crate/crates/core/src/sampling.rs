//! Deterministic sample sets over balls and expanding shells.
//!
//! Every plan combines a structured grid (polar in 2-D, axis rays otherwise)
//! with a Halton sequence under a seeded Cranley-Patterson shift, so the same
//! seed always produces the same points in the same order.

use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::function::erf::erf_inv;

use crate::error::{Error, Result};
use crate::system::BallRadius;

pub const DEFAULT_POLAR_RADII: usize = 64;
pub const DEFAULT_POLAR_DIRECTIONS: usize = 128;
pub const DEFAULT_HALTON_2D: usize = 512;
pub const DEFAULT_HALTON: usize = 4096;
pub const DEFAULT_HORIZON: f64 = 100.0;
pub const DEFAULT_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingPlan {
    /// Grid radii across the sampled range (split evenly over shells).
    pub polar_radii: usize,
    /// Grid directions in 2-D; other dimensions use the `2n` axis directions.
    pub polar_directions: usize,
    /// Halton points per shell.
    pub halton_points: usize,
    /// Outer radius of the shell sequence used for unbounded balls.
    pub horizon: f64,
    /// Safety margin for strict negativity.
    pub margin: f64,
    pub seed: u64,
}

impl SamplingPlan {
    /// Defaults for an `n`-dimensional system.
    pub fn default_for(n: usize) -> Self {
        Self {
            polar_radii: DEFAULT_POLAR_RADII,
            polar_directions: DEFAULT_POLAR_DIRECTIONS,
            halton_points: if n == 2 { DEFAULT_HALTON_2D } else { DEFAULT_HALTON },
            horizon: DEFAULT_HORIZON,
            margin: DEFAULT_MARGIN,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.polar_radii == 0 && self.halton_points == 0 {
            return Err(Error::EmptySamplingPlan);
        }
        if self.polar_radii > 0 && self.polar_directions == 0 {
            return Err(Error::InvalidArgument("polar grid needs at least one direction".into()));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidArgument(format!("horizon must be positive, got {}", self.horizon)));
        }
        if !(self.margin.is_finite() && self.margin >= 0.0) {
            return Err(Error::InvalidArgument(format!("margin must be non-negative, got {}", self.margin)));
        }
        Ok(())
    }

    /// Shell boundaries `(inner, outer]`. A finite ball is a single shell;
    /// an unbounded one uses radii 0, 1, 2, 4, … capped at the horizon.
    pub fn shells(&self, ball: BallRadius) -> Vec<(f64, f64)> {
        match ball {
            BallRadius::Finite(r) => vec![(0.0, r)],
            BallRadius::Unbounded => {
                let mut edges = vec![0.0];
                let mut r = 1.0;
                while r < self.horizon {
                    edges.push(r);
                    r *= 2.0;
                }
                edges.push(self.horizon);
                edges.windows(2).map(|w| (w[0], w[1])).collect()
            }
        }
    }

    /// The sampled radius: the ball radius, or the horizon for unbounded balls.
    pub fn outer_radius(&self, ball: BallRadius) -> f64 {
        match ball {
            BallRadius::Finite(r) => r,
            BallRadius::Unbounded => self.horizon,
        }
    }

    /// All sample points for an `n`-dimensional ball, origin first.
    pub fn points(&self, n: usize, ball: BallRadius) -> Result<Vec<Vec<f64>>> {
        self.validate()?;
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        let shells = self.shells(ball);
        let radii_per_shell = self.polar_radii.div_ceil(shells.len());
        let directions = grid_directions(n, self.polar_directions);
        let mut halton = Halton::new(halton_dims(n), self.seed);

        let mut pts = vec![vec![0.0; n]];
        for &(lo, hi) in &shells {
            for k in 1..=radii_per_shell {
                let r = lo + (hi - lo) * k as f64 / radii_per_shell as f64;
                for d in &directions {
                    pts.push(d.iter().map(|c| r * c).collect());
                }
            }
            for _ in 0..self.halton_points {
                let u = halton.next_point();
                pts.push(map_to_shell(&u, n, lo, hi));
            }
        }
        Ok(pts)
    }
}

fn grid_directions(n: usize, polar_directions: usize) -> Vec<Vec<f64>> {
    if n == 2 {
        (0..polar_directions)
            .map(|j| {
                let a = 2.0 * PI * j as f64 / polar_directions as f64;
                vec![a.cos(), a.sin()]
            })
            .collect()
    } else {
        let mut dirs = Vec::with_capacity(2 * n);
        for k in 0..n {
            for sign in [1.0, -1.0] {
                let mut d = vec![0.0; n];
                d[k] = sign;
                dirs.push(d);
            }
        }
        dirs
    }
}

fn halton_dims(n: usize) -> usize {
    match n {
        1 | 2 => 2,
        _ => n + 1,
    }
}

fn map_to_shell(u: &[f64], n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let nf = n as f64;
    let r = (lo.powf(nf) + u[0] * (hi.powf(nf) - lo.powf(nf))).powf(1.0 / nf);
    match n {
        1 => vec![if u[1] < 0.5 { -r } else { r }],
        2 => {
            let a = 2.0 * PI * u[1];
            vec![r * a.cos(), r * a.sin()]
        }
        _ => {
            let z: Vec<f64> =
                u[1..].iter().map(|&v| SQRT_2 * erf_inv(2.0 * v.clamp(1e-12, 1.0 - 1e-12) - 1.0)).collect();
            let len = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            if len == 0.0 {
                let mut p = vec![0.0; n];
                p[0] = r;
                return p;
            }
            z.iter().map(|v| r * v / len).collect()
        }
    }
}

/// Radical inverse of `index` in base `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while index > 0 {
        out += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    out
}

fn first_primes(k: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(k);
    let mut c = 2u64;
    while primes.len() < k {
        if primes.iter().take_while(|p| *p * *p <= c).all(|p| !c.is_multiple_of(*p)) {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

/// Shifted Halton sequence in `[0, 1)^d`.
#[derive(Debug, Clone)]
pub struct Halton {
    bases: Vec<u64>,
    shift: Vec<f64>,
    index: u64,
}

impl Halton {
    pub fn new(dims: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = (0..dims).map(|_| rng.random::<f64>()).collect();
        Self { bases: first_primes(dims), shift, index: 1 }
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let i = self.index;
        self.index += 1;
        self.bases.iter().zip(&self.shift).map(|(&b, &s)| (radical_inverse(i, b) + s).fract()).collect()
    }
}
