//! Built-in reference systems.

use crate::hopfield::{compile, Activation, HopfieldNetwork};
use crate::linalg::SquareMatrix;
use crate::system::{build_system, BallRadius, JacobianMode, SystemDef};

pub const BUILTIN_NAMES: [&str; 3] = ["example-2.1", "example-2.2", "hopfield-2"];

/// `x1' = −2x1 + x2²`, `x2' = x1² − 2x2` on `‖x‖ ≤ √8`.
pub fn example_2_1() -> SystemDef {
    build_system(2, &["-2*x1 + x2^2", "x1^2 - 2*x2"], BallRadius::Finite(8f64.sqrt()), JacobianMode::Exact)
        .map(|s| s.with_label("example-2.1"))
        .expect("builtin system is valid")
}

/// `x1' = −4x1 + x1 sech(x1) + 4x2`, `x2' = −x1 − 6x2 − x2 cos(x2)`, global.
pub fn example_2_2() -> SystemDef {
    build_system(
        2,
        &["-4*x1 + x1*sech(x1) + 4*x2", "-x1 - 6*x2 - x2*cos(x2)"],
        BallRadius::Unbounded,
        JacobianMode::Exact,
    )
    .map(|s| s.with_label("example-2.2"))
    .expect("builtin system is valid")
}

/// Two tanh neurons with decay 10 and an additional linear coupling:
///
/// ```text
/// x1' = −10 x1 − 3 x1 + x2 − tanh(3 x1)
/// x2' = −10 x2 + x1 − x2 + tanh(3 x2) / 5
/// ```
pub fn hopfield_2_network() -> HopfieldNetwork {
    let weights = SquareMatrix::from_rows(&[vec![-1.0, 0.0], vec![0.0, 0.2]]).expect("square");
    let coupling = SquareMatrix::from_rows(&[vec![-3.0, 1.0], vec![1.0, -1.0]]).expect("square");
    let tanh3 = Activation::Tanh { gain: 3.0 };
    HopfieldNetwork::new(vec![10.0, 10.0], weights, vec![0.0, 0.0], vec![tanh3.clone(), tanh3])
        .and_then(|n| n.with_coupling(coupling))
        .and_then(|n| n.with_equilibrium(vec![0.0, 0.0]))
        .expect("builtin network is valid")
}

pub fn hopfield_2() -> SystemDef {
    compile(&hopfield_2_network(), BallRadius::Unbounded)
        .map(|s| s.with_label("hopfield-2"))
        .expect("builtin network compiles")
}

pub fn builtin(name: &str) -> Option<SystemDef> {
    match name {
        "example-2.1" => Some(example_2_1()),
        "example-2.2" => Some(example_2_2()),
        "hopfield-2" => Some(hopfield_2()),
        _ => None,
    }
}

pub fn builtin_systems() -> Vec<SystemDef> {
    BUILTIN_NAMES.iter().filter_map(|n| builtin(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup() {
        for name in BUILTIN_NAMES {
            let s = builtin(name).unwrap();
            assert_eq!(s.label(), name);
            assert_eq!(s.dim(), 2);
        }
        assert!(builtin("example-3").is_none());
        assert_eq!(builtin_systems().len(), 3);
    }

    #[test]
    fn hopfield_2_matches_its_formula() {
        let s = hopfield_2();
        for x in [[0.5, -1.0], [2.0, 3.0]] {
            let g = s.eval(&x).unwrap();
            let want1 = -13.0 * x[0] + x[1] - (3.0 * x[0]).tanh();
            let want2 = -11.0 * x[1] + x[0] + (3.0 * x[1]).tanh() / 5.0;
            assert!((g[0] - want1).abs() < 1e-14);
            assert!((g[1] - want2).abs() < 1e-14);
        }
    }
}
