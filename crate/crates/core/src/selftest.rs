//! Quick oracle comparisons run by the `selftest` subcommand.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::gibbs::{two_point, InitialStateParams};
use crate::loschmidt::{mode_amplitude, rate_finite, QuenchProtocol, SystemSize};
use crate::magnetization::{contractions, correlator, Direction};
use crate::model::{ModelParams, MomentumGrid};
use crate::oracle::{mode_amplitude_expm, pfaffian_cofactor, FockOracle};
use crate::pfaffian::{pfaffian, SkewMatrix};

const FOCK_SITES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub tolerance: f64,
    /// Largest deviation seen; NaN if the check could not run.
    pub deviation: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

fn random_skew(dim: usize, rng: &mut ChaCha8Rng) -> Result<SkewMatrix<Complex64>> {
    SkewMatrix::from_upper(dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn random_state(rng: &mut ChaCha8Rng, i: usize) -> Result<(ModelParams, InitialStateParams)> {
    Ok((
        ModelParams::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0))?,
        InitialStateParams::new([0.1, 1.0, 10.0][i % 3], [0.0, -PI / 2.0][(i / 3) % 2])?,
    ))
}

fn pfaffian_vs_cofactor(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for dim in (2..=8).step_by(2) {
        for _ in 0..10 {
            let a = random_skew(dim, rng)?;
            let exact = pfaffian_cofactor(&a)?;
            worst = worst.max((pfaffian(&a) - exact).norm() / exact.norm().max(1.0));
        }
    }
    Ok(worst)
}

fn pfaffian_vs_determinant(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for dim in (2..=32).step_by(2) {
        let a = random_skew(dim, rng)?;
        let pf = pfaffian(&a);
        let det = DMatrix::from_row_slice(dim, dim, a.as_slice()).determinant();
        worst = worst.max((pf * pf - det).norm() / det.norm());
    }
    Ok(worst)
}

fn two_point_vs_fock(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..6 {
        let (spec, init) = random_state(rng, i)?;
        let oracle = FockOracle::coherent_gibbs(&spec, &init, FOCK_SITES)?;
        for k in MomentumGrid::new(FOCK_SITES)?.iter() {
            let fast = two_point(&spec, &init, k)?;
            let slow = oracle.two_point(k);
            for (a, b) in [
                (fast.cdag_cdag, slow.cdag_cdag),
                (fast.cdag_c, slow.cdag_c),
                (fast.c_c, slow.c_c),
                (fast.c_cdag, slow.c_cdag),
            ] {
                worst = worst.max((a - b).norm());
            }
        }
    }
    Ok(worst)
}

fn correlators_vs_fock(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..6 {
        let (spec, init) = random_state(rng, i)?;
        let oracle = FockOracle::coherent_gibbs(&spec, &init, FOCK_SITES)?;
        let table = contractions(&spec, &init, FOCK_SITES, 3)?;
        for r in 1..=3 {
            for dir in [Direction::X, Direction::Y] {
                let fast = correlator(&table, dir, r)?;
                worst = worst.max((fast - oracle.spin_correlator(dir, 0, r)).norm());
            }
        }
    }
    Ok(worst)
}

fn amplitude_vs_expm(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let pre = ModelParams::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0))?;
        let post = ModelParams::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0))?;
        let init = InitialStateParams::new(rng.gen_range(0.0..20.0), rng.gen_range(-PI..PI))?;
        let k = rng.gen_range(0.01..PI - 0.01);
        let t = rng.gen_range(0.0..30.0);
        let proto = QuenchProtocol::thermodynamic(pre, post, init);
        let fast = mode_amplitude(&proto, k, t)?;
        worst = worst.max((fast - mode_amplitude_expm(&pre, &post, &init, k, t)?).norm());
    }
    Ok(worst)
}

fn rate_vs_dense_echo(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        let (spec, init) = random_state(rng, i)?;
        let post = ModelParams::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0))?;
        let proto = QuenchProtocol::new(spec, post, init, SystemSize::Finite(FOCK_SITES))?;
        let oracle = FockOracle::coherent_gibbs(&spec, &init, FOCK_SITES)?;
        let times = [0.0, 0.5, 2.0, 5.0];
        let trace = rate_finite(&proto, &times)?;
        for (t, r) in times.iter().zip(&trace.values) {
            let dense = -oracle.loschmidt_echo(&post, *t).ln() / FOCK_SITES as f64;
            worst = worst.max((r - dense).abs());
        }
    }
    Ok(worst)
}

type CheckFn = fn(&mut ChaCha8Rng) -> Result<f64>;

/// Runs every check with a fixed seed.
pub fn run() -> Vec<Check> {
    let checks: [(&'static str, f64, CheckFn); 6] = [
        (
            "pfaffian matches cofactor expansion",
            1e-10,
            pfaffian_vs_cofactor,
        ),
        (
            "pfaffian squared matches determinant",
            1e-10,
            pfaffian_vs_determinant,
        ),
        (
            "two-point functions match Fock space",
            1e-10,
            two_point_vs_fock,
        ),
        (
            "string correlators match Fock space",
            1e-8,
            correlators_vs_fock,
        ),
        (
            "mode amplitude matches matrix exponential",
            1e-10,
            amplitude_vs_expm,
        ),
        (
            "finite-chain rate matches dense echo",
            1e-9,
            rate_vs_dense_echo,
        ),
    ];
    checks
        .into_iter()
        .enumerate()
        .map(|(i, (name, tolerance, f))| {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f + i as u64);
            Check {
                name,
                tolerance,
                deviation: f(&mut rng).unwrap_or(f64::NAN),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for c in run() {
            assert!(c.passed(), "{}: {:e}", c.name, c.deviation);
        }
    }
}
