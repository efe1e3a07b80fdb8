//! Momentum-space description of the transverse-field XY chain.
//!
//! After Jordan-Wigner and Fourier transformation each pair of modes
//! `(k, -k)` is governed by a traceless 2x2 block acting on
//! `{|1> = c_k^† c_{-k}^† |0>, |0>}`:
//!
//! ```text
//! H_k = [[-λ - cos k,  iγ sin k],
//!        [-iγ sin k,   λ + cos k]]
//! ```
//!
//! with eigenvalues `±ε_k`. Energies are in units of the exchange coupling.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Below this, `ε_k` and `γ sin k` are treated as zero when deciding whether
/// the Bogoliubov phase is defined.
pub const GAP_TOLERANCE: f64 = 1e-12;

/// Couplings `(γ, λ)` of one Hamiltonian instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub gamma: f64,
    pub lambda: f64,
}

impl ModelParams {
    pub fn new(gamma: f64, lambda: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma.abs() > 1.0 {
            return Err(Error::InvalidParams(format!(
                "anisotropy gamma = {gamma} outside [-1, 1]"
            )));
        }
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidParams(format!(
                "transverse field lambda = {lambda} must be finite and non-negative"
            )));
        }
        Ok(Self { gamma, lambda })
    }

    /// Quasiparticle energy `ε_k = sqrt((λ + cos k)² + γ² sin² k)`.
    pub fn dispersion(&self, k: f64) -> f64 {
        (self.lambda + k.cos()).hypot(self.gamma * k.sin())
    }

    /// Bogoliubov angle `θ_k = arg(-λ - cos k - ε_k + iγ sin k)` in `(-π, π]`.
    ///
    /// When `λ + cos k > 0` the real part is computed as
    /// `-(γ sin k)² / (ε_k - λ - cos k)` to avoid cancellation.
    pub fn bogoliubov_angle(&self, k: f64) -> Result<f64> {
        let a = -self.lambda - k.cos();
        let b = self.gamma * k.sin();
        let eps = a.hypot(b);
        if eps < GAP_TOLERANCE && b.abs() < GAP_TOLERANCE {
            return Err(Error::DegenerateAngle { k });
        }
        let re = if a <= 0.0 {
            a - eps
        } else {
            -(b * b) / (a + eps)
        };
        if re == 0.0 && b == 0.0 {
            // γ sin k = 0 with λ + cos k < 0: |1> is the upper eigenvector.
            return Ok(PI / 2.0);
        }
        let theta = b.atan2(re);
        Ok(if theta <= -PI {
            theta + 2.0 * PI
        } else {
            theta
        })
    }

    /// The 2x2 block `H_k`, rows and columns ordered as `(|1>, |0>)`.
    pub fn block(&self, k: f64) -> [[Complex64; 2]; 2] {
        let diag = -self.lambda - k.cos();
        let off = self.gamma * k.sin();
        [
            [Complex64::new(diag, 0.0), Complex64::new(0.0, off)],
            [Complex64::new(0.0, -off), Complex64::new(-diag, 0.0)],
        ]
    }

    pub fn mode(&self, k: f64) -> Result<ModeData> {
        Ok(ModeData {
            k,
            eps: self.dispersion(k),
            theta: self.bogoliubov_angle(k)?,
            delta_theta: None,
        })
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// `Δθ_k = θ_k(pre) − θ_k(post)`, wrapped into `(-π, π]`.
pub fn delta_theta(pre: &ModelParams, post: &ModelParams, k: f64) -> Result<f64> {
    Ok(wrap_angle(
        pre.bogoliubov_angle(k)? - post.bogoliubov_angle(k)?,
    ))
}

/// Per-momentum data bundle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeData {
    pub k: f64,
    pub eps: f64,
    pub theta: f64,
    pub delta_theta: Option<f64>,
}

impl ModeData {
    /// Mode data of the pre-quench Hamiltonian with `Δθ_k` filled in.
    pub fn for_quench(pre: &ModelParams, post: &ModelParams, k: f64) -> Result<Self> {
        let mut mode = pre.mode(k)?;
        mode.delta_theta = Some(wrap_angle(mode.theta - post.bogoliubov_angle(k)?));
        Ok(mode)
    }

    pub fn phase(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }
}

/// Antiperiodic momentum grid `k_n = (2n − 1)π/N`, `n = 1..N/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    n_sites: usize,
    ks: Vec<f64>,
}

impl MomentumGrid {
    pub fn new(n_sites: usize) -> Result<Self> {
        if n_sites == 0 || !n_sites.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "chain length N = {n_sites} must be even and positive"
            )));
        }
        let ks = (1..=n_sites / 2)
            .map(|n| (2 * n - 1) as f64 * PI / n_sites as f64)
            .collect();
        Ok(Self { n_sites, ks })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn ks(&self) -> &[f64] {
        &self.ks
    }

    pub fn len(&self) -> usize {
        self.ks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ks.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.ks.iter().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn dispersion_examples() {
        let ising = ModelParams::new(1.0, 0.0).unwrap();
        assert_abs_diff_eq!(ising.dispersion(PI / 2.0), 1.0, epsilon = 1e-15);
        let critical = ModelParams::new(0.5, 1.0).unwrap();
        assert_abs_diff_eq!(critical.dispersion(PI), 0.0, epsilon = 1e-15);
        let pm = ModelParams::new(0.5, 1.5).unwrap();
        assert_abs_diff_eq!(pm.dispersion(PI), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn angle_at_ising_point() {
        // -1 + i
        let ising = ModelParams::new(1.0, 0.0).unwrap();
        let theta = ising.bogoliubov_angle(PI / 2.0).unwrap();
        assert_abs_diff_eq!(theta, 3.0 * PI / 4.0, epsilon = 1e-14);
    }

    #[test]
    fn angle_tends_to_pi_on_negative_real_axis() {
        let p = ModelParams::new(0.5, 2.0).unwrap();
        let theta = p.bogoliubov_angle(1e-9).unwrap();
        assert_abs_diff_eq!(theta, PI, epsilon = 1e-8);
        // exactly on the axis
        assert_abs_diff_eq!(p.bogoliubov_angle(0.0).unwrap(), PI, epsilon = 0.0);
    }

    #[test]
    fn angle_with_vanishing_pairing_above_the_band_edge() {
        // γ = 0 and λ + cos k < 0: limit γ -> 0+ gives π/2.
        let xx = ModelParams::new(0.0, 0.2).unwrap();
        let k = 2.5;
        assert_abs_diff_eq!(xx.bogoliubov_angle(k).unwrap(), PI / 2.0, epsilon = 0.0);
        let tiny = ModelParams::new(1e-9, 0.2).unwrap();
        assert_abs_diff_eq!(tiny.bogoliubov_angle(k).unwrap(), PI / 2.0, epsilon = 1e-8);
    }

    #[test]
    fn degenerate_angle_at_gap_closing() {
        let xx = ModelParams::new(0.0, 0.5).unwrap();
        let k = (-0.5f64).acos();
        assert!(matches!(
            xx.bogoliubov_angle(k),
            Err(Error::DegenerateAngle { .. })
        ));
        let critical = ModelParams::new(0.5, 1.0).unwrap();
        assert!(critical.bogoliubov_angle(PI).is_err());
    }

    #[test]
    fn no_quench_has_zero_delta_theta() {
        let p = ModelParams::new(0.3, 0.7).unwrap();
        for k in MomentumGrid::new(32).unwrap().iter() {
            assert_eq!(delta_theta(&p, &p, k).unwrap(), 0.0);
        }
    }

    #[test]
    fn delta_theta_is_wrapped() {
        // θ(γ=1, λ=0, k) = π - k/2 and θ(γ=-1, λ=0, k) = -(π - k/2); the raw
        // difference 2π - k exceeds π.
        let pre = ModelParams::new(1.0, 0.0).unwrap();
        let post = ModelParams::new(-1.0, 0.0).unwrap();
        let k = 0.4;
        let d = delta_theta(&pre, &post, k).unwrap();
        assert_abs_diff_eq!(d, -k, epsilon = 1e-13);
        assert!(d > -PI && d <= PI);
    }

    #[test]
    fn invalid_params_are_rejected() {
        assert!(ModelParams::new(1.5, 0.0).is_err());
        assert!(ModelParams::new(0.5, -0.1).is_err());
        assert!(ModelParams::new(0.5, f64::NAN).is_err());
        assert!(MomentumGrid::new(7).is_err());
        assert!(MomentumGrid::new(0).is_err());
    }

    #[test]
    fn grid_layout() {
        let grid = MomentumGrid::new(16).unwrap();
        assert_eq!(grid.len(), 8);
        assert!(grid.ks().windows(2).all(|w| w[0] < w[1]));
        assert!(grid.iter().all(|k| k > 0.0 && k < PI));
        assert_abs_diff_eq!(grid.ks()[0], PI / 16.0, epsilon = 1e-15);
    }

    #[test]
    fn grid_reflection_symmetry_only_without_field() {
        for n in [8usize, 20, 64] {
            let grid = MomentumGrid::new(n).unwrap();
            let symmetric = |p: ModelParams| {
                grid.iter()
                    .all(|k| (p.dispersion(k) - p.dispersion(PI - k)).abs() < 1e-12)
            };
            assert!(symmetric(ModelParams::new(0.6, 0.0).unwrap()));
            assert!(!symmetric(ModelParams::new(0.6, 0.3).unwrap()));
        }
    }

    proptest! {
        #[test]
        fn dispersion_properties(g in -1.0f64..1.0, l in 0.0f64..3.0, k in 1e-6f64..(PI - 1e-6)) {
            let p = ModelParams::new(g, l).unwrap();
            let q = ModelParams::new(-g, l).unwrap();
            let eps = p.dispersion(k);
            prop_assert!(eps >= 0.0);
            prop_assert_eq!(eps, q.dispersion(k));
            let direct = ((l + k.cos()).powi(2) + g * g * k.sin().powi(2)).sqrt();
            prop_assert!((eps - direct).abs() < 1e-14);
        }

        #[test]
        fn angle_matches_its_defining_phase(g in -1.0f64..1.0, l in 0.0f64..3.0, k in 1e-6f64..(PI - 1e-6)) {
            let p = ModelParams::new(g, l).unwrap();
            if let Ok(theta) = p.bogoliubov_angle(k) {
                prop_assert!(theta > -PI && theta <= PI);
                // (cos θ, sin θ) is proportional to (a - ε, γ sin k), and is
                // an eigenvector relation of the block.
                let a = -l - k.cos();
                let b = g * k.sin();
                let eps = p.dispersion(k);
                prop_assert!((b * theta.cos() - (a - eps) * theta.sin()).abs() < 1e-12);
                prop_assert!((theta.cos().powi(2) + theta.sin().powi(2) - 1.0).abs() < 1e-15);
            }
        }
    }
}
