//! Coherent Gibbs initial states.
//!
//! Each mode pair is prepared in the pure state
//! `sqrt(e^{-βε}/Z) |ε+> + sqrt(e^{βε}/Z) e^{iφ} |ε->` with `Z = 2 cosh(βε)`,
//! where the eigenvectors are `|ε+> = -i sin θ |1> + cos θ |0>` and
//! `|ε-> = cos θ |1> - i sin θ |0>`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Effective inverse temperature and the relative phase shared by all modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialStateParams {
    pub beta: f64,
    pub phi: f64,
}

impl InitialStateParams {
    pub fn new(beta: f64, phi: f64) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::InvalidParams(format!(
                "beta = {beta} must be finite and non-negative"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParams(format!("phi = {phi} is not finite")));
        }
        Ok(Self {
            beta,
            phi: crate::model::wrap_angle(phi),
        })
    }

    /// The phase used throughout the figures, `φ = -π/2`.
    pub fn with_default_phase(beta: f64) -> Result<Self> {
        Self::new(beta, -PI / 2.0)
    }
}

/// Boltzmann-type weights of one mode at `x = βε ≥ 0`, evaluated in log space
/// so that arbitrarily large `x` neither overflows nor loses normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeWeights {
    /// `e^{-x} / Z`
    pub upper: f64,
    /// `e^{x} / Z`
    pub lower: f64,
    /// `1 / Z`
    pub inv_z: f64,
    /// `tanh x`
    pub tanh: f64,
}

impl ModeWeights {
    pub fn new(x: f64) -> Self {
        debug_assert!(x >= 0.0);
        // ln(1 + e^{-2x}) is well conditioned for every x >= 0.
        let l = (-2.0 * x).exp().ln_1p();
        Self {
            upper: (-2.0 * x - l).exp(),
            lower: (-l).exp(),
            inv_z: (-x - l).exp(),
            tanh: x.tanh(),
        }
    }

    /// `Z = 2 cosh x`; infinite once the value overflows.
    pub fn partition(&self) -> f64 {
        1.0 / self.inv_z
    }
}

/// Amplitudes of one mode pair in the pre-quench eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    pub a_plus: f64,
    pub a_minus_mag: f64,
    pub phi: f64,
    pub z_k: f64,
}

impl ModeState {
    /// Components on `(|1>, |0>)`.
    pub fn components(&self, theta: f64) -> [Complex64; 2] {
        let (s, c) = theta.sin_cos();
        let minus = Complex64::from_polar(self.a_minus_mag, self.phi);
        [
            Complex64::new(0.0, -s * self.a_plus) + minus * c,
            Complex64::new(c * self.a_plus, 0.0) + minus * Complex64::new(0.0, -s),
        ]
    }
}

pub fn mode_state(spec: &ModelParams, init: &InitialStateParams, k: f64) -> Result<ModeState> {
    let w = ModeWeights::new(init.beta * spec.dispersion(k));
    Ok(ModeState {
        a_plus: w.upper.sqrt(),
        a_minus_mag: w.lower.sqrt(),
        phi: init.phi,
        z_k: w.partition(),
    })
}

/// The four fermionic two-point values of one mode pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermionTwoPoint {
    /// `<c_k^† c_{-k}^†>`
    pub cdag_cdag: Complex64,
    /// `<c_k^† c_k>`
    pub cdag_c: Complex64,
    /// `<c_{-k} c_k>`
    pub c_c: Complex64,
    /// `<c_{-k} c_{-k}^†>`
    pub c_cdag: Complex64,
}

pub fn two_point(spec: &ModelParams, init: &InitialStateParams, k: f64) -> Result<FermionTwoPoint> {
    let theta = spec.bogoliubov_angle(k)?;
    let w = ModeWeights::new(init.beta * spec.dispersion(k));
    Ok(two_point_from(theta, &w, init.phi))
}

pub(crate) fn two_point_from(theta: f64, w: &ModeWeights, phi: f64) -> FermionTwoPoint {
    let (s, c) = theta.sin_cos();
    let sc = s * c;
    let (s2, c2) = (s * s, c * c);
    let i = Complex64::i();
    let e_phi = Complex64::from_polar(1.0, phi);
    let e_mphi = e_phi.conj();
    // e^{∓βε}/Z and 1/Z carry the partition function; the explicit
    // i(e^{iφ} - e^{-iφ}) factors equal -2 sin φ.
    let cdag_cdag = i * (w.upper - w.lower) * sc + (e_phi * s2 + e_mphi * c2) * w.inv_z;
    let cdag_c =
        (i * (e_phi - e_mphi) * sc) * w.inv_z + Complex64::new(w.lower * c2 + w.upper * s2, 0.0);
    let c_c = i * (w.lower - w.upper) * sc + (e_phi * c2 + e_mphi * s2) * w.inv_z;
    let c_cdag =
        (i * (e_mphi - e_phi) * sc) * w.inv_z + Complex64::new(w.upper * c2 + w.lower * s2, 0.0);
    FermionTwoPoint {
        cdag_cdag,
        cdag_c,
        c_c,
        c_cdag,
    }
}
