//! Loschmidt amplitude, echo and rate function after a sudden quench.
//!
//! Each mode pair evolves independently, so the amplitude factorizes into
//! `G_k(t) = cos(ε'_k t) + i sin(ε'_k t) · c_k` with the real coefficient
//! `c_k = cos(2Δθ_k) tanh(βε_k) - (2/Z_k) sin φ sin(2Δθ_k)`, where primed
//! energies belong to the post-quench Hamiltonian and the rest to the
//! initial state.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gibbs::{InitialStateParams, ModeWeights};
use crate::model::{ModelParams, MomentumGrid};
use crate::quadrature::{self, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemSize {
    Finite(usize),
    Thermodynamic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchProtocol {
    pub pre: ModelParams,
    pub post: ModelParams,
    pub init: InitialStateParams,
    pub size: SystemSize,
}

/// Per-mode quantities entering the amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchMode {
    pub k: f64,
    /// Initial-state energy `ε_k`.
    pub eps: f64,
    /// Post-quench energy `ε'_k`.
    pub eps_post: f64,
    pub delta_theta: f64,
    pub weights: ModeWeights,
}

impl QuenchMode {
    /// `c_k`, the expectation of `-H'_k / ε'_k` in the initial mode state.
    pub fn coefficient(&self, sin_phi: f64) -> f64 {
        let (s2, c2) = (2.0 * self.delta_theta).sin_cos();
        c2 * self.weights.tanh - 2.0 * self.weights.inv_z * sin_phi * s2
    }
}

impl QuenchProtocol {
    pub fn new(
        pre: ModelParams,
        post: ModelParams,
        init: InitialStateParams,
        size: SystemSize,
    ) -> Result<Self> {
        if let SystemSize::Finite(n) = size {
            if n < 2 || n % 2 != 0 {
                return Err(Error::InvalidParams(format!(
                    "chain length N = {n} must be even and at least 2"
                )));
            }
        }
        Ok(Self {
            pre,
            post,
            init,
            size,
        })
    }

    pub fn thermodynamic(pre: ModelParams, post: ModelParams, init: InitialStateParams) -> Self {
        Self {
            pre,
            post,
            init,
            size: SystemSize::Thermodynamic,
        }
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Ok(Self {
            init: InitialStateParams::new(beta, self.init.phi)?,
            ..*self
        })
    }

    pub fn with_size(&self, size: SystemSize) -> Result<Self> {
        Self::new(self.pre, self.post, self.init, size)
    }

    pub fn mode(&self, k: f64) -> Result<QuenchMode> {
        let eps = self.pre.dispersion(k);
        let theta = self.pre.bogoliubov_angle(k)?;
        let theta_post = self.post.bogoliubov_angle(k)?;
        Ok(QuenchMode {
            k,
            eps,
            eps_post: self.post.dispersion(k),
            delta_theta: crate::model::wrap_angle(theta - theta_post),
            weights: ModeWeights::new(self.init.beta * eps),
        })
    }
}

/// `G_k(t)` for one mode pair.
pub fn mode_amplitude(proto: &QuenchProtocol, k: f64, t: f64) -> Result<Complex64> {
    let mode = proto.mode(k)?;
    let c = mode.coefficient(proto.init.phi.sin());
    let (s, co) = (mode.eps_post * t).sin_cos();
    Ok(Complex64::new(co, s * c))
}

/// `ln |G_k(t)|`, from `|G|² = 1 - (1 - c²) sin²(ε' t)`.
fn log_abs_amplitude(mode: &QuenchMode, sin_phi: f64, t: f64) -> f64 {
    let c = mode.coefficient(sin_phi);
    let s = (mode.eps_post * t).sin();
    let echo = 1.0 - (1.0 - c * c) * s * s;
    if echo <= 0.0 {
        f64::NEG_INFINITY
    } else {
        0.5 * echo.ln()
    }
}

/// Sampled rate function with the cusps found on it.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub cusps: Vec<f64>,
}

impl RateTrace {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidParams(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        check_times(&times)?;
        Ok(Self {
            times,
            values,
            cusps: Vec::new(),
        })
    }

    /// Index of the sample closest to `t`.
    pub fn nearest_index(&self, t: f64) -> Option<usize> {
        self.times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(i, _)| i)
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidParams("times must be finite and >= 0".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams(
            "times must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Finite-chain rate function `-(2/N) Σ_{k>0} ln|G_k(t)|`.
///
/// Exact zeros of the echo give `+∞` samples.
pub fn rate_finite(proto: &QuenchProtocol, times: &[f64]) -> Result<RateTrace> {
    let evaluator = FiniteRate::new(proto)?;
    let values: Vec<f64> = times.par_iter().map(|&t| evaluator.at(t)).collect();
    let mut trace = RateTrace::new(times.to_vec(), values)?;
    trace.cusps = CuspDetector::default().detect_with(&trace, |t| Ok(evaluator.at(t)))?;
    Ok(trace)
}

/// Precomputed modes of a finite chain.
#[derive(Debug, Clone)]
pub struct FiniteRate {
    modes: Vec<QuenchMode>,
    sin_phi: f64,
    n_sites: usize,
}

impl FiniteRate {
    pub fn new(proto: &QuenchProtocol) -> Result<Self> {
        let SystemSize::Finite(n) = proto.size else {
            return Err(Error::InvalidParams(
                "finite-size rate function needs a finite chain length".into(),
            ));
        };
        if n < 4 {
            return Err(Error::InvalidParams(format!("N = {n} is below 4")));
        }
        let grid = MomentumGrid::new(n)?;
        let modes = grid.iter().map(|k| proto.mode(k)).collect::<Result<_>>()?;
        Ok(Self {
            modes,
            sin_phi: proto.init.phi.sin(),
            n_sites: n,
        })
    }

    pub fn at(&self, t: f64) -> f64 {
        let sum: f64 = self
            .modes
            .iter()
            .map(|m| log_abs_amplitude(m, self.sin_phi, t))
            .sum();
        -2.0 * sum / self.n_sites as f64
    }
}

/// Thermodynamic-limit rate function `-(1/π) ∫_0^π ln|G_k(t)| dk` at one time.
pub fn rate_integral_at(proto: &QuenchProtocol, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let sin_phi = proto.init.phi.sin();
    let failure = RefCell::new(None);
    let result = quadrature::integrate(
        |k| match proto.mode(k) {
            Ok(mode) => log_abs_amplitude(&mode, sin_phi, t),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        0.0,
        PI,
        cfg,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if !result.converged {
        return Err(Error::QuadratureNonConvergence {
            t,
            error: result.error,
        });
    }
    Ok(-result.value / PI)
}

/// Thermodynamic-limit rate function on a time grid, with cusps.
pub fn rate_integral(proto: &QuenchProtocol, times: &[f64]) -> Result<RateTrace> {
    rate_integral_with(proto, times, &QuadratureConfig::default())
}

pub fn rate_integral_with(
    proto: &QuenchProtocol,
    times: &[f64],
    cfg: &QuadratureConfig,
) -> Result<RateTrace> {
    check_times(times)?;
    let values = times
        .par_iter()
        .map(|&t| rate_integral_at(proto, t, cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut trace = RateTrace::new(times.to_vec(), values)?;
    trace.cusps =
        CuspDetector::default().detect_with(&trace, |t| rate_integral_at(proto, t, cfg))?;
    Ok(trace)
}

/// Locates kinks in a sampled curve.
///
/// Candidates are local maxima of the slope jump
/// `|(r_{i+1} - r_i)/h - (r_i - r_{i-1})/h|` above `median + mad_factor·MAD`.
/// With a resampling function, each candidate is re-sampled at
/// `refine_factor` times the density; a genuine kink keeps its slope jump
/// under refinement while smooth curvature shrinks with the spacing.
#[derive(Debug, Clone, Copy)]
pub struct CuspDetector {
    pub mad_factor: f64,
    pub refine_factor: usize,
    pub refine_passes: usize,
}

impl Default for CuspDetector {
    fn default() -> Self {
        Self {
            mad_factor: 10.0,
            refine_factor: 10,
            refine_passes: 2,
        }
    }
}

fn slope_jumps(times: &[f64], values: &[f64]) -> Vec<f64> {
    (1..times.len().saturating_sub(1))
        .map(|i| {
            let left = (values[i] - values[i - 1]) / (times[i] - times[i - 1]);
            let right = (values[i + 1] - values[i]) / (times[i + 1] - times[i]);
            let jump = (right - left).abs();
            if jump.is_nan() {
                f64::INFINITY
            } else {
                jump
            }
        })
        .collect()
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

impl CuspDetector {
    /// Interior sample indices flagged as kinks, with their slope jumps.
    fn candidates(&self, trace: &RateTrace) -> Vec<(usize, f64)> {
        let jumps = slope_jumps(&trace.times, &trace.values);
        if jumps.is_empty() {
            return Vec::new();
        }
        let mut sorted = jumps.clone();
        sorted.sort_by(f64::total_cmp);
        let med = median(&sorted);
        let mut dev: Vec<f64> = jumps.iter().map(|j| (j - med).abs()).collect();
        dev.sort_by(f64::total_cmp);
        let mad = median(&dev);
        let threshold = med + self.mad_factor * mad;

        let mut out: Vec<(usize, f64)> = Vec::new();
        for (j, &v) in jumps.iter().enumerate() {
            let before = if j > 0 { jumps[j - 1] } else { 0.0 };
            let after = jumps.get(j + 1).copied().unwrap_or(0.0);
            if v > threshold && v >= before && v > after {
                out.push((j + 1, v));
            }
        }
        out
    }

    /// Kink times located on the sampling grid only.
    pub fn detect(&self, trace: &RateTrace) -> Vec<f64> {
        self.candidates(trace)
            .into_iter()
            .map(|(i, _)| trace.times[i])
            .collect()
    }

    /// Kink times refined and validated by re-sampling `f`.
    pub fn detect_with<F>(&self, trace: &RateTrace, f: F) -> Result<Vec<f64>>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        let candidates = self.candidates(trace);
        let refined = candidates
            .par_iter()
            .map(|&(i, jump)| self.refine(trace, i, jump, &f))
            .collect::<Result<Vec<_>>>()?;
        let mut cusps: Vec<f64> = refined.into_iter().flatten().collect();
        cusps.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        Ok(cusps)
    }

    fn refine<F>(&self, trace: &RateTrace, i: usize, coarse_jump: f64, f: &F) -> Result<Option<f64>>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let mut lo = trace.times[i - 1];
        let mut hi = trace.times[i + 1];
        let mut reference = coarse_jump;
        let mut location = trace.times[i];
        let m = 2 * self.refine_factor + 1;
        for _ in 0..self.refine_passes {
            let ts: Vec<f64> = (0..m)
                .map(|j| lo + (hi - lo) * j as f64 / (m - 1) as f64)
                .collect();
            let vs = ts.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
            let jumps = slope_jumps(&ts, &vs);
            let (j, &best) = jumps
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .expect("refinement window has interior points");
            // Smooth curvature shrinks by refine_factor per pass; a kink does not.
            if best < reference / (self.refine_factor as f64).sqrt() {
                return Ok(None);
            }
            location = ts[j + 1];
            lo = ts[j];
            hi = ts[j + 2];
            reference = best;
        }
        Ok(Some(location))
    }
}

/// Grid-only cusp detection with default settings.
pub fn detect_cusps(trace: &RateTrace) -> Vec<f64> {
    CuspDetector::default().detect(trace)
}
