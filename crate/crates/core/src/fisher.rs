//! Fisher zeros of the Loschmidt amplitude and the critical effective inverse
//! temperature.
//!
//! For one mode the zeros sit at
//!
//! ```text
//! z_n(k) = [ ln|P_k / M_k| + i(2n+1)π ] / (2ε'_k)
//! P_k = e^{-βε} cos²Δθ + e^{βε} sin²Δθ + sin 2Δθ sin φ
//! M_k = e^{-βε} sin²Δθ + e^{βε} cos²Δθ - sin 2Δθ sin φ
//! ```
//!
//! `P_k` and `M_k` are `Z_k(1 ∓ c_k)/2` with `c_k` the Loschmidt mode
//! coefficient, so the zero line meets the imaginary axis exactly where
//! `g(k) = sinh(βε) cos 2Δθ - sin φ sin 2Δθ` changes sign.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::loschmidt::{QuenchMode, QuenchProtocol};

pub const SCAN_POINTS: usize = 2048;
pub const ROOT_TOLERANCE: f64 = 1e-10;
pub const BETA_LO: f64 = 1e-3;
pub const BETA_HI: f64 = 1e3;
pub const BETA_TOLERANCE: f64 = 1e-4;
pub const PRESCAN_POINTS: usize = 8;

/// `g(k) / cosh(βε_k)`, which has the sign of `g` and stays bounded for any β.
pub fn crossing_function(proto: &QuenchProtocol, k: f64) -> Result<f64> {
    let mode = proto.mode(k)?;
    Ok(mode.coefficient(proto.init.phi.sin()))
}

/// `g(k)` itself; overflows to ±∞ for large `βε`.
pub fn crossing_function_unscaled(proto: &QuenchProtocol, k: f64) -> Result<f64> {
    let mode = proto.mode(k)?;
    let x = proto.init.beta * mode.eps;
    let (s2, c2) = (2.0 * mode.delta_theta).sin_cos();
    Ok(x.sinh() * c2 - proto.init.phi.sin() * s2)
}

/// `P_k / Z_k` and `M_k / Z_k`.
fn ratio_parts(mode: &QuenchMode, sin_phi: f64) -> (f64, f64) {
    let w = &mode.weights;
    let (s, c) = mode.delta_theta.sin_cos();
    let cross = (2.0 * mode.delta_theta).sin() * sin_phi * w.inv_z;
    let p = w.upper * c * c + w.lower * s * s + cross;
    let m = w.upper * s * s + w.lower * c * c - cross;
    (p.abs(), m.abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherSample {
    pub k: f64,
    pub re_z: f64,
    pub im_z: f64,
    /// The ratio inside the logarithm vanished or diverged; `re_z` is ±∞.
    pub infinite: bool,
}

pub fn fisher_zero(proto: &QuenchProtocol, branch: i64, k: f64) -> Result<FisherSample> {
    let mode = proto.mode(k)?;
    let (p, m) = ratio_parts(&mode, proto.init.phi.sin());
    let denom = 2.0 * mode.eps_post;
    let re_z = (p.ln() - m.ln()) / denom;
    Ok(FisherSample {
        k,
        re_z,
        im_z: (2 * branch + 1) as f64 * PI / denom,
        infinite: p == 0.0 || m == 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub k_star: f64,
    pub eps_post: f64,
    /// `t_c^{(n)} = (2n+1)π / (2ε'_{k*})` for `n = 0, 1, 2`.
    pub critical_times: [f64; 3],
}

impl Crossing {
    pub fn critical_time(&self, n: u32) -> f64 {
        (2 * n + 1) as f64 * PI / (2.0 * self.eps_post)
    }

    /// Every `t_c^{(n)}` not beyond `t_max`.
    pub fn critical_times_until(&self, t_max: f64) -> Vec<f64> {
        (0..)
            .map(|n| self.critical_time(n))
            .take_while(|t| *t <= t_max)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FisherCurve {
    pub branch: i64,
    pub samples: Vec<FisherSample>,
    pub crossings: Vec<Crossing>,
}

/// Samples `z_n(k)` at `k_i = (i + 1/2)π / resolution`. Momenta where the
/// Bogoliubov angle is undefined are left out.
pub fn fisher_curve(proto: &QuenchProtocol, branch: i64, resolution: usize) -> Result<FisherCurve> {
    if resolution < 256 {
        return Err(Error::InvalidParams(format!(
            "resolution {resolution} is below 256"
        )));
    }
    let mut samples = Vec::with_capacity(resolution);
    for i in 0..resolution {
        let k = (i as f64 + 0.5) * PI / resolution as f64;
        match fisher_zero(proto, branch, k) {
            Ok(s) => samples.push(s),
            Err(Error::DegenerateAngle { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(FisherCurve {
        branch,
        samples,
        crossings: find_crossings(proto),
    })
}

fn bisect_root(proto: &QuenchProtocol, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    while hi - lo >= ROOT_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        let f_mid = match crossing_function(proto, mid) {
            Ok(v) => v,
            // Gap closings sit at isolated momenta; step to one side.
            Err(_) => return mid,
        };
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn crossing_at(proto: &QuenchProtocol, k_star: f64) -> Crossing {
    let eps_post = proto.post.dispersion(k_star);
    let tc = |n: u32| (2 * n + 1) as f64 * PI / (2.0 * eps_post);
    Crossing {
        k_star,
        eps_post,
        critical_times: [tc(0), tc(1), tc(2)],
    }
}

/// Roots of `g` on `(0, π)` from a uniform scan refined by bisection.
pub fn find_crossings(proto: &QuenchProtocol) -> Vec<Crossing> {
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 1..SCAN_POINTS {
        let k = i as f64 * PI / SCAN_POINTS as f64;
        let Ok(v) = crossing_function(proto, k) else {
            prev = None;
            continue;
        };
        if v == 0.0 {
            roots.push(k);
            prev = None;
            continue;
        }
        if let Some((k0, v0)) = prev {
            if (v0 > 0.0) != (v > 0.0) {
                roots.push(bisect_root(proto, k0, k, v0));
            }
        }
        prev = Some((k, v));
    }
    roots.into_iter().map(|k| crossing_at(proto, k)).collect()
}

pub fn has_crossing(proto: &QuenchProtocol) -> bool {
    !find_crossings(proto).is_empty()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriticalBeta {
    /// Crossings exist below this β and not above.
    Value(f64),
    /// Crossings at every β up to the upper bracket end.
    AlwaysTransition,
    /// No crossing even at the lower bracket end.
    NoTransition,
}

#[derive(Debug, Clone, Copy)]
pub struct BetaBracket {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    pub prescan: usize,
}

impl Default for BetaBracket {
    fn default() -> Self {
        Self {
            lo: BETA_LO,
            hi: BETA_HI,
            tol: BETA_TOLERANCE,
            prescan: PRESCAN_POINTS,
        }
    }
}

/// Boundary in β of crossing existence for the protocol family with β free.
pub fn critical_beta(proto: &QuenchProtocol) -> Result<CriticalBeta> {
    critical_beta_in(proto, &BetaBracket::default())
}

pub fn critical_beta_in(proto: &QuenchProtocol, bracket: &BetaBracket) -> Result<CriticalBeta> {
    if !(bracket.lo > 0.0 && bracket.hi > bracket.lo && bracket.prescan >= 2) {
        return Err(Error::InvalidParams("invalid beta bracket".into()));
    }
    let exists = |beta: f64| -> Result<bool> { Ok(has_crossing(&proto.with_beta(beta)?)) };
    let n = bracket.prescan;
    let ratio = (bracket.hi / bracket.lo).ln();
    let betas: Vec<f64> = (0..n)
        .map(|i| {
            if i == n - 1 {
                bracket.hi
            } else {
                bracket.lo * (ratio * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect();
    let pattern = betas
        .iter()
        .map(|&b| exists(b))
        .collect::<Result<Vec<_>>>()?;

    let first_false = pattern.iter().position(|p| !p).unwrap_or(n);
    if pattern[first_false..].iter().any(|p| *p) {
        return Err(Error::NonMonotoneBracket { betas, pattern });
    }
    if first_false == n {
        return Ok(CriticalBeta::AlwaysTransition);
    }
    if first_false == 0 {
        return Ok(CriticalBeta::NoTransition);
    }
    let (mut lo, mut hi) = (betas[first_false - 1], betas[first_false]);
    while hi - lo >= bracket.tol {
        let mid = 0.5 * (lo + hi);
        if exists(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CriticalBeta::Value(0.5 * (lo + hi)))
}
