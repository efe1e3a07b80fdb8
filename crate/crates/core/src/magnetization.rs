//! Initial-state magnetizations.
//!
//! `M_z` is a direct mode sum. The in-plane order parameters come from the
//! long-distance limit of string correlators. With Majorana-type operators
//! `A_j = c_j^† + c_j` and `B_j = c_j^† - c_j`,
//!
//! ```text
//! σ_0^x σ_r^x = B_0 A_1 B_1 A_2 ... B_{r-1} A_r
//! σ_0^y σ_r^y = (-1)^r A_0 B_1 A_1 B_2 ... A_{r-1} B_r
//! ```
//!
//! and Wick's theorem turns each expectation into the Pfaffian of the
//! matrix of pairwise contractions
//!
//! ```text
//! <A_a A_b> = Q_{b-a}   <B_a B_b> = S_{b-a}
//! <B_a A_b> = G_{b-a}   <A_a B_b> = D_{b-a} = -G_{a-b}
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gibbs::{two_point_from, InitialStateParams, ModeWeights};
use crate::model::{ModelParams, MomentumGrid};
use crate::pfaffian::{pfaffian_log, SkewMatrix};

/// `M_z = (2/N) Σ_k <c_k^† c_k> - 1` over all `N` momenta.
pub fn m_z(spec: &ModelParams, init: &InitialStateParams, n_sites: usize) -> Result<f64> {
    let grid = MomentumGrid::new(n_sites)?;
    let mut sum = 0.0;
    for k in grid.iter() {
        let tp = crate::gibbs::two_point(spec, init, k)?;
        // k and its partner -k
        sum += tp.cdag_c.re + (1.0 - tp.c_cdag.re);
    }
    Ok(2.0 * sum / n_sites as f64 - 1.0)
}

/// Contractions `Q_r, S_r` for `0 ≤ r ≤ r_max` and `G_r` for `|r| ≤ r_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionTable {
    r_max: usize,
    n_sites: usize,
    q: Vec<Complex64>,
    s: Vec<Complex64>,
    g: Vec<Complex64>,
}

impl ContractionTable {
    pub fn r_max(&self) -> usize {
        self.r_max
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    fn check(&self, r: i64) -> usize {
        let a = r.unsigned_abs() as usize;
        assert!(
            a <= self.r_max,
            "distance {r} beyond table radius {}",
            self.r_max
        );
        a
    }

    pub fn q(&self, r: i64) -> Complex64 {
        let a = self.check(r);
        if r < 0 {
            -self.q[a]
        } else {
            self.q[a]
        }
    }

    pub fn s(&self, r: i64) -> Complex64 {
        let a = self.check(r);
        if r < 0 {
            -self.s[a]
        } else {
            self.s[a]
        }
    }

    pub fn g(&self, r: i64) -> Complex64 {
        self.check(r);
        self.g[(r + self.r_max as i64) as usize]
    }

    pub fn d(&self, r: i64) -> Complex64 {
        -self.g(-r)
    }
}

/// Mode sums over the `N/2` positive momenta, each paired with `-k`:
///
/// ```text
/// Q_r =  δ_{r0} - (2i/N) Σ sin(kr) (F_k + F_k^*)
/// S_r = -δ_{r0} - (2i/N) Σ sin(kr) (F_k + F_k^*)
/// G_r = (2/N) Σ [cos(kr) (n_k - h_k) - i sin(kr) (F_k - F_k^*)]
/// ```
///
/// with `F_k = <c_k^† c_{-k}^†>`, `n_k = <c_k^† c_k>`, `h_k = <c_{-k} c_{-k}^†>`.
pub fn contractions(
    spec: &ModelParams,
    init: &InitialStateParams,
    n_sites: usize,
    r_max: usize,
) -> Result<ContractionTable> {
    if 2 * r_max >= n_sites {
        return Err(Error::InvalidParams(format!(
            "radius {r_max} needs more than {n_sites} sites"
        )));
    }
    let grid = MomentumGrid::new(n_sites)?;
    let mut pair_sum = Vec::with_capacity(grid.len());
    let mut diag = Vec::with_capacity(grid.len());
    let mut anti = Vec::with_capacity(grid.len());
    for k in grid.iter() {
        let theta = spec.bogoliubov_angle(k)?;
        let w = ModeWeights::new(init.beta * spec.dispersion(k));
        let tp = two_point_from(theta, &w, init.phi);
        pair_sum.push(tp.cdag_cdag + tp.c_c);
        diag.push((tp.cdag_c - tp.c_cdag).re);
        anti.push(tp.cdag_cdag - tp.c_c);
    }
    let i = Complex64::i();
    let norm = 1.0 / n_sites as f64;
    let mut q = Vec::with_capacity(r_max + 1);
    let mut s = Vec::with_capacity(r_max + 1);
    let mut g = vec![Complex64::new(0.0, 0.0); 2 * r_max + 1];
    for r in 0..=r_max as i64 {
        let mut odd = Complex64::new(0.0, 0.0);
        let mut g_even = 0.0;
        let mut g_odd = Complex64::new(0.0, 0.0);
        for (j, k) in grid.iter().enumerate() {
            let (sn, cs) = (k * r as f64).sin_cos();
            odd += pair_sum[j] * sn;
            g_even += diag[j] * cs;
            g_odd += anti[j] * sn;
        }
        let pair = -2.0 * i * odd * norm;
        let delta = if r == 0 { 1.0 } else { 0.0 };
        q.push(pair + delta);
        s.push(pair - delta);
        let even = 2.0 * g_even * norm;
        let oddg = -2.0 * i * g_odd * norm;
        g[(r_max as i64 + r) as usize] = even + oddg;
        g[(r_max as i64 - r) as usize] = even - oddg;
    }
    Ok(ContractionTable {
        r_max,
        n_sites,
        q,
        s,
        g,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Majorana {
    A(i64),
    B(i64),
}

fn string_operators(direction: Direction, r: usize) -> Vec<Majorana> {
    let r = r as i64;
    let mut ops = Vec::with_capacity(2 * r as usize);
    for m in 0..r {
        match direction {
            Direction::X => ops.extend([Majorana::B(m), Majorana::A(m + 1)]),
            Direction::Y => ops.extend([Majorana::A(m), Majorana::B(m + 1)]),
        }
    }
    ops
}

fn contraction(table: &ContractionTable, left: Majorana, right: Majorana) -> Complex64 {
    use Majorana::*;
    match (left, right) {
        (A(a), A(b)) => table.q(b - a),
        (B(a), B(b)) => table.s(b - a),
        (B(a), A(b)) => table.g(b - a),
        (A(a), B(b)) => table.d(b - a),
    }
}

/// First row as displayed for each direction: `G_1, S_1, G_2, ..., G_r` and
/// `D_1, Q_1, D_2, ..., D_r`.
fn template_first_row(table: &ContractionTable, direction: Direction, r: usize) -> Vec<Complex64> {
    let mut row = Vec::with_capacity(2 * r - 1);
    for m in 1..=r as i64 {
        match direction {
            Direction::X => {
                row.push(table.g(m));
                if m < r as i64 {
                    row.push(table.s(m));
                }
            }
            Direction::Y => {
                row.push(table.d(m));
                if m < r as i64 {
                    row.push(table.q(m));
                }
            }
        }
    }
    row
}

/// The `2r × 2r` contraction matrix of the string operator.
pub fn correlator_matrix(
    table: &ContractionTable,
    direction: Direction,
    r: usize,
) -> Result<SkewMatrix<Complex64>> {
    if r == 0 || r > table.r_max {
        return Err(Error::InvalidParams(format!(
            "distance {r} outside 1..={}",
            table.r_max
        )));
    }
    let ops = string_operators(direction, r);
    let m = SkewMatrix::from_upper(2 * r, |p, q| contraction(table, ops[p], ops[q]))?;
    for (col, expected) in template_first_row(table, direction, r)
        .into_iter()
        .enumerate()
    {
        if m.get(0, col + 1) != expected {
            return Err(Error::PatternMismatch { column: col + 1 });
        }
    }
    Ok(m)
}

/// `<σ_0^α σ_r^α>` as a complex number; the imaginary part is numerical
/// residue.
pub fn correlator(table: &ContractionTable, direction: Direction, r: usize) -> Result<Complex64> {
    let m = correlator_matrix(table, direction, r)?;
    let scale = m.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let real = m.as_slice().iter().all(|z| z.im.abs() <= 1e-15 * scale);
    let pf = if real {
        let re = SkewMatrix::new(2 * r, m.as_slice().iter().map(|z| z.re).collect())?;
        Complex64::new(pfaffian_log(&re).value(), 0.0)
    } else {
        pfaffian_log(&m).value()
    };
    Ok(match direction {
        Direction::X => pf,
        Direction::Y if r % 2 == 1 => -pf,
        Direction::Y => pf,
    })
}

pub fn correlator_x(table: &ContractionTable, r: usize) -> Result<Complex64> {
    correlator(table, Direction::X, r)
}

pub fn correlator_y(table: &ContractionTable, r: usize) -> Result<Complex64> {
    correlator(table, Direction::Y, r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderParamConfig {
    /// Absolute change of the correlator between doublings of `r` that counts
    /// as converged; correlators are bounded by one.
    pub tol: f64,
    pub r_start: usize,
    pub r_cap: usize,
    /// Chain length used for the contraction sums, as a multiple of `r_cap`.
    pub size_factor: usize,
}

impl Default for OrderParamConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            r_start: 8,
            r_cap: 256,
            size_factor: 8,
        }
    }
}

impl OrderParamConfig {
    pub fn n_sites(&self) -> usize {
        self.size_factor * self.r_cap
    }

    fn validate(&self) -> Result<()> {
        if self.tol.is_nan()
            || self.tol <= 0.0
            || self.r_start == 0
            || self.r_cap < self.r_start
            || self.size_factor < 3
        {
            return Err(Error::InvalidParams(format!(
                "invalid order-parameter settings {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitStatus {
    Converged,
    /// Still changing at `r_cap`; the limit is the mean of the last two values.
    NonConverged,
    /// The extrapolated correlator is below `-10·tol`.
    NegativeLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderParameter {
    pub value: f64,
    pub limit: f64,
    pub r_used: usize,
    pub status: LimitStatus,
    pub history: Vec<(usize, f64)>,
}

pub fn order_parameter(
    spec: &ModelParams,
    init: &InitialStateParams,
    direction: Direction,
    cfg: &OrderParamConfig,
) -> Result<OrderParameter> {
    cfg.validate()?;
    let table = contractions(spec, init, cfg.n_sites(), cfg.r_cap)?;
    order_parameter_from(&table, direction, cfg)
}

pub fn order_parameter_from(
    table: &ContractionTable,
    direction: Direction,
    cfg: &OrderParamConfig,
) -> Result<OrderParameter> {
    cfg.validate()?;
    let mut history = Vec::new();
    let mut r = cfg.r_start;
    let mut prev: Option<f64> = None;
    let mut outcome = None;
    while r <= cfg.r_cap.min(table.r_max) {
        let c = correlator(table, direction, r)?.re;
        history.push((r, c));
        if let Some(p) = prev {
            if (c - p).abs() < cfg.tol {
                outcome = Some((c, r, LimitStatus::Converged));
                break;
            }
        }
        prev = Some(c);
        r *= 2;
    }
    let (limit, r_used, mut status) = match outcome {
        Some(o) => o,
        None => {
            let n = history.len();
            let (r_last, c_last) = history[n - 1];
            let mean = if n >= 2 {
                0.5 * (c_last + history[n - 2].1)
            } else {
                c_last
            };
            (mean, r_last, LimitStatus::NonConverged)
        }
    };
    if limit < -10.0 * cfg.tol {
        status = LimitStatus::NegativeLimit;
    }
    Ok(OrderParameter {
        value: limit.max(0.0).sqrt(),
        limit,
        r_used,
        status,
        history,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnetizationPoint {
    pub mx: f64,
    pub my: f64,
    pub mz: f64,
    pub r_used: usize,
    pub converged: bool,
    pub status_x: LimitStatus,
    pub status_y: LimitStatus,
}

/// `M_x`, `M_y` and `M_z` from one contraction table.
pub fn magnetization_point(
    spec: &ModelParams,
    init: &InitialStateParams,
    cfg: &OrderParamConfig,
) -> Result<MagnetizationPoint> {
    cfg.validate()?;
    let n = cfg.n_sites();
    let table = contractions(spec, init, n, cfg.r_cap)?;
    let x = order_parameter_from(&table, Direction::X, cfg)?;
    let y = order_parameter_from(&table, Direction::Y, cfg)?;
    Ok(MagnetizationPoint {
        mx: x.value,
        my: y.value,
        mz: m_z(spec, init, n)?,
        r_used: x.r_used.max(y.r_used),
        converged: x.status == LimitStatus::Converged && y.status == LimitStatus::Converged,
        status_x: x.status,
        status_y: y.status,
    })
}
