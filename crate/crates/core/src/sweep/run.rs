//! Grid execution: points are evaluated on a worker pool and written in grid order.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fisher::{critical_beta, find_crossings, fisher_curve, CriticalBeta};
use crate::gibbs::InitialStateParams;
use crate::loschmidt::{rate_finite, rate_integral_with, QuenchProtocol, SystemSize};
use crate::magnetization::{m_z, magnetization_point, LimitStatus, OrderParamConfig};
use crate::model::ModelParams;
use crate::quadrature::QuadratureConfig;
use crate::sweep::config::{Param, Point, SweepFile, SweepKind, SweepSpec};
use crate::sweep::output::{flag, float, header, CsvSink, Row};

pub const DEFAULT_RESOLUTION: usize = 512;
/// Placeholder β for protocols whose β is scanned internally.
const FREE_BETA: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct SweepSummary {
    pub kind: SweepKind,
    pub output: PathBuf,
    pub points: usize,
    /// Fisher-zero crossings, cusps, finite β_c values or DQPT cells, per kind.
    pub crossings: usize,
    pub rows: usize,
    pub elapsed: Duration,
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} points, {} crossings, {} rows -> {} ({:.2} s)",
            self.kind.name(),
            self.points,
            self.crossings,
            self.rows,
            self.output.display(),
            self.elapsed.as_secs_f64()
        )
    }
}

/// Runs `f` on a pool of `workers` threads, or on the global pool when `None`.
pub fn with_workers<T, F>(workers: Option<usize>, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::Config("worker count must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

pub fn run_file(
    file: &SweepFile,
    out_dir: &Path,
    workers: Option<usize>,
) -> Result<Vec<SweepSummary>> {
    std::fs::create_dir_all(out_dir)?;
    with_workers(workers, || {
        file.sweep.iter().map(|s| run_sweep(s, out_dir)).collect()
    })?
}

struct PointOutput {
    rows: Vec<Row>,
    crossings: usize,
}

/// Evaluates every grid point of `spec` and writes `out_dir/spec.output`.
///
/// On a failing point the rows of all earlier points are kept, a row with
/// status `error` is appended for the failing point, and the error is
/// returned with the point attached.
pub fn run_sweep(spec: &SweepSpec, out_dir: &Path) -> Result<SweepSummary> {
    spec.validate()?;
    let start = Instant::now();
    let grid = spec.grid()?;
    let output = out_dir.join(&spec.output);
    let mut sink = CsvSink::create(&output, spec.kind)?;

    let beta_c = match spec.kind {
        SweepKind::DqptArea => {
            let n_beta = spec
                .axis(Param::Beta)
                .map_or(1, |a| a.points().map_or(1, |p| p.len()));
            let firsts: Vec<Point> = grid.iter().step_by(n_beta).copied().collect();
            firsts.par_iter().map(beta_c_entry).collect::<Vec<_>>()
        }
        _ => Vec::new(),
    };
    let n_beta = grid.len() / beta_c.len().max(1);

    let results: Vec<Result<PointOutput>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let bc = beta_c.get(i / n_beta.max(1));
            evaluate(spec, p, bc)
        })
        .collect();

    let mut crossings = 0;
    for (p, r) in grid.iter().zip(results) {
        match r {
            Ok(out) => {
                crossings += out.crossings;
                for row in &out.rows {
                    sink.write(row)?;
                }
            }
            Err(e) => {
                sink.write(&error_row(spec, p))?;
                sink.finish()?;
                return Err(Error::AtPoint {
                    point: p.to_string(),
                    source: Box::new(e),
                });
            }
        }
    }
    let rows = sink.finish()?;
    Ok(SweepSummary {
        kind: spec.kind,
        output,
        points: grid.len(),
        crossings,
        rows,
        elapsed: start.elapsed(),
    })
}

fn protocol(p: &Point, beta: f64) -> Result<QuenchProtocol> {
    let pre = ModelParams::new(p.gamma0, p.lambda0)?;
    let post = ModelParams::new(p.gammaf, p.lambdaf)?;
    let init = InitialStateParams::new(beta, p.phi)?;
    let size = p
        .n_sites
        .map_or(SystemSize::Thermodynamic, SystemSize::Finite);
    QuenchProtocol::new(pre, post, init, size)
}

fn require_beta(p: &Point) -> Result<f64> {
    p.beta
        .ok_or_else(|| Error::Config("beta is not set".into()))
}

fn order_config(spec: &SweepSpec) -> OrderParamConfig {
    let mut cfg = OrderParamConfig::default();
    if let Some(t) = spec.options.tol {
        cfg.tol = t;
    }
    if let Some(r) = spec.options.r_cap {
        cfg.r_cap = r;
    }
    cfg
}

/// β_c encoded for the CSV: `inf` when every β crosses, `0` when none does,
/// NaN when crossing existence is not monotone in β.
fn beta_c_entry(p: &Point) -> Result<(f64, &'static str)> {
    let proto = protocol(p, FREE_BETA)?;
    Ok(match critical_beta(&proto) {
        Ok(CriticalBeta::Value(b)) => (b, "ok"),
        Ok(CriticalBeta::AlwaysTransition) => (f64::INFINITY, "always"),
        Ok(CriticalBeta::NoTransition) => (0.0, "never"),
        Err(Error::NonMonotoneBracket { .. }) => (f64::NAN, "nonmonotone"),
        Err(e) => return Err(e),
    })
}

fn limit_status(a: LimitStatus, b: LimitStatus) -> &'static str {
    if a == LimitStatus::NegativeLimit || b == LimitStatus::NegativeLimit {
        "negative_limit"
    } else if a == LimitStatus::NonConverged || b == LimitStatus::NonConverged {
        "nonconverged"
    } else {
        "ok"
    }
}

fn x_param(spec: &SweepSpec) -> Param {
    spec.grid_axes()[0].name
}

fn param_value(p: &Point, name: Param) -> f64 {
    match name {
        Param::Gamma0 => p.gamma0,
        Param::Lambda0 => p.lambda0,
        Param::GammaF => p.gammaf,
        Param::LambdaF => p.lambdaf,
        Param::Beta => p.beta.unwrap_or(f64::NAN),
        Param::Phi => p.phi,
        Param::N => p.n_sites.map_or(f64::NAN, |n| n as f64),
        Param::T => f64::NAN,
    }
}

fn evaluate(
    spec: &SweepSpec,
    p: &Point,
    beta_c: Option<&Result<(f64, &'static str)>>,
) -> Result<PointOutput> {
    match spec.kind {
        SweepKind::Fisher => {
            let beta = require_beta(p)?;
            let proto = protocol(p, beta)?;
            let resolution = spec.options.resolution.unwrap_or(DEFAULT_RESOLUTION);
            let branch = spec.options.branch.unwrap_or(0);
            let curve = fisher_curve(&proto, branch, resolution)?;
            let ks: Vec<f64> = find_crossings(&proto).iter().map(|c| c.k_star).collect();
            let half = 0.5 * std::f64::consts::PI / resolution as f64;
            let rows = curve
                .samples
                .iter()
                .map(|s| {
                    let hit = ks.iter().any(|&k| k >= s.k - half && k < s.k + half);
                    vec![
                        spec.path_label().to_string(),
                        float(beta),
                        float(p.phi),
                        float(s.k),
                        float(s.re_z),
                        float(s.im_z),
                        branch.to_string(),
                        flag(hit),
                        if s.infinite { "infinite_re" } else { "ok" }.to_string(),
                    ]
                })
                .collect();
            Ok(PointOutput {
                rows,
                crossings: ks.len(),
            })
        }
        SweepKind::Rate => {
            let beta = require_beta(p)?;
            let proto = protocol(p, beta)?;
            let times = spec
                .axis(Param::T)
                .ok_or_else(|| Error::Config("a rate sweep needs a 't' axis".into()))?
                .points()?;
            let trace = match p.n_sites {
                Some(_) => rate_finite(&proto, &times)?,
                None => {
                    let mut cfg = QuadratureConfig::default();
                    if let Some(t) = spec.options.quad_tol {
                        cfg.abs_tol = t;
                    }
                    rate_integral_with(&proto, &times, &cfg)?
                }
            };
            let mut cusp = vec![false; times.len()];
            for &tc in &trace.cusps {
                if let Some(i) = trace.nearest_index(tc) {
                    cusp[i] = true;
                }
            }
            let rows = trace
                .times
                .iter()
                .zip(&trace.values)
                .zip(&cusp)
                .map(|((&t, &r), &c)| {
                    vec![
                        float(p.gamma0),
                        float(p.lambda0),
                        float(p.gammaf),
                        float(p.lambdaf),
                        float(beta),
                        float(p.phi),
                        p.n_sites.unwrap_or(0).to_string(),
                        float(t),
                        float(r),
                        flag(c),
                        "ok".to_string(),
                    ]
                })
                .collect();
            Ok(PointOutput {
                rows,
                crossings: trace.cusps.len(),
            })
        }
        SweepKind::Mz => {
            let beta = require_beta(p)?;
            let spec_pre = ModelParams::new(p.gamma0, p.lambda0)?;
            let init = InitialStateParams::new(beta, p.phi)?;
            let n = p.n_sites.unwrap_or_else(|| order_config(spec).n_sites());
            let mz = m_z(&spec_pre, &init, n)?;
            let row = vec![
                float(p.gamma0),
                float(p.lambda0),
                float(beta),
                float(p.phi),
                float(mz),
                float(f64::NAN),
                float(f64::NAN),
                "0".to_string(),
                flag(true),
                "ok".to_string(),
            ];
            Ok(PointOutput {
                rows: vec![row],
                crossings: 0,
            })
        }
        SweepKind::OrderParam => {
            let beta = require_beta(p)?;
            let spec_pre = ModelParams::new(p.gamma0, p.lambda0)?;
            let init = InitialStateParams::new(beta, p.phi)?;
            let m = magnetization_point(&spec_pre, &init, &order_config(spec))?;
            let row = vec![
                float(p.gamma0),
                float(p.lambda0),
                float(beta),
                float(p.phi),
                float(m.mz),
                float(m.mx),
                float(m.my),
                m.r_used.to_string(),
                flag(m.converged),
                limit_status(m.status_x, m.status_y).to_string(),
            ];
            Ok(PointOutput {
                rows: vec![row],
                crossings: 0,
            })
        }
        SweepKind::BetaCLine => {
            let x = x_param(spec);
            let (bc, status) = beta_c_entry(p)?;
            let row = vec![
                x.name().to_string(),
                float(param_value(p, x)),
                float(bc),
                status.to_string(),
            ];
            Ok(PointOutput {
                rows: vec![row],
                crossings: usize::from(status == "ok"),
            })
        }
        SweepKind::DqptArea => {
            let beta = require_beta(p)?;
            let (bc, _) = match beta_c {
                Some(Ok(v)) => *v,
                // recompute to surface the original error
                Some(Err(_)) | None => beta_c_entry(p)?,
            };
            let proto = protocol(p, beta)?;
            let inside = !find_crossings(&proto).is_empty();
            let m = magnetization_point(&proto.pre, &proto.init, &order_config(spec))?;
            let row = vec![
                float(param_value(p, x_param(spec))),
                float(beta),
                float(bc),
                float(m.mx),
                float(m.my),
                float(m.mz),
                flag(inside),
                limit_status(m.status_x, m.status_y).to_string(),
            ];
            Ok(PointOutput {
                rows: vec![row],
                crossings: usize::from(inside),
            })
        }
    }
}

/// Placeholder row for a failed point: its coordinates where the schema has
/// them, NaN elsewhere, status `error`.
fn error_row(spec: &SweepSpec, p: &Point) -> Row {
    let beta = float(p.beta.unwrap_or(f64::NAN));
    let nan = || float(f64::NAN);
    let mut row: Row = match spec.kind {
        SweepKind::Fisher => vec![
            spec.path_label().into(),
            beta,
            float(p.phi),
            nan(),
            nan(),
            nan(),
            "0".into(),
            "0".into(),
        ],
        SweepKind::Rate => vec![
            float(p.gamma0),
            float(p.lambda0),
            float(p.gammaf),
            float(p.lambdaf),
            beta,
            float(p.phi),
            p.n_sites.unwrap_or(0).to_string(),
            nan(),
            nan(),
            "0".into(),
        ],
        SweepKind::Mz | SweepKind::OrderParam => vec![
            float(p.gamma0),
            float(p.lambda0),
            beta,
            float(p.phi),
            nan(),
            nan(),
            nan(),
            "0".into(),
            "0".into(),
        ],
        SweepKind::BetaCLine => {
            let x = x_param(spec);
            vec![x.name().into(), float(param_value(p, x)), nan()]
        }
        SweepKind::DqptArea => vec![
            float(param_value(p, x_param(spec))),
            beta,
            nan(),
            nan(),
            nan(),
            nan(),
            "0".into(),
        ],
    };
    row.push("error".into());
    debug_assert_eq!(row.len(), header(spec.kind).len());
    row
}

/// Quasiparticle energy and Bogoliubov angle on `k_i = (i + 1/2)π / resolution`.
pub fn spectrum_rows(params: &ModelParams, resolution: usize) -> Vec<Row> {
    (0..resolution)
        .map(|i| {
            let k = (i as f64 + 0.5) * std::f64::consts::PI / resolution as f64;
            let theta = params.bogoliubov_angle(k).unwrap_or(f64::NAN);
            vec![float(k), float(params.dispersion(k)), float(theta)]
        })
        .collect()
}

pub const SPECTRUM_HEADER: [&str; 3] = ["k", "epsilon", "theta"];

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> SweepSpec {
        SweepFile::parse(text).unwrap().sweep.remove(0)
    }

    #[test]
    fn error_rows_match_headers() {
        let kinds = [
            ("fisher", "[sweep.fixed]\nbeta = 1.0"),
            ("rate", "[sweep.fixed]\nbeta = 1.0\n[[sweep.axes]]\nname = \"t\"\nvalues = [0.0, 1.0]"),
            ("mz", "[sweep.fixed]\nbeta = 1.0"),
            ("order-param", "[sweep.fixed]\nbeta = 1.0"),
            ("beta-c-line", "[[sweep.axes]]\nname = \"lambdaf\"\nvalues = [0.5]"),
            (
                "dqpt-area",
                "[[sweep.axes]]\nname = \"gamma0\"\nvalues = [0.5]\n[[sweep.axes]]\nname = \"beta\"\nvalues = [1.0]",
            ),
        ];
        for (kind, extra) in kinds {
            let s = spec(&format!(
                "[[sweep]]\nkind = \"{kind}\"\noutput = \"x.csv\"\npath = \"A\"\n{extra}\n"
            ));
            let p = s.grid().unwrap()[0];
            assert_eq!(error_row(&s, &p).len(), header(s.kind).len(), "{kind}");
        }
    }

    #[test]
    fn failing_point_is_reported_and_flushed() {
        let dir = tempfile::tempdir().unwrap();
        // a two-site chain is too short for the finite-size rate
        let s = spec(
            "[[sweep]]\nkind = \"rate\"\noutput = \"r.csv\"\npath = \"B\"\n\
             [sweep.fixed]\nN = 2\n[[sweep.axes]]\nname = \"beta\"\nvalues = [1.0]\n\
             [[sweep.axes]]\nname = \"t\"\nvalues = [0.0, 1.0]\n",
        );
        let err = run_sweep(&s, dir.path()).unwrap_err();
        assert!(matches!(err, Error::AtPoint { .. }));
        let text = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[1].ends_with(",error"));
    }

    #[test]
    fn beta_c_line_statuses() {
        let dir = tempfile::tempdir().unwrap();
        let s = spec(
            "[[sweep]]\nkind = \"beta-c-line\"\noutput = \"b.csv\"\n\
             [sweep.fixed]\ngamma0 = 0.5\nlambda0 = 0.0\ngammaf = 0.5\n\
             [[sweep.axes]]\nname = \"lambdaf\"\nvalues = [0.0, 0.5]\n",
        );
        let summary = run_sweep(&s, dir.path()).unwrap();
        assert_eq!(summary.rows, 2);
        let text = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[1].ends_with(",never"), "{}", lines[1]);
        assert!(lines[2].ends_with(",ok"), "{}", lines[2]);
    }

    #[test]
    fn spectrum_is_gapped_away_from_criticality() {
        let rows = spectrum_rows(&ModelParams::new(0.5, 0.5).unwrap(), 64);
        assert_eq!(rows.len(), 64);
        assert!(rows.iter().all(|r| r[1].parse::<f64>().unwrap() > 0.0));
    }
}
