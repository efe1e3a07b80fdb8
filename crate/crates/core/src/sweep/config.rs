//! Sweep descriptions read from TOML.
//!
//! ```toml
//! [[sweep]]
//! kind = "fisher"
//! output = "fig2_path_A.csv"
//! path = "A"
//!
//! [sweep.fixed]
//! phi = -1.5707963267948966
//!
//! [[sweep.axes]]
//! name = "beta"
//! values = [0.1, 1.0, 10.0]
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
pub enum Param {
    #[serde(rename = "gamma0")]
    Gamma0,
    #[serde(rename = "lambda0")]
    Lambda0,
    #[serde(rename = "gammaf")]
    GammaF,
    #[serde(rename = "lambdaf")]
    LambdaF,
    #[serde(rename = "beta")]
    Beta,
    #[serde(rename = "phi")]
    Phi,
    #[serde(rename = "N")]
    N,
    #[serde(rename = "t")]
    T,
}

impl Param {
    pub const ALL: [Param; 8] = [
        Param::Gamma0,
        Param::Lambda0,
        Param::GammaF,
        Param::LambdaF,
        Param::Beta,
        Param::Phi,
        Param::N,
        Param::T,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::Gamma0 => "gamma0",
            Param::Lambda0 => "lambda0",
            Param::GammaF => "gammaf",
            Param::LambdaF => "lambdaf",
            Param::Beta => "beta",
            Param::Phi => "phi",
            Param::N => "N",
            Param::T => "t",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown parameter '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    Fisher,
    Rate,
    Mz,
    OrderParam,
    BetaCLine,
    DqptArea,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Fisher => "fisher",
            SweepKind::Rate => "rate",
            SweepKind::Mz => "mz",
            SweepKind::OrderParam => "order-param",
            SweepKind::BetaCLine => "beta-c-line",
            SweepKind::DqptArea => "dqpt-area",
        }
    }
}

/// The quench paths drawn on the phase diagram, as `(γ0, λ0) -> (γf, λf)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum NamedPath {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl NamedPath {
    pub const ALL: [NamedPath; 7] = [
        NamedPath::A,
        NamedPath::B,
        NamedPath::C,
        NamedPath::D,
        NamedPath::E,
        NamedPath::F,
        NamedPath::G,
    ];

    pub fn label(self) -> &'static str {
        match self {
            NamedPath::A => "A",
            NamedPath::B => "B",
            NamedPath::C => "C",
            NamedPath::D => "D",
            NamedPath::E => "E",
            NamedPath::F => "F",
            NamedPath::G => "G",
        }
    }

    /// `(γ0, λ0, γf, λf)`
    pub fn couplings(self) -> (f64, f64, f64, f64) {
        match self {
            NamedPath::A => (0.5, 0.0, 0.5, 0.5),
            NamedPath::B => (0.5, 0.5, 0.5, 1.5),
            NamedPath::C => (0.5, 1.5, 0.5, 2.0),
            NamedPath::D => (0.8, 0.2, 0.5, 0.2),
            NamedPath::E => (0.5, 0.2, -0.5, 0.2),
            NamedPath::F => (0.8, 1.5, 0.5, 1.5),
            NamedPath::G => (0.5, 1.5, -0.5, 1.5),
        }
    }
}

impl FromStr for NamedPath {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        NamedPath::ALL
            .into_iter()
            .find(|p| p.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown quench path '{s}' (expected A-G)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: Param,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub count: Option<usize>,
    #[serde(default)]
    pub scale: Scale,
    pub values: Option<Vec<f64>>,
}

impl Axis {
    pub fn values(values: Param, v: Vec<f64>) -> Self {
        Self {
            name: values,
            min: None,
            max: None,
            count: None,
            scale: Scale::Linear,
            values: Some(v),
        }
    }

    pub fn range(name: Param, min: f64, max: f64, count: usize, scale: Scale) -> Self {
        Self {
            name,
            min: Some(min),
            max: Some(max),
            count: Some(count),
            scale,
            values: None,
        }
    }

    /// `name=v1,v2,...` or `name=min:max:count[:log]`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, rest) = spec
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("axis '{spec}' lacks '='")))?;
        let name: Param = name.trim().parse()?;
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number '{s}' in axis '{spec}'")))
        };
        if rest.contains(':') {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() < 3 || parts.len() > 4 {
                return Err(Error::Config(format!(
                    "axis '{spec}' should be name=min:max:count[:log]"
                )));
            }
            let count = parts[2]
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad count in axis '{spec}'")))?;
            let scale = match parts.get(3).map(|s| s.trim()) {
                None | Some("linear") => Scale::Linear,
                Some("log") => Scale::Log,
                Some(other) => return Err(Error::Config(format!("unknown scale '{other}'"))),
            };
            Ok(Self::range(
                name,
                num(parts[0])?,
                num(parts[1])?,
                count,
                scale,
            ))
        } else {
            let v = rest.split(',').map(num).collect::<Result<Vec<_>>>()?;
            Ok(Self::values(name, v))
        }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        if let Some(v) = &self.values {
            if self.min.is_some() || self.max.is_some() || self.count.is_some() {
                return Err(Error::Config(format!(
                    "axis '{}' mixes explicit values with a range",
                    self.name
                )));
            }
            if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Config(format!(
                    "axis '{}' needs finite values",
                    self.name
                )));
            }
            return Ok(v.clone());
        }
        let (Some(min), Some(max), Some(count)) = (self.min, self.max, self.count) else {
            return Err(Error::Config(format!(
                "axis '{}' needs either values or min, max and count",
                self.name
            )));
        };
        if count < 2 {
            return Err(Error::Config(format!(
                "axis '{}' count must be at least 2",
                self.name
            )));
        }
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::Config(format!(
                "axis '{}' needs min < max",
                self.name
            )));
        }
        let last = (count - 1) as f64;
        Ok(match self.scale {
            Scale::Linear => (0..count)
                .map(|i| {
                    if i + 1 == count {
                        max
                    } else {
                        min + (max - min) * i as f64 / last
                    }
                })
                .collect(),
            Scale::Log => {
                if min <= 0.0 {
                    return Err(Error::Config(format!(
                        "log axis '{}' needs min > 0",
                        self.name
                    )));
                }
                let ratio = (max / min).ln();
                (0..count)
                    .map(|i| {
                        if i + 1 == count {
                            max
                        } else {
                            min * (ratio * i as f64 / last).exp()
                        }
                    })
                    .collect()
            }
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepOptions {
    /// Momentum samples per Fisher-zero curve.
    pub resolution: Option<usize>,
    pub branch: Option<i64>,
    /// Convergence tolerance of the correlator limit.
    pub tol: Option<f64>,
    pub r_cap: Option<usize>,
    /// Absolute tolerance of the thermodynamic-limit rate quadrature.
    pub quad_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub output: String,
    pub path: Option<NamedPath>,
    #[serde(default)]
    pub fixed: BTreeMap<Param, f64>,
    #[serde(default)]
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub options: SweepOptions,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub sweep: Vec<SweepSpec>,
}

impl SweepFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: SweepFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if file.sweep.is_empty() {
            return Err(Error::Config("no [[sweep]] entries".into()));
        }
        for s in &file.sweep {
            s.validate()?;
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Command-line adjustments applied on top of a sweep file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub fixed: BTreeMap<Param, f64>,
    pub axes: Vec<Axis>,
    pub tol: Option<f64>,
    pub resolution: Option<usize>,
    pub path: Option<NamedPath>,
}

impl Overrides {
    pub fn is_empty(&self) -> bool {
        *self == Overrides::default()
    }

    pub fn apply(&self, spec: &mut SweepSpec) -> Result<()> {
        if let Some(p) = self.path {
            spec.path = Some(p);
        }
        for axis in &self.axes {
            spec.fixed.remove(&axis.name);
            spec.axes.retain(|a| a.name != axis.name);
            spec.axes.push(axis.clone());
        }
        for (&p, &v) in &self.fixed {
            spec.axes.retain(|a| a.name != p);
            spec.fixed.insert(p, v);
        }
        if let Some(t) = self.tol {
            spec.options.tol = Some(t);
        }
        if let Some(r) = self.resolution {
            spec.options.resolution = Some(r);
        }
        spec.validate()
    }
}

/// Resolved parameters of one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub gamma0: f64,
    pub lambda0: f64,
    pub gammaf: f64,
    pub lambdaf: f64,
    pub beta: Option<f64>,
    pub phi: f64,
    pub n_sites: Option<usize>,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "gamma0={} lambda0={} gammaf={} lambdaf={} beta={} phi={}",
            self.gamma0,
            self.lambda0,
            self.gammaf,
            self.lambdaf,
            self.beta.map_or("unset".to_string(), |b| b.to_string()),
            self.phi
        )?;
        if let Some(n) = self.n_sites {
            write!(f, " N={n}")?;
        }
        Ok(())
    }
}

impl SweepSpec {
    pub fn axis(&self, p: Param) -> Option<&Axis> {
        self.axes.iter().find(|a| a.name == p)
    }

    /// Axes that span the outer parameter grid (everything except time).
    pub fn grid_axes(&self) -> Vec<&Axis> {
        self.axes.iter().filter(|a| a.name != Param::T).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.output.trim().is_empty() {
            return Err(Error::Config("output file name is empty".into()));
        }
        let mut seen = Vec::new();
        for a in &self.axes {
            if seen.contains(&a.name) {
                return Err(Error::Config(format!("axis '{}' given twice", a.name)));
            }
            seen.push(a.name);
            a.points()?;
        }
        for (p, v) in &self.fixed {
            if !v.is_finite() {
                return Err(Error::Config(format!("fixed '{p}' is not finite")));
            }
        }
        let grid: Vec<Param> = self.grid_axes().iter().map(|a| a.name).collect();
        let has = |p: Param| self.fixed.contains_key(&p) || self.axis(p).is_some();
        let allowed: &[Param] = match self.kind {
            SweepKind::Fisher => &[
                Param::Gamma0,
                Param::Lambda0,
                Param::GammaF,
                Param::LambdaF,
                Param::Beta,
                Param::Phi,
            ],
            SweepKind::Rate => &[
                Param::Gamma0,
                Param::Lambda0,
                Param::GammaF,
                Param::LambdaF,
                Param::Beta,
                Param::Phi,
                Param::N,
            ],
            SweepKind::Mz => &[
                Param::Gamma0,
                Param::Lambda0,
                Param::Beta,
                Param::Phi,
                Param::N,
            ],
            SweepKind::OrderParam => &[Param::Gamma0, Param::Lambda0, Param::Beta, Param::Phi],
            SweepKind::BetaCLine => &[
                Param::Gamma0,
                Param::Lambda0,
                Param::GammaF,
                Param::LambdaF,
                Param::Phi,
            ],
            SweepKind::DqptArea => &[
                Param::Gamma0,
                Param::Lambda0,
                Param::GammaF,
                Param::LambdaF,
                Param::Beta,
            ],
        };
        if let Some(bad) = grid.iter().find(|p| !allowed.contains(p)) {
            return Err(Error::Config(format!(
                "axis '{bad}' is not supported by a {} sweep",
                self.kind.name()
            )));
        }
        if self.kind != SweepKind::Rate && self.axis(Param::T).is_some() {
            return Err(Error::Config(format!(
                "a {} sweep has no time axis",
                self.kind.name()
            )));
        }
        match self.kind {
            SweepKind::Rate => {
                if self.axis(Param::T).is_none() {
                    return Err(Error::Config("a rate sweep needs a 't' axis".into()));
                }
            }
            SweepKind::BetaCLine => {
                if grid.len() != 1 {
                    return Err(Error::Config(
                        "a beta-c-line sweep takes exactly one axis".into(),
                    ));
                }
            }
            SweepKind::DqptArea
                if (grid.len() != 2 || grid[1] != Param::Beta || grid[0] == Param::Beta) =>
            {
                return Err(Error::Config(
                    "a dqpt-area sweep takes two axes: the x parameter, then beta".into(),
                ));
            }
            _ => {}
        }
        if !matches!(self.kind, SweepKind::BetaCLine | SweepKind::DqptArea) && !has(Param::Beta) {
            return Err(Error::Config(format!(
                "a {} sweep needs beta",
                self.kind.name()
            )));
        }
        if let Some(r) = self.options.resolution {
            if r < 256 {
                return Err(Error::Config("resolution must be at least 256".into()));
            }
        }
        if let Some(t) = self.options.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config("tol must be positive".into()));
            }
        }
        if let Some(t) = self.options.quad_tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config("quad_tol must be positive".into()));
            }
        }
        Ok(())
    }

    /// Cartesian product of the grid axes, first axis outermost.
    pub fn grid(&self) -> Result<Vec<Point>> {
        let axes = self.grid_axes();
        let values: Vec<Vec<f64>> = axes.iter().map(|a| a.points()).collect::<Result<_>>()?;
        let mut points = Vec::new();
        let mut idx = vec![0usize; axes.len()];
        loop {
            let mut assigned = self.fixed.clone();
            for (a, (axis, i)) in axes.iter().zip(&idx).enumerate() {
                assigned.insert(axis.name, values[a][*i]);
            }
            points.push(self.resolve(&assigned)?);
            // odometer increment, last axis fastest
            let mut d = axes.len();
            loop {
                if d == 0 {
                    return Ok(points);
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < values[d].len() {
                    break;
                }
                idx[d] = 0;
            }
        }
    }

    fn resolve(&self, assigned: &BTreeMap<Param, f64>) -> Result<Point> {
        let from_path = self.path.map(|p| p.couplings());
        let get = |p: Param, path_value: Option<f64>| assigned.get(&p).copied().or(path_value);
        let gamma0 = get(Param::Gamma0, from_path.map(|c| c.0))
            .ok_or_else(|| Error::Config("gamma0 is not set".into()))?;
        let lambda0 = get(Param::Lambda0, from_path.map(|c| c.1))
            .ok_or_else(|| Error::Config("lambda0 is not set".into()))?;
        let gammaf = get(Param::GammaF, from_path.map(|c| c.2)).unwrap_or(gamma0);
        let lambdaf = get(Param::LambdaF, from_path.map(|c| c.3)).unwrap_or(lambda0);
        let n_sites = match assigned.get(&Param::N) {
            None => None,
            Some(&n) if n >= 2.0 && n.fract() == 0.0 && (n as usize).is_multiple_of(2) => {
                Some(n as usize)
            }
            Some(n) => return Err(Error::Config(format!("N = {n} must be an even integer"))),
        };
        Ok(Point {
            gamma0,
            lambda0,
            gammaf,
            lambdaf,
            beta: assigned.get(&Param::Beta).copied(),
            phi: assigned.get(&Param::Phi).copied().unwrap_or(-PI / 2.0),
            n_sites,
        })
    }

    pub fn path_label(&self) -> &'static str {
        self.path.map_or("custom", |p| p.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[[sweep]]
kind = "fisher"
output = "a.csv"
path = "A"
[[sweep.axes]]
name = "beta"
values = [0.1, 1.0, 10.0]

[[sweep]]
kind = "dqpt-area"
output = "b.csv"
[sweep.fixed]
lambda0 = 0.0
lambdaf = 0.999
[[sweep.axes]]
name = "gamma0"
min = 0.0
max = 1.0
count = 3
[[sweep.axes]]
name = "beta"
min = 0.1
max = 10.0
count = 2
scale = "log"
"#;

    #[test]
    fn parses_and_expands() {
        let f = SweepFile::parse(SAMPLE).unwrap();
        assert_eq!(f.sweep.len(), 2);
        let fisher = f.sweep[0].grid().unwrap();
        assert_eq!(fisher.len(), 3);
        assert_eq!(fisher[2].beta, Some(10.0));
        assert_eq!((fisher[0].gamma0, fisher[0].lambdaf), (0.5, 0.5));
        assert_eq!(fisher[0].phi, -PI / 2.0);

        let area = f.sweep[1].grid().unwrap();
        assert_eq!(area.len(), 6);
        assert_eq!((area[1].gamma0, area[1].beta), (0.0, Some(10.0)));
        assert_eq!(area[2].gamma0, 0.5);
        assert_eq!(area[5].gammaf, 1.0);
    }

    #[test]
    fn rejects_invalid_specs() {
        let bad = SAMPLE.replace("count = 3", "count = 1");
        assert!(matches!(SweepFile::parse(&bad), Err(Error::Config(_))));
        let bad = SAMPLE.replace("kind = \"fisher\"", "kind = \"nonsense\"");
        assert!(SweepFile::parse(&bad).is_err());
        let bad = SAMPLE.replace("max = 1.0", "max = -1.0");
        assert!(SweepFile::parse(&bad).is_err());
        let bad = SAMPLE.replace("name = \"gamma0\"", "name = \"omega\"");
        assert!(SweepFile::parse(&bad).is_err());
        assert!(SweepFile::parse("").is_err());
    }

    #[test]
    fn axis_shorthand() {
        let a = Axis::parse("beta=0.1:10:3:log").unwrap();
        let p = a.points().unwrap();
        assert_eq!(p.len(), 3);
        assert!((p[1] - 1.0).abs() < 1e-12);
        let b = Axis::parse("gamma0=0.1,0.2").unwrap();
        assert_eq!(b.points().unwrap(), vec![0.1, 0.2]);
        assert!(Axis::parse("gamma0").is_err());
        assert!(Axis::parse("beta=1:2").is_err());
    }

    #[test]
    fn overrides_replace_axes() {
        let mut f = SweepFile::parse(SAMPLE).unwrap();
        let mut o = Overrides::default();
        o.fixed.insert(Param::Beta, 2.0);
        o.apply(&mut f.sweep[0]).unwrap();
        let g = f.sweep[0].grid().unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].beta, Some(2.0));
    }

    #[test]
    fn named_paths() {
        assert_eq!("b".parse::<NamedPath>().unwrap(), NamedPath::B);
        assert_eq!(NamedPath::E.couplings(), (0.5, 0.2, -0.5, 0.2));
        assert!("H".parse::<NamedPath>().is_err());
    }
}
