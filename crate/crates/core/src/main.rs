use std::collections::BTreeMap;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use xydqpt::sweep::output::write_table;
use xydqpt::sweep::run::{spectrum_rows, DEFAULT_RESOLUTION, SPECTRUM_HEADER};
use xydqpt::sweep::{
    figure_config, run_file, Axis, NamedPath, Overrides, Param, SweepFile, SweepKind, SweepOptions,
    SweepSpec,
};
use xydqpt::{Error, ModelParams, Result};

#[derive(Parser)]
#[command(
    name = "xydqpt",
    version,
    about = "Quench dynamics of the XY chain from coherent Gibbs states"
)]
struct Cli {
    /// Worker threads for sweeps.
    #[arg(long, global = true, env = "XYDQPT_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quasiparticle dispersion and Bogoliubov angle over (0, π).
    Spectrum {
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        /// Output file; standard output when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fisher-zero curves with crossing flags.
    Fisher(SweepArgs),
    /// Loschmidt rate function with cusp flags.
    Rate(SweepArgs),
    /// Initial-state magnetizations.
    Magnetization {
        #[arg(long, value_enum, default_value_t = MagnetizationKind::OrderParam)]
        kind: MagnetizationKind,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Critical β along one parameter axis.
    BetaC(SweepArgs),
    /// DQPT area over a parameter and β, with magnetizations.
    Area(SweepArgs),
    /// Every sweep behind one figure.
    Figure {
        #[arg(value_name = "TAG")]
        tag: String,
        /// Replaces the shipped config for this figure.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Compares the fast kernels against their oracles.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum MagnetizationKind {
    Mz,
    OrderParam,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep file; flags below override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Output file name when no config is given.
    #[arg(long)]
    output: Option<String>,
    /// Named quench path A-G.
    #[arg(long)]
    path: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gammaf: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambdaf: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    #[arg(long = "n-sites")]
    n_sites: Option<usize>,
    /// `name=min:max:count[:log]` or `name=v1,v2,...`; repeatable.
    #[arg(long = "axis", allow_hyphen_values = true)]
    axes: Vec<String>,
    /// Correlator convergence tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Momentum samples per Fisher-zero curve.
    #[arg(long)]
    resolution: Option<usize>,
}

impl SweepArgs {
    fn overrides(&self) -> Result<Overrides> {
        let mut fixed = BTreeMap::new();
        for (p, v) in [
            (Param::Gamma0, self.gamma0),
            (Param::Lambda0, self.lambda0),
            (Param::GammaF, self.gammaf),
            (Param::LambdaF, self.lambdaf),
            (Param::Beta, self.beta),
            (Param::Phi, self.phi),
            (Param::N, self.n_sites.map(|n| n as f64)),
        ] {
            if let Some(v) = v {
                fixed.insert(p, v);
            }
        }
        Ok(Overrides {
            fixed,
            axes: self
                .axes
                .iter()
                .map(|a| Axis::parse(a))
                .collect::<Result<_>>()?,
            tol: self.tol,
            resolution: self.resolution,
            path: self
                .path
                .as_deref()
                .map(str::parse::<NamedPath>)
                .transpose()?,
        })
    }

    fn sweep_file(&self, kind: SweepKind) -> Result<SweepFile> {
        let overrides = self.overrides()?;
        let mut file = match &self.config {
            Some(path) => {
                let file = SweepFile::load(path)?;
                if let Some(bad) = file.sweep.iter().find(|s| s.kind != kind) {
                    return Err(Error::Config(format!(
                        "config holds a {} sweep but the subcommand runs {}",
                        bad.kind.name(),
                        kind.name()
                    )));
                }
                file
            }
            None => SweepFile {
                sweep: vec![SweepSpec {
                    kind,
                    output: self
                        .output
                        .clone()
                        .unwrap_or_else(|| format!("{}.csv", kind.name())),
                    path: None,
                    fixed: BTreeMap::new(),
                    axes: Vec::new(),
                    options: SweepOptions::default(),
                }],
            },
        };
        for s in &mut file.sweep {
            overrides.apply(s)?;
        }
        Ok(file)
    }
}

fn sweep(args: &SweepArgs, kind: SweepKind, workers: Option<usize>) -> Result<()> {
    let file = args.sweep_file(kind)?;
    for summary in run_file(&file, &args.out, workers)? {
        println!("{summary}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let workers = cli.workers;
    match cli.command {
        Command::Spectrum {
            gamma,
            lambda,
            resolution,
            output,
        } => {
            let params =
                ModelParams::new(gamma, lambda).map_err(|e| Error::Config(e.to_string()))?;
            if resolution < 2 {
                return Err(Error::Config("resolution must be at least 2".into()));
            }
            let rows = spectrum_rows(&params, resolution);
            match output {
                Some(path) => write_table(std::fs::File::create(path)?, &SPECTRUM_HEADER, &rows)?,
                None => write_table(io::stdout().lock(), &SPECTRUM_HEADER, &rows)?,
            }
        }
        Command::Fisher(a) => sweep(&a, SweepKind::Fisher, workers)?,
        Command::Rate(a) => sweep(&a, SweepKind::Rate, workers)?,
        Command::Magnetization { kind, sweep: a } => {
            let kind = match kind {
                MagnetizationKind::Mz => SweepKind::Mz,
                MagnetizationKind::OrderParam => SweepKind::OrderParam,
            };
            sweep(&a, kind, workers)?
        }
        Command::BetaC(a) => sweep(&a, SweepKind::BetaCLine, workers)?,
        Command::Area(a) => sweep(&a, SweepKind::DqptArea, workers)?,
        Command::Figure { tag, config, out } => {
            // reject unknown tags even when a replacement config is given
            let shipped = figure_config(&tag)?;
            let file = match config {
                Some(path) => SweepFile::load(&path)?,
                None => shipped,
            };
            for summary in run_file(&file, &out, workers)? {
                println!("{summary}");
            }
        }
        Command::Selftest => {
            let checks = xydqpt::selftest::run();
            for c in &checks {
                let verdict = if c.passed() { "PASS" } else { "FAIL" };
                println!(
                    "{verdict} {} (max deviation {:.3e}, tolerance {:.0e})",
                    c.name, c.deviation, c.tolerance
                );
            }
            if !checks.iter().all(|c| c.passed()) {
                return Ok(ExitCode::from(3));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
