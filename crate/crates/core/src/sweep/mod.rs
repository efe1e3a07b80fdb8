//! Parameter sweeps over quench protocols and initial states, written as CSV.

pub mod config;
pub mod figures;
pub mod output;
pub mod run;

pub use config::{
    Axis, NamedPath, Overrides, Param, Point, Scale, SweepFile, SweepKind, SweepOptions, SweepSpec,
};
pub use figures::{figure_config, figure_config_text, FIGURE_TAGS};
pub use run::{run_file, run_sweep, with_workers, SweepSummary};
