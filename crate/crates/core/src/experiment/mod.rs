//! Experiment configuration and the commands of the `fhlat` binary.
//!
//! Every command is a plain function over an [`ExperimentConfig`]; the
//! binary only parses arguments, calls them and maps errors to exit codes.

mod commands;
mod config;

pub use commands::{
    bound_curves, cmd_bounds, cmd_recommend, cmd_simulate, cmd_sweep, compare_curves,
    load_scenarios, load_splits, read_curve, render_recommendation, simulate_experiment,
    sweep_point_config, write_atomic, write_curve, write_json, ClassBounds, ClassSummary,
    CompareReport, LatencyAtTarget, Mm1Check, OutputFormat, QueueSummary, RecommendReport,
    SimulationOutput, SimulationSummary, SweepParameter, SweepReport, SweepRequest, SweepRow,
    Violation, ViolationSide, DEFAULT_MIN_TAIL,
};
pub use config::{ClassSpec, ExperimentConfig, Overrides, Spacing, TauGrid, TopologySpec};

use crate::error::Error;

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_UNSTABLE: i32 = 3;
pub const EXIT_BRACKET: i32 = 4;

/// Process exit code for a failed command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Unstable { .. } => EXIT_UNSTABLE,
        Error::InvalidParameters(_)
        | Error::InvalidPolicy(_)
        | Error::Config(_)
        | Error::InvalidCurve(_)
        | Error::Json(_)
        | Error::Csv(_) => EXIT_CONFIG,
        Error::EmptySamples | Error::UnreachableReliability { .. } | Error::Io(_) => EXIT_OTHER,
    }
}
