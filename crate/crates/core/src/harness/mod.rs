//! Run configuration, reports and the commands behind the CLI.

mod commands;
mod config;
mod report;

pub use commands::{
    cmd_indices, cmd_solve, cmd_sweep, cmd_verify, directional_fd_error, indices_run, smooth_positive_field,
    solve_at, solve_run, sweep_run, verify_run, CommandOutcome, ExitStatus, RunOptions, SolveRun, SweepRun,
};
pub use config::{MeshSpec, RunConfig, SolverSpec, SweepSpec};
pub use report::{Check, IndicesReport, MeshSummary, Property, RunReport, SweepReport, VerifyReport};
