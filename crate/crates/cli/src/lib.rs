//! Batch front end for `decohere-core`.
//!
//! Commands read a flat TOML [`config::RunConfig`], write a CSV and a JSON
//! [`output::Sidecar`] into an output directory, and map failures to exit
//! codes (see [`error::CliError::exit_code`]).
//!
//! CSV schemas:
//!
//! | command | columns |
//! |---|---|
//! | `pattern` | `x_m, intensity_per_m` (natural input: `x_eps, intensity_per_eps`) |
//! | `visibility` | `fringe_index, fringe_center_m, visibility_formula, visibility_numeric, discrepancy, status, message` |
//! | `oracle-compare` | `x_eps, oracle, exact_published, exact_calibrated` |
//! | `sweep` (visibility) | swept columns, `t_ratio`, `visibility_formula, visibility_numeric, status, message` |
//! | `sweep` (profiles) | swept columns, `t_ratio`, `file, status, message`; one profile CSV per point |
//!
//! The derived `t_ratio` column is omitted when `t_ratio` is itself swept.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{
    evaluate, evaluate_sweep, run_oracle_compare, run_pattern, run_sweep, run_visibility,
    OracleComparison, SweepPoint, VisibilityRow, Written,
};
pub use config::{Input, Model, Overrides, RunConfig, SweepOutput, SweepParam, SweepSpec};
pub use error::{CliError, Result};
pub use output::{Sidecar, Table};
