//! Command line front end, file formats and parallel sweeps for `mzsim-core`.

pub mod cli;
pub mod output;
pub mod parallel;

pub use cli::{config_to_args, parse_args, CliError, Format, Invocation};
pub use output::{emit_json, emit_sweep_csv, emit_visibility_table};
pub use parallel::{par_sweep, threads_from_env};
