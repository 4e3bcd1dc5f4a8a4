//! Command-line surface: run configuration, command execution and file export.

pub mod cli;
pub mod config;
pub mod export;
pub mod run;

pub use cli::Cli;
pub use config::{Command, InitialState, IntRange, Observable, OutputFormat, RunConfig};
pub use export::{format_float, Cell, Table, VERSION};
pub use run::{
    design_report, evolve_series, lattice_for, observable_value, plan_report, run, sweep_table, DesignReport,
    PlanReport, RunOutput,
};
