//! Command-line frontend: problem files in, deterministic reports out.

pub mod presets;
pub mod problem;
pub mod report;
pub mod run;
pub mod sections;

pub use run::run_cli;
