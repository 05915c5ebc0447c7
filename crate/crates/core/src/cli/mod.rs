//! Library side of the command-line front end.

pub mod input;
pub mod report;
pub mod suite;

pub use input::{parse_input, Format, Generator, InputDocument, InputKind, Resolved};
pub use report::{run_gap, CrossChecks, Diagnostics, Report, RunOptions};
pub use suite::{
    run_bench, run_oracle_suite, BenchOptions, BenchReport, Family, OracleOptions,
    OracleSuiteReport,
};
