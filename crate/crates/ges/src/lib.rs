//! File formats, reports and the `ges` command-line tool on top of
//! [`ges_core`].
//!
//! * [`formats`]: `.ges.json` arrays, Matrix Market `.mtx` with a
//!   `.meta.json` sidecar, and native `.phi.json` matrices.
//! * [`report`]: analysis reports and their text tables.
//! * [`parallel`]: thread pool sized by `GES_THREADS`, parallel overlap and
//!   recovery trials.
//! * [`selftest`]: golden examples plus a property grid.
//! * [`cli`]: argument parsing and subcommand dispatch.

pub mod cli;
pub mod config;
pub mod doc;
pub mod error;
pub mod formats;
pub mod parallel;
pub mod report;
pub mod selftest;

pub use config::RunConfig;
pub use error::CliError;
