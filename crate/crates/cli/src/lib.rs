//! Library side of the `hyperspec` command: complex literals, evaluation
//! with lazily built representations, table reproduction, grids, the
//! convergence and conditioning studies, and CSV/JSON output.

pub mod app;
pub mod bench;
pub mod error;
pub mod evaluate;
pub mod grid;
pub mod literal;
pub mod output;
pub mod table;

pub use error::{exit, CliError};
pub use evaluate::{Evaluator, Record, RunConfig};
