//! Library surface of the `chiralprop` command-line front end: configuration
//! parsing, scenario dispatch, CSV/manifest output, and the self-test suite.

// `!(x > 0)`-style comparisons deliberately reject NaN; fixed-size matrix
// loops keep index symmetry with the math.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]
pub mod config;
pub mod outputs;
pub mod runner;
pub mod selftest;

pub use config::{parse_config, Mode, ScenarioConfig};
pub use runner::{run_scenario, RunFailure};
