//! Monte Carlo orchestration, CSV formats, timing and the `patp` command line
//! on top of `patp-core`.

pub mod bench;
pub mod cli;
pub mod error;
pub mod io;
pub mod mc;

pub use error::{HarnessError, Result};
