//! Command-line tools and experiment harness around [`edgex_core`].
//!
//! * [`io`] reads and writes permutation lists and TSP instances.
//! * [`bench`] runs crossover batches and fits their statistics.
//! * [`cli`] is the `edgex` binary's argument parser and dispatcher.

pub mod bench;
pub mod cli;
mod error;
pub mod io;

pub use error::{Error, Result};
