//! Coherent Smith-Purcell emission of gamma rays from nuclear resonances
//! excited by the evanescent field of fast charged particles.
//!
//! Units throughout: energies in eV, lengths in nm, times in s, angular
//! frequencies in rad/s.

// Domain checks are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod brems;
pub mod cli;
pub mod crystal_sp;
pub mod error;
pub mod finite_array;
pub mod kvfile;
pub mod nuclide;
pub mod numerics;
pub mod probe;
pub mod single_nucleus;

pub use error::{Error, Result};
pub use nuclide::{NuclideRecord, NuclideRegistry};
pub use probe::Probe;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
