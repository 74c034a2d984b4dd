//! zerrnet: a finite-blocklength network-coding toolkit.
//!
//! The library represents network-coding instances and codes explicitly (as
//! lookup tables), measures decoding-error probability exactly by
//! enumeration, and performs verified code surgeries: turning a small-error
//! code into a zero-error code by random binning, the index-coding variant
//! of that transform, fixing an edge's value so the edge can be removed, and
//! the supernode reduction pipeline that connects the two problems. A
//! blocklength-extension layer wraps any code with greedily built
//! minimum-distance outer codes.
//!
//! Every transform re-measures the error of what it produced; no claimed
//! error probability is ever inferred.
//!
//! See the `examples/` directory for one runnable walkthrough per
//! capability, and the `zerrnet` binary for file-based workflows.

pub mod binning;
pub mod cli;
pub mod code;
pub mod error;
pub mod instance;
pub mod outer;
pub mod rat;
pub mod rng;
pub mod samples;
pub mod transform;
pub mod tuple;

pub use error::{Error, Result};
pub use rat::Rational;

/// Default cap on exhaustive enumerations (source tuples, realizations).
/// Override per call or through the `ZERRNET_BUDGET` environment variable in
/// the CLI.
pub const DEFAULT_BUDGET: u64 = 1 << 24;
