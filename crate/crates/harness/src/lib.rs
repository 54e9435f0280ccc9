//! Verification registry, simulation targets, reports and plot scripts for
//! `fragstoch-core`.
//!
//! Cases and simulation targets are trait objects looked up by name, so the
//! command line, the acceptance tests and user code share one catalogue.

// Parameter checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cases;
pub mod config;
pub mod error;
pub mod plots;
pub mod registry;
pub mod report;
pub mod sim;

pub use config::Config;
pub use error::{Error, Result};
pub use registry::{run_registry, run_registry_with, Registry, VerificationCase};
pub use report::{Report, StatReport, Verdict};
