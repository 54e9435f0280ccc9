//! Samplers, transforms and analytic oracles for the Brownian height
//! fragmentation, its tagged fragment, conditioned stable subordinators and
//! Poisson–Dirichlet mass partitions.
//!
//! Every sampler is a pure function of its parameters and a [`Seed`].

// Parameter checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod fragmentation;
pub mod opensets;
pub mod paths;
pub mod quad;
pub mod stable_pd;
pub mod stats;

pub use error::{Error, Result};
pub use opensets::{Domain, OpenSet, RankedMasses};
pub use paths::{GridPath, Seed};
pub use stable_pd::{PdParams, StableParams};
