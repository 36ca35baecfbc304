//! Bayesian estimation for the singular Marshall–Olkin bivariate Pareto
//! distribution with unit scale and zero location.
//!
//! The crate covers exact simulation, the likelihood and its derivatives,
//! slice-within-Gibbs sampling under gamma or reference priors, Lindley
//! approximations seeded by an EM maximum-likelihood fit, shortest
//! order-statistic credible intervals, and a replication study harness.

pub mod config;
pub mod em;
pub mod error;
pub mod fit;
pub mod fractional;
pub mod gibbs;
pub mod ingest;
pub mod lindley;
pub mod model;
pub mod optimize;
pub mod posterior;
pub mod priors;
pub mod rng;
pub mod slice;
pub mod study;
pub mod summary;

pub use error::{Error, Result};
pub use model::{BivariateSample, LocationScale, LogSums, Partition, ShapeParams};
pub use priors::{GammaHyper, PriorSpec};
