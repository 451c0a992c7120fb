//! Genetic-algorithm search over discrete regression model spaces.
//!
//! Two problem families share one steady-state engine:
//!
//! - spline knot placement, where a chromosome is a sorted set of grid
//!   indices `(m; tau_1, ..., tau_m)` subject to a minimum spacing, scored
//!   by an information criterion of a least-squares spline fit;
//! - best-subset selection, where a chromosome is an inclusion mask over
//!   `p` predictors, scored by the negative BIC of a Gaussian or GLM fit.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! threaded island execution live in the `gareg-cli` crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod chromosome;
pub mod datagen;
pub mod error;
pub mod ga;
pub mod island;
pub mod objective;
pub mod oracle;
pub mod regress;
pub mod rng;
pub mod spline;

pub use chromosome::{build_grid, is_feasible, BinaryChromosome, FeasibilityParams, Grid, KnotChromosome};
pub use error::{Error, Result};
pub use ga::{Direction, GaConfig, Individual, KnotMode, Objective, RunTrace};
pub use island::IslandConfig;
pub use regress::{DesignMatrix, FitResult, GlmFamily, IcKind};
pub use spline::{Basis, KnotSet, SplineSpec};
