//! Effort-estimation learners, hyperparameter optimizers, and a ranked
//! benchmark harness.
//!
//! The crate provides:
//! - [`dataset`]: CSV loading, cleaning manifests, min-max normalization,
//!   and seeded M*N cross-validation folds.
//! - [`cart`]: a regression-tree learner plus a bagged random forest.
//! - [`baselines`]: untuned estimators (transformed linear regression,
//!   least-absolute-residual linear programming, random-guess baselines).
//! - [`abe`]: analogy-based estimation over a six-dimension design space.
//! - [`configspace`]: declarative parameter spaces with cross-tree rules.
//! - [`optimizers`]: random search, differential evolution, and a
//!   surrogate-guided sequential optimizer, all budget-audited.
//! - [`metrics`]: MRE / MAE / standardized accuracy.
//! - [`stats`]: Scott-Knott ranking gated by bootstrap + A12 tests.
//! - [`harness`]: the experiment orchestrator and report renderers.

pub mod abe;
pub mod baselines;
pub mod cart;
pub mod configspace;
pub mod dataset;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod optimizers;
pub mod seeding;
pub mod stats;

pub use error::{Error, Result};
