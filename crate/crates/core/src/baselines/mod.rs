//! Untuned baseline estimators: a transformed linear model, a
//! least-absolute-residual linear program, and the random-guess baselines
//! behind standardized accuracy.

pub mod atlm;
pub mod guess;
pub mod lp4ee;
pub mod simplex;

pub use atlm::{AtlmModel, Transform};
pub use guess::{exact_guess_mae, mean_predictor, random_guess_mae};
pub use lp4ee::Lp4eeModel;
