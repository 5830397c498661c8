//! Analogy-based effort estimation over a six-dimension design space:
//! subset selection, feature weighting, discretization, similarity,
//! adaptation, and analogy selection.

pub mod config;
pub mod discretize;
pub mod model;
pub mod similarity;
pub mod weights;

pub use config::{
    AbeConfig, Adaptation, AnalogySelection, Discretization, Similarity, SubsetSelection,
    WeightScheme,
};
pub use discretize::discretize;
pub use model::AbeModel;
pub use similarity::{pair_distance, RankContext, SimAux};
pub use weights::feature_weights;
