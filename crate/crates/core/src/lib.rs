//! Multi-view fuzzy clustering with minimax-weighted alternating optimization.
//!
//! The core solver produces a single consensus fuzzy partition over several
//! feature views of the same objects. Each view carries a simplex-constrained
//! weight that is learned during the optimization: weights maximize the
//! weighted sum of per-view costs while memberships and centroids minimize
//! it, so no view's cost is allowed to stay disproportionately large.
//!
//! The crate also ships the classical single-view and concatenated-view
//! fuzzy c-means baselines, external evaluation metrics (accuracy under an
//! optimal matching, NMI, F-measure), deterministic farthest-first centroid
//! seeding, a manifest-based dataset loader, and a seeded synthetic
//! generator.
//!
//! With the default `parallel` feature the inner loops run data-parallel on
//! rayon; disabling it produces a fully sequential build. Reductions always
//! run in a fixed index order, so both builds produce bitwise-identical
//! results.

pub mod baselines;
pub mod dataset;
pub mod distance;
mod error;
pub mod init;
pub mod metrics;
mod par;
pub mod solver;
pub mod synth;

pub use dataset::{
    concatenate_views, load_manifest, write_dataset, MultiViewDataset, Normalization, ViewMatrix,
};
pub use distance::DistanceMeasure;
pub use error::{Error, Result};
pub use init::{initial_state, InitialState};
pub use metrics::EvaluationReport;
pub use solver::{
    ClusteringResult, CentroidSet, FuzzyPartition, SolverConfig, ViewWeights,
};
pub use synth::{SynthSpec, ViewKind};
