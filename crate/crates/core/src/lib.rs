//! Quasi-Monte Carlo sampling of permutations for Shapley value estimation.
//!
//! Samplers produce weighted permutation sets, kernels and [`discrepancy`]
//! measure how well a set covers `S_d`, and [`estimators`] turn a set into
//! Shapley values for any [`games::Game`].

pub mod discrepancy;
pub mod error;
pub mod estimators;
pub mod games;
pub mod harness;
pub mod kernels;
pub mod perm;
pub mod samplers;
pub mod sphere;
pub mod stats;

pub use discrepancy::{discrepancy, discrepancy_squared, SampleMeta, WeightedSampleSet};
pub use error::{Error, Result};
pub use estimators::{estimate, shapley_from_permutations, EstimateOptions, Method, ShapleyEstimate};
pub use games::{Coalition, Game, GameSpec};
pub use kernels::{expected_kernel_uniform, kernel_matrix, KernelKind, KernelMatrix, KernelSpec};
pub use perm::{Dimension, Permutation};
pub use samplers::{sample, Algorithm, SamplerConfig};
