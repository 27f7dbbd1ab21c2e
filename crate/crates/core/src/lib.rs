//! Pairwise-comparisons matrices with coefficients in an arbitrary group.

pub mod cli;
pub mod distance;
pub mod error;
pub mod gauge;
pub mod graph;
pub mod group;
pub mod inconsistency;
pub mod io;
pub mod matrix;
pub mod random;
pub mod stochastic;
pub mod weights;

pub use error::{Error, Result};
pub use gauge::{GaugeVector, PhiDecomposition};
pub use group::{GroupElement, GroupKind, GroupSpec, Morphism, Rigid};
pub use matrix::{PCMatrix, WeightVector};
