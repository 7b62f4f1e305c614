//! Dimensionality reduction of the feature matrix: principal components
//! and greedy forward feature selection.

mod pca;
mod select;

pub use pca::{pca_fit, pca_transform, PcaModel};
pub use select::{greedy_select, SelectionResult};
