//! Multiclass classifiers over feature rows and their cross-validation.
//!
//! Two families are provided: a one-vs-one ensemble of linear SVMs and a
//! single-hidden-layer network with sigmoid units and a softmax output.
//! [`TrainerSpec`] names either one with its hyperparameters, and
//! [`cross_validate`] scores it by stratified k-fold accuracy.

mod cv;
mod ffnn;
mod model;
mod svm;

pub use cv::{cross_validate, cross_validate_folds, stratified_folds, FoldAssignment};
pub use ffnn::{Ffnn, FfnnParams};
pub use model::{ClassifierModel, SavedModel, TrainerSpec};
pub use svm::{LinearSvm, OvoSvm, SvmTrainReport, DEFAULT_C};

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::timeseries::SignalClass;

/// Anything that maps a feature row to a class.
pub trait Predict {
    fn predict(&self, x: &[f64]) -> SignalClass;

    /// Fraction of rows predicted correctly.
    fn accuracy(&self, x: &[Vec<f64>], labels: &[SignalClass]) -> f64 {
        if x.is_empty() {
            return 0.0;
        }
        let hits = x
            .iter()
            .zip(labels)
            .filter(|(xi, &l)| self.predict(xi) == l)
            .count();
        hits as f64 / x.len() as f64
    }
}

/// Builds a model from labeled rows.
pub trait Trainer: Sync {
    type Model: Predict;

    fn train(&self, x: &[Vec<f64>], labels: &[SignalClass]) -> Result<Self::Model>;
}

pub(crate) fn check_design(x: &[Vec<f64>], labels: &[SignalClass]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::invalid("empty training set"));
    }
    if x.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} rows but {} labels",
            x.len(),
            labels.len()
        )));
    }
    let m = x[0].len();
    if m == 0 {
        return Err(Error::invalid("rows have no features"));
    }
    for (i, row) in x.iter().enumerate() {
        if row.len() != m {
            return Err(Error::invalid(format!(
                "row {i} has {} features, expected {m}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("row {i} has a non-finite feature")));
        }
    }
    Ok(())
}

/// Classes present in `labels`, in class order.
pub(crate) fn distinct_classes(labels: &[SignalClass]) -> Vec<SignalClass> {
    labels
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}
