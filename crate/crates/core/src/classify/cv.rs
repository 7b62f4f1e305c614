//! Stratified k-fold assignment and cross-validated accuracy.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Predict, Trainer};
use crate::error::{Error, Result};
use crate::timeseries::SignalClass;

/// Fold index (0-based) of every sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    k: usize,
    fold_of_sample: Vec<usize>,
}

impl FoldAssignment {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn fold_of_sample(&self) -> &[usize] {
        &self.fold_of_sample
    }

    /// Sample indices held out in `fold`, ascending.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.indices(|f| f == fold)
    }

    /// Sample indices used for training when `fold` is held out, ascending.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.indices(|f| f != fold)
    }

    fn indices(&self, keep: impl Fn(usize) -> bool) -> Vec<usize> {
        self.fold_of_sample
            .iter()
            .enumerate()
            .filter(|(_, &f)| keep(f))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Shuffle each class's samples with `seed` and deal them round-robin to
/// `k` folds. Dealing continues where the previous class stopped, so fold
/// sizes stay within one of each other.
pub fn stratified_folds(labels: &[SignalClass], k: usize, seed: u64) -> Result<FoldAssignment> {
    if k == 0 {
        return Err(Error::invalid("fold count must be at least 1"));
    }
    if labels.is_empty() {
        return Err(Error::invalid("cannot fold an empty sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of_sample = vec![0; labels.len()];
    let mut next = 0;
    for class in SignalClass::ALL {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.is_empty() {
            continue;
        }
        if members.len() < k {
            return Err(Error::invalid(format!(
                "class {class} has {} samples, fewer than {k} folds",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        for i in members {
            fold_of_sample[i] = next;
            next = (next + 1) % k;
        }
    }
    Ok(FoldAssignment { k, fold_of_sample })
}

/// Mean held-out accuracy over stratified folds drawn from `seed`.
pub fn cross_validate<T: Trainer>(
    trainer: &T,
    x: &[Vec<f64>],
    labels: &[SignalClass],
    k: usize,
    seed: u64,
) -> Result<f64> {
    let folds = stratified_folds(labels, k, seed)?;
    cross_validate_folds(trainer, x, labels, &folds)
}

/// Mean held-out accuracy over a given fold assignment. Folds train in
/// parallel; accuracies are summed in fold order.
pub fn cross_validate_folds<T: Trainer>(
    trainer: &T,
    x: &[Vec<f64>],
    labels: &[SignalClass],
    folds: &FoldAssignment,
) -> Result<f64> {
    if x.len() != labels.len() || labels.len() != folds.fold_of_sample.len() {
        return Err(Error::invalid(format!(
            "{} rows, {} labels and {} fold assignments",
            x.len(),
            labels.len(),
            folds.fold_of_sample.len()
        )));
    }
    let accuracies: Vec<Result<f64>> = (0..folds.k)
        .into_par_iter()
        .map(|fold| {
            let pick = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<SignalClass>) {
                idx.iter().map(|&i| (x[i].clone(), labels[i])).unzip()
            };
            let (train_x, train_y) = pick(&folds.train_indices(fold));
            let (test_x, test_y) = pick(&folds.test_indices(fold));
            let model = trainer.train(&train_x, &train_y)?;
            Ok(model.accuracy(&test_x, &test_y))
        })
        .collect();
    let mut total = 0.0;
    for acc in accuracies {
        total += acc?;
    }
    Ok(total / folds.k as f64)
}
