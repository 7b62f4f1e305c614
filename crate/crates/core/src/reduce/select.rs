use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{cross_validate_folds, stratified_folds, TrainerSpec};
use crate::error::{Error, Result};
use crate::features::SignalFeatureMatrix;
use crate::files::{read_json, write_json};

/// Features in the order they were picked, with the cross-validated
/// accuracy reached after each pick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub selected_names: Vec<String>,
    pub selected_indices: Vec<usize>,
    pub accuracy_trajectory: Vec<f64>,
}

impl SelectionResult {
    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn load(path: &Path) -> Result<SelectionResult> {
        read_json(path)
    }
}

/// Greedy forward selection of `k` columns.
///
/// Each step adds the column whose union with the current set gives the
/// highest stratified `folds`-fold accuracy of the default one-vs-one SVM;
/// ties go to the lower column index. One fold assignment, drawn from
/// `seed`, is shared by every evaluation.
pub fn greedy_select(
    m: &SignalFeatureMatrix,
    k: usize,
    folds: usize,
    seed: u64,
) -> Result<SelectionResult> {
    if !m.is_normalized() {
        return Err(Error::invalid(
            "feature selection expects a normalized matrix",
        ));
    }
    if k == 0 || k > m.n_cols() {
        return Err(Error::invalid(format!(
            "cannot select {k} of {} features",
            m.n_cols()
        )));
    }
    let assignment = stratified_folds(m.labels(), folds, seed)?;
    let trainer = TrainerSpec::svm();
    let mut selected: Vec<usize> = Vec::with_capacity(k);
    let mut trajectory = Vec::with_capacity(k);
    for _ in 0..k {
        let candidates: Vec<usize> = (0..m.n_cols()).filter(|j| !selected.contains(j)).collect();
        let scores: Vec<Result<f64>> = candidates
            .par_iter()
            .map(|&j| {
                let cols: Vec<usize> = selected.iter().copied().chain([j]).collect();
                let x: Vec<Vec<f64>> = m
                    .rows()
                    .iter()
                    .map(|r| cols.iter().map(|&c| r[c]).collect())
                    .collect();
                cross_validate_folds(&trainer, &x, m.labels(), &assignment)
            })
            .collect();
        let mut best: Option<(usize, f64)> = None;
        for (&j, score) in candidates.iter().zip(scores) {
            let acc = score?;
            if best.is_none_or(|(_, b)| acc > b) {
                best = Some((j, acc));
            }
        }
        let (j, acc) = best.ok_or_else(|| Error::Computation("no candidate features".into()))?;
        selected.push(j);
        trajectory.push(acc);
    }
    Ok(SelectionResult {
        selected_names: selected
            .iter()
            .map(|&j| m.feature_names()[j].clone())
            .collect(),
        selected_indices: selected,
        accuracy_trajectory: trajectory,
    })
}
