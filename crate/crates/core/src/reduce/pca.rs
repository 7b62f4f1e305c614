use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SignalFeatureMatrix;

/// Leading principal axes of a set of rows.
///
/// Each component is signed so that its largest-magnitude entry is
/// positive (the first one on exact ties).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean_vector: Vec<f64>,
    pub components: Vec<Vec<f64>>,
    /// Eigenvalues of the sample covariance (`n - 1` denominator), in
    /// descending order.
    pub explained_variance: Vec<f64>,
}

impl PcaModel {
    /// Fit `l` components to the rows of `x`.
    pub fn fit(x: &[Vec<f64>], l: usize) -> Result<PcaModel> {
        let s = x.len();
        let m = x.first().map_or(0, Vec::len);
        if s < 2 || m == 0 {
            return Err(Error::invalid("PCA needs at least two rows and one column"));
        }
        if x.iter()
            .any(|r| r.len() != m || r.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::invalid("PCA input must be rectangular and finite"));
        }
        if l == 0 || l > s.min(m) {
            return Err(Error::invalid(format!(
                "component count {l} outside 1..={}",
                s.min(m)
            )));
        }
        if x.iter().all(|r| r == &x[0]) {
            return Err(Error::Computation(
                "PCA on identical rows is degenerate".into(),
            ));
        }
        let mean: Vec<f64> = (0..m)
            .map(|j| x.iter().map(|r| r[j]).sum::<f64>() / s as f64)
            .collect();
        let centered = DMatrix::from_fn(s, m, |i, j| x[i][j] - mean[j]);
        let cov = (centered.transpose() * &centered) / (s - 1) as f64;
        let eig = SymmetricEigen::new(cov);

        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let mut components = Vec::with_capacity(l);
        let mut explained_variance = Vec::with_capacity(l);
        for &idx in order.iter().take(l) {
            let mut v: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
            let lead = v.iter().enumerate().fold(
                0,
                |best, (i, x)| if x.abs() > v[best].abs() { i } else { best },
            );
            if v[lead] < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            components.push(v);
            explained_variance.push(eig.eigenvalues[idx].max(0.0));
        }
        Ok(PcaModel {
            mean_vector: mean,
            components,
            explained_variance,
        })
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    /// Scores of each row on the components.
    pub fn transform(&self, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        x.iter().map(|r| self.project(r)).collect()
    }

    pub fn project(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.mean_vector.len() {
            return Err(Error::invalid(format!(
                "row has {} columns, PCA was fit on {}",
                row.len(),
                self.mean_vector.len()
            )));
        }
        Ok(self
            .components
            .iter()
            .map(|c| {
                c.iter()
                    .zip(row.iter().zip(&self.mean_vector))
                    .map(|(ci, (x, mu))| ci * (x - mu))
                    .sum()
            })
            .collect())
    }

    /// Map scores back to centered feature space.
    pub fn back_project(&self, scores: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.mean_vector.len()];
        for (c, s) in self.components.iter().zip(scores) {
            for (o, ci) in out.iter_mut().zip(c) {
                *o += s * ci;
            }
        }
        out
    }
}

/// Fit on a normalized feature matrix.
pub fn pca_fit(m: &SignalFeatureMatrix, l: usize) -> Result<PcaModel> {
    if !m.is_normalized() {
        return Err(Error::invalid("PCA expects a normalized feature matrix"));
    }
    PcaModel::fit(m.rows(), l)
}

pub fn pca_transform(p: &PcaModel, m: &SignalFeatureMatrix) -> Result<Vec<Vec<f64>>> {
    p.transform(m.rows())
}
