//! Feature extraction, the signal-feature matrix and its normalization.

mod bank;

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;
use crate::timeseries::{SignalClass, TimeSeriesWindow};

pub use self::bank::{BANK_VERSION, FEATURE_NAMES, MIN_WINDOW_LEN};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub bank_version: String,
}

/// Evaluate the feature bank on one window (N >= 20).
pub fn extract(window: &TimeSeriesWindow) -> Result<FeatureVector> {
    Ok(FeatureVector {
        values: bank::extract_values(window.samples())?,
        bank_version: BANK_VERSION.to_owned(),
    })
}

/// Rows of features with class labels; one row per window.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalFeatureMatrix {
    rows: Vec<Vec<f64>>,
    labels: Vec<SignalClass>,
    feature_names: Vec<String>,
    normalized: bool,
    meta: MatrixSidecar,
}

/// JSON metadata stored next to the matrix CSV.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MatrixSidecar {
    pub bank_version: String,
    /// Input positions of windows removed for non-finite features.
    pub dropped_rows: Vec<usize>,
    /// Features removed for being non-finite in more than 1% of rows.
    pub dropped_columns: Vec<String>,
    pub normalized: bool,
    /// Columns with zero IQR, set to 0.5 by normalization.
    pub flagged_columns: Vec<String>,
}

impl SignalFeatureMatrix {
    /// Wrap already-computed rows; they must be rectangular and match the
    /// names and labels.
    pub fn new(
        rows: Vec<Vec<f64>>,
        labels: Vec<SignalClass>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != feature_names.len()) {
            return Err(Error::invalid(format!(
                "row {i} has {} values, expected {}",
                rows[i].len(),
                feature_names.len()
            )));
        }
        Ok(SignalFeatureMatrix {
            rows,
            labels,
            feature_names,
            normalized: false,
            meta: MatrixSidecar {
                bank_version: BANK_VERSION.to_owned(),
                ..Default::default()
            },
        })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn labels(&self) -> &[SignalClass] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.feature_names.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn sidecar(&self) -> &MatrixSidecar {
        &self.meta
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Keep only the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<SignalFeatureMatrix> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.n_cols()) {
            return Err(Error::invalid(format!(
                "column {bad} out of range for {} features",
                self.n_cols()
            )));
        }
        Ok(SignalFeatureMatrix {
            rows: self
                .rows
                .iter()
                .map(|r| cols.iter().map(|&c| r[c]).collect())
                .collect(),
            labels: self.labels.clone(),
            feature_names: cols
                .iter()
                .map(|&c| self.feature_names[c].clone())
                .collect(),
            normalized: self.normalized,
            meta: self.meta.clone(),
        })
    }

    /// CSV: one column per feature followed by `label`.
    pub fn to_csv(&self) -> String {
        let mut s = self.feature_names.join(",");
        s.push_str(",label\n");
        for (row, label) in self.rows.iter().zip(&self.labels) {
            for v in row {
                s.push_str(&format!("{v},"));
            }
            s.push_str(label.name());
            s.push('\n');
        }
        s
    }

    /// Write `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn write_files(&self, dir: &Path, stem: &str) -> Result<()> {
        let csv_path = dir.join(format!("{stem}.csv"));
        std::fs::write(&csv_path, self.to_csv()).map_err(|e| Error::io(&csv_path, e))?;
        let json_path = dir.join(format!("{stem}.json"));
        let mut f = std::fs::File::create(&json_path).map_err(|e| Error::io(&json_path, e))?;
        serde_json::to_writer_pretty(&mut f, &self.meta)?;
        writeln!(f).map_err(|e| Error::io(&json_path, e))?;
        Ok(())
    }

    /// Read a matrix written by [`SignalFeatureMatrix::write_files`].
    pub fn read_files(dir: &Path, stem: &str) -> Result<SignalFeatureMatrix> {
        let json_path = dir.join(format!("{stem}.json"));
        let text = std::fs::read_to_string(&json_path).map_err(|e| Error::io(&json_path, e))?;
        let meta: MatrixSidecar = serde_json::from_str(&text)?;

        let csv_path = dir.join(format!("{stem}.csv"));
        let parse_err = |message: String| Error::Parse {
            path: csv_path.clone(),
            message,
        };
        let mut reader = csv::Reader::from_path(&csv_path).map_err(|e| parse_err(e.to_string()))?;
        let headers = reader
            .headers()
            .map_err(|e| parse_err(e.to_string()))?
            .clone();
        if headers.iter().next_back() != Some("label") {
            return Err(parse_err("last column must be `label`".into()));
        }
        let names: Vec<String> = headers
            .iter()
            .take(headers.len() - 1)
            .map(String::from)
            .collect();
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| parse_err(e.to_string()))?;
            let row = record
                .iter()
                .take(names.len())
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|e| parse_err(format!("`{v}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
            labels.push(record[names.len()].parse()?);
        }
        let mut m = SignalFeatureMatrix::new(rows, labels, names)?;
        m.normalized = meta.normalized;
        m.meta = meta;
        Ok(m)
    }
}

/// Extract features for every window and drop invalid outputs: first every
/// feature that is non-finite in more than 1% of rows, then every row that
/// still holds a non-finite value.
pub fn build_matrix(
    windows: &[TimeSeriesWindow],
    labels: &[SignalClass],
) -> Result<SignalFeatureMatrix> {
    if windows.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} windows but {} labels",
            windows.len(),
            labels.len()
        )));
    }
    let raw = windows
        .par_iter()
        .map(|w| bank::extract_values(w.samples()))
        .collect::<Result<Vec<_>>>()?;
    let names: Vec<String> = FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
    filter_rows(raw, labels.to_vec(), names)
}

pub(crate) fn filter_rows(
    raw: Vec<Vec<f64>>,
    labels: Vec<SignalClass>,
    names: Vec<String>,
) -> Result<SignalFeatureMatrix> {
    let s = raw.len();
    let m = names.len();
    let keep_cols: Vec<usize> = (0..m)
        .filter(|&j| {
            let bad = raw.iter().filter(|r| !r[j].is_finite()).count();
            bad as f64 <= 0.01 * s as f64
        })
        .collect();
    let dropped_columns: Vec<String> = (0..m)
        .filter(|j| !keep_cols.contains(j))
        .map(|j| names[j].clone())
        .collect();

    let mut rows = Vec::with_capacity(s);
    let mut kept_labels = Vec::with_capacity(s);
    let mut dropped_rows = Vec::new();
    for (i, (row, label)) in raw.into_iter().zip(labels).enumerate() {
        let row: Vec<f64> = keep_cols.iter().map(|&j| row[j]).collect();
        if row.iter().all(|v| v.is_finite()) {
            rows.push(row);
            kept_labels.push(label);
        } else {
            dropped_rows.push(i);
        }
    }
    if rows.is_empty() || keep_cols.is_empty() {
        return Err(Error::invalid(
            "no valid rows or features left after filtering",
        ));
    }
    let mut matrix = SignalFeatureMatrix::new(
        rows,
        kept_labels,
        keep_cols.iter().map(|&j| names[j].clone()).collect(),
    )?;
    matrix.meta.dropped_rows = dropped_rows;
    matrix.meta.dropped_columns = dropped_columns;
    Ok(matrix)
}

/// Outlier-robust sigmoid `1 / (1 + exp(-(f - median) / (1.35 iqr)))` of a
/// column, before rescaling. `None` when the IQR is zero.
pub fn sigmoid_column(col: &[f64]) -> Option<Vec<f64>> {
    let median = stats::median(col);
    let iqr = stats::iqr(col);
    if iqr <= 0.0 {
        return None;
    }
    let scale = 1.35 * iqr;
    Some(
        col.iter()
            .map(|f| 1.0 / (1.0 + (-(f - median) / scale).exp()))
            .collect(),
    )
}

/// Sigmoid-transform then min-max rescale a column to [0, 1]. Returns the
/// column and whether it had to be flagged (zero IQR: all entries 0.5).
pub fn normalize_column(col: &[f64]) -> (Vec<f64>, bool) {
    match sigmoid_column(col) {
        None => (vec![0.5; col.len()], true),
        Some(s) => {
            let (lo, hi) = stats::min_max(&s);
            if hi > lo {
                (s.iter().map(|v| (v - lo) / (hi - lo)).collect(), false)
            } else {
                (vec![0.5; col.len()], true)
            }
        }
    }
}

/// Normalize every column independently.
pub fn normalize(m: &SignalFeatureMatrix) -> Result<SignalFeatureMatrix> {
    if m.normalized {
        return Err(Error::invalid("matrix is already normalized"));
    }
    let cols: Vec<(Vec<f64>, bool)> = (0..m.n_cols())
        .into_par_iter()
        .map(|j| normalize_column(&m.column(j)))
        .collect();
    let rows = (0..m.n_rows())
        .map(|i| cols.iter().map(|(c, _)| c[i]).collect())
        .collect();
    let mut meta = m.meta.clone();
    meta.normalized = true;
    meta.flagged_columns = cols
        .iter()
        .zip(&m.feature_names)
        .filter(|((_, flagged), _)| *flagged)
        .map(|(_, name)| name.clone())
        .collect();
    Ok(SignalFeatureMatrix {
        rows,
        labels: m.labels.clone(),
        feature_names: m.feature_names.clone(),
        normalized: true,
        meta,
    })
}
