//! Orthonormal DCT-II / DCT-III and prefix-truncation compression.
//!
//! Synthesis always accumulates coefficients lowest frequency first into a
//! zeroed buffer, so the reconstruction checked inside [`dct_compress`] is
//! bit-identical to what [`dct_reconstruct`] later produces.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::{max_abs_error, pct_of_range, ErrorBudget};
use crate::error::{Error, Result};
use crate::timeseries::TimeSeriesWindow;

/// Row-major table of the N orthonormal cosine basis vectors.
struct Basis {
    n: usize,
    table: Vec<f64>,
}

impl Basis {
    fn new(n: usize) -> Self {
        let mut table = Vec::with_capacity(n * n);
        let nf = n as f64;
        for k in 0..n {
            let scale = if k == 0 {
                (1.0 / nf).sqrt()
            } else {
                (2.0 / nf).sqrt()
            };
            for i in 0..n {
                table.push(scale * (PI * (2 * i + 1) as f64 * k as f64 / (2.0 * nf)).cos());
            }
        }
        Basis { n, table }
    }

    fn row(&self, k: usize) -> &[f64] {
        &self.table[k * self.n..(k + 1) * self.n]
    }

    fn accumulate(&self, k: usize, coeff: f64, out: &mut [f64]) {
        for (o, b) in out.iter_mut().zip(self.row(k)) {
            *o += coeff * b;
        }
    }
}

fn basis(n: usize) -> Arc<Basis> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Basis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(b) = cache.lock().expect("basis cache poisoned").get(&n) {
        return Arc::clone(b);
    }
    let b = Arc::new(Basis::new(n));
    cache
        .lock()
        .expect("basis cache poisoned")
        .entry(n)
        .or_insert(b)
        .clone()
}

/// Orthonormal DCT-II. Empty input gives empty output.
pub fn dct_forward(x: &[f64]) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    let b = basis(x.len());
    (0..x.len())
        .map(|k| b.row(k).iter().zip(x).map(|(c, v)| c * v).sum())
        .collect()
}

/// Orthonormal DCT-III, the inverse of [`dct_forward`].
pub fn dct_inverse(coeffs: &[f64]) -> Vec<f64> {
    synthesize(coeffs, coeffs.len())
}

fn synthesize(prefix: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    if n == 0 {
        return out;
    }
    let b = basis(n);
    for (k, &c) in prefix.iter().enumerate() {
        b.accumulate(k, c, &mut out);
    }
    out
}

/// The first `K` DCT coefficients of a window of `n_original` samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DctModel {
    coeffs: Vec<f64>,
    n_original: usize,
}

impl DctModel {
    pub fn new(coeffs: Vec<f64>, n_original: usize) -> Result<Self> {
        let m = DctModel { coeffs, n_original };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if self.coeffs.is_empty() || self.coeffs.len() > self.n_original {
            return Err(Error::invalid(format!(
                "DCT model must keep between 1 and {} coefficients, has {}",
                self.n_original,
                self.coeffs.len()
            )));
        }
        if self.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("DCT coefficients must be finite"));
        }
        Ok(())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn n_original(&self) -> usize {
        self.n_original
    }
}

/// Smallest coefficient prefix whose reconstruction meets `eps` at every
/// sample. Keeping all coefficients is accepted unconditionally.
pub fn dct_compress(window: &TimeSeriesWindow, eps: ErrorBudget) -> DctModel {
    let x = window.samples();
    let n = x.len();
    let coeffs = dct_forward(x);
    let (lo, hi) = crate::stats::min_max(x);
    let range = hi - lo;
    if range == 0.0 {
        return DctModel {
            coeffs: vec![coeffs[0]],
            n_original: n,
        };
    }
    let tol = eps.absolute(range);
    let b = basis(n);
    let mut recon = vec![0.0; n];
    let mut keep = n;
    for (k, &c) in coeffs.iter().enumerate() {
        b.accumulate(k, c, &mut recon);
        let err = max_abs_error(x, &recon);
        if err <= tol && pct_of_range(err, range) <= eps.pct() {
            keep = k + 1;
            break;
        }
    }
    DctModel {
        coeffs: coeffs[..keep].to_vec(),
        n_original: n,
    }
}

/// Keep exactly the first `k` coefficients.
pub fn dct_compress_rate(window: &TimeSeriesWindow, k: usize) -> Result<DctModel> {
    let n = window.len();
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "coefficient count must be in [1, {n}], got {k}"
        )));
    }
    let mut coeffs = dct_forward(window.samples());
    coeffs.truncate(k);
    Ok(DctModel {
        coeffs,
        n_original: n,
    })
}

/// Inverse transform of the zero-padded coefficient prefix.
pub fn dct_reconstruct(m: &DctModel) -> Result<Vec<f64>> {
    m.validate()?;
    Ok(synthesize(&m.coeffs, m.n_original))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compression::distortion;

    fn window(xs: Vec<f64>) -> TimeSeriesWindow {
        TimeSeriesWindow::new(xs, "t").unwrap()
    }

    #[test]
    fn constant_signal_is_pure_dc() {
        let c = 3.5;
        let x = dct_forward(&[c; 4]);
        assert!((x[0] - 2.0 * c).abs() < 1e-12);
        for v in &x[1..] {
            assert!(v.abs() < 1e-12);
        }
        for (c, n) in [(3.5, 40), (0.1, 500), (-7.3, 333), (1e6 + 0.3, 500)] {
            let w = window(vec![c; n]);
            let m = dct_compress(&w, ErrorBudget::new(0.0).unwrap());
            assert_eq!(m.coeffs().len(), 1);
            let d = distortion(w.samples(), &dct_reconstruct(&m).unwrap()).unwrap();
            assert_eq!(d, 0.0);
            let m = dct_compress_rate(&w, 1).unwrap();
            let d = distortion(w.samples(), &dct_reconstruct(&m).unwrap()).unwrap();
            assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn single_sample_transform() {
        assert_eq!(dct_forward(&[2.0]), vec![2.0]);
        assert_eq!(dct_inverse(&[2.0]), vec![2.0]);
    }

    #[test]
    fn basis_vector_needs_prefix_through_its_index() {
        let n = 64;
        for k in [1usize, 5, 17] {
            let mut e = vec![0.0; n];
            e[k] = 10.0;
            let x = dct_inverse(&e);
            let m = dct_compress(&window(x), ErrorBudget::new(1.0).unwrap());
            assert_eq!(m.coeffs().len(), k + 1);
        }
    }

    #[test]
    fn rate_variant_bounds() {
        let w = window((0..10).map(|i| (i * i) as f64).collect());
        assert!(dct_compress_rate(&w, 0).is_err());
        assert!(dct_compress_rate(&w, 11).is_err());
        let m = dct_compress_rate(&w, 10).unwrap();
        let back = dct_reconstruct(&m).unwrap();
        for (a, b) in back.iter().zip(w.samples()) {
            assert!((a - b).abs() < 1e-9);
        }
        assert_eq!(dct_compress_rate(&w, 3).unwrap().coeffs().len(), 3);
    }

    #[test]
    fn model_validation() {
        assert!(DctModel::new(vec![], 4).is_err());
        assert!(DctModel::new(vec![1.0; 5], 4).is_err());
        assert!(DctModel::new(vec![f64::NAN], 4).is_err());
        assert!(DctModel::new(vec![1.0], 4).is_ok());
    }
}
