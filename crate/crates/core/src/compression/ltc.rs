//! Lightweight Temporal Compression: greedy piecewise-linear approximation.
//!
//! From an anchor `(i0, v0)` the compressor keeps the interval of slopes
//! whose line through the anchor stays within the budget of every sample
//! seen so far. When the next sample would empty the interval the segment
//! ends at the previous sample, with the junction value taken on the line of
//! mid-interval slope. That junction becomes the next anchor, so the
//! reconstruction is continuous.

use serde::{Deserialize, Serialize};

use super::ErrorBudget;
use crate::error::{Error, Result};
use crate::timeseries::TimeSeriesWindow;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Endpoint {
    /// Zero-based sample index.
    pub index: usize,
    pub value: f64,
}

/// Segment endpoints; the first is at index 0 and the last at `n - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtcModel {
    endpoints: Vec<Endpoint>,
    n_original: usize,
}

impl LtcModel {
    /// Build a model, checking index order and coverage.
    pub fn new(endpoints: Vec<Endpoint>, n_original: usize) -> Result<Self> {
        let m = LtcModel {
            endpoints,
            n_original,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let e = &self.endpoints;
        if e.len() < 2 {
            return Err(Error::invalid("LTC model needs at least 2 endpoints"));
        }
        if e[0].index != 0 || e[e.len() - 1].index + 1 != self.n_original {
            return Err(Error::invalid(format!(
                "LTC endpoints must span indices 0..={}",
                self.n_original.saturating_sub(1)
            )));
        }
        if e.windows(2).any(|p| p[0].index >= p[1].index) {
            return Err(Error::invalid(
                "LTC endpoint indices must be strictly increasing",
            ));
        }
        if e.iter().any(|p| !p.value.is_finite()) {
            return Err(Error::invalid("LTC endpoint values must be finite"));
        }
        Ok(())
    }

    pub fn endpoints(&self) -> &[Endpoint] {
        &self.endpoints
    }

    pub fn n_original(&self) -> usize {
        self.n_original
    }
}

/// Compress `window` so that linear interpolation between the returned
/// endpoints stays within `eps` of every sample.
pub fn ltc_compress(window: &TimeSeriesWindow, eps: ErrorBudget) -> LtcModel {
    let x = window.samples();
    let n = x.len();
    let (lo, hi) = crate::stats::min_max(x);
    let range = hi - lo;
    if range == 0.0 {
        return LtcModel {
            endpoints: vec![
                Endpoint {
                    index: 0,
                    value: x[0],
                },
                Endpoint {
                    index: n - 1,
                    value: x[0],
                },
            ],
            n_original: n,
        };
    }

    // Shave a hair off the budget so rounding in the slope arithmetic and
    // in reconstruction can never push a sample past the requested bound.
    let tol = eps.absolute(range);
    let scale = lo.abs().max(hi.abs());
    let work = (tol - (tol * 1e-9 + 8.0 * f64::EPSILON * scale)).max(0.0);

    let mut endpoints = vec![Endpoint {
        index: 0,
        value: x[0],
    }];
    let mut anchor = 0usize;
    let mut v0 = x[0];
    let mut slope_lo = f64::NEG_INFINITY;
    let mut slope_hi = f64::INFINITY;

    let mut j = 1;
    while j < n {
        let d = (j - anchor) as f64;
        let lo_j = (x[j] - work - v0) / d;
        let hi_j = (x[j] + work - v0) / d;
        let new_lo = slope_lo.max(lo_j);
        let new_hi = slope_hi.min(hi_j);
        if new_lo <= new_hi {
            slope_lo = new_lo;
            slope_hi = new_hi;
            j += 1;
            continue;
        }
        // Sample j cannot join; close the segment at j - 1. The interval is
        // never empty here because a segment always admits its first sample.
        let end = j - 1;
        let v = junction(x[end], v0, slope_lo, slope_hi, end - anchor, work);
        endpoints.push(Endpoint {
            index: end,
            value: v,
        });
        anchor = end;
        v0 = v;
        slope_lo = f64::NEG_INFINITY;
        slope_hi = f64::INFINITY;
    }
    let v = junction(x[n - 1], v0, slope_lo, slope_hi, n - 1 - anchor, work);
    endpoints.push(Endpoint {
        index: n - 1,
        value: v,
    });

    LtcModel {
        endpoints,
        n_original: n,
    }
}

fn junction(sample: f64, v0: f64, slope_lo: f64, slope_hi: f64, steps: usize, work: f64) -> f64 {
    let mid = 0.5 * (slope_lo + slope_hi);
    let v = v0 + mid * steps as f64;
    v.clamp(sample - work, sample + work)
}

/// Linear interpolation between consecutive endpoints.
pub fn ltc_reconstruct(m: &LtcModel) -> Result<Vec<f64>> {
    m.validate()?;
    let mut out = vec![0.0; m.n_original];
    for seg in m.endpoints.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let span = (b.index - a.index) as f64;
        for (i, slot) in out[a.index..=b.index].iter_mut().enumerate() {
            *slot = a.value + (b.value - a.value) * (i as f64 / span);
        }
        // Exact at the stored endpoints.
        out[a.index] = a.value;
        out[b.index] = b.value;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compression::distortion;

    fn window(xs: Vec<f64>) -> TimeSeriesWindow {
        TimeSeriesWindow::new(xs, "t").unwrap()
    }

    fn budget(p: f64) -> ErrorBudget {
        ErrorBudget::new(p).unwrap()
    }

    #[test]
    fn affine_signal_is_one_segment() {
        let w = window((0..500).map(|i| 2.0 * i as f64 + 1.0).collect());
        for p in [0.0, 0.5, 10.0] {
            let m = ltc_compress(&w, budget(p));
            assert_eq!(m.endpoints().len(), 2);
            assert_eq!(
                m.endpoints()[0],
                Endpoint {
                    index: 0,
                    value: 1.0
                }
            );
            assert_eq!(m.endpoints()[1].index, 499);
            assert!((m.endpoints()[1].value - 999.0).abs() < 1e-9);
        }
        let w = window((0..300).map(|i| 0.37 * i as f64 - 4.1).collect());
        assert_eq!(ltc_compress(&w, budget(0.1)).endpoints().len(), 2);
    }

    #[test]
    fn zero_budget_keeps_every_breakpoint() {
        let w = window(vec![0.0, 1.0, 0.0, 1.0, 0.0]);
        let m = ltc_compress(&w, budget(0.0));
        assert_eq!(m.endpoints().len(), 5);
        assert_eq!(ltc_reconstruct(&m).unwrap(), w.samples());
    }

    #[test]
    fn hand_checked_segmentation() {
        // Range 10, budget 1.0. From (0, 0) the slope interval after
        // samples 1..=3 is [2/3, 4/3]; sample 4 needs slope >= 9/4, so the
        // segment ends at 3 with junction 0 + 3 * 1 = 3. From (3, 3) one
        // step admits [6, 8], giving junction 3 + 7 = 10.
        let w = window(vec![0.0, 1.0, 2.0, 3.0, 10.0]);
        let m = ltc_compress(&w, budget(10.0));
        let idx: Vec<usize> = m.endpoints().iter().map(|e| e.index).collect();
        assert_eq!(idx, vec![0, 3, 4]);
        assert!((m.endpoints()[1].value - 3.0).abs() < 1e-6);
        assert!((m.endpoints()[2].value - 10.0).abs() < 1e-6);
    }

    #[test]
    fn reconstruct_interpolates() {
        let m = LtcModel::new(
            vec![
                Endpoint {
                    index: 0,
                    value: 0.0,
                },
                Endpoint {
                    index: 4,
                    value: 4.0,
                },
            ],
            5,
        )
        .unwrap();
        assert_eq!(ltc_reconstruct(&m).unwrap(), vec![0.0, 1.0, 2.0, 3.0, 4.0]);

        let all: Vec<Endpoint> = [3.0, -1.0, 2.0]
            .iter()
            .enumerate()
            .map(|(index, &value)| Endpoint { index, value })
            .collect();
        let m = LtcModel::new(all, 3).unwrap();
        assert_eq!(ltc_reconstruct(&m).unwrap(), vec![3.0, -1.0, 2.0]);
    }

    #[test]
    fn malformed_models_are_rejected() {
        let e = |index, value| Endpoint { index, value };
        assert!(LtcModel::new(vec![e(0, 0.0)], 1).is_err());
        assert!(LtcModel::new(vec![e(0, 0.0), e(2, 1.0), e(2, 1.0), e(4, 0.0)], 5).is_err());
        assert!(LtcModel::new(vec![e(1, 0.0), e(4, 0.0)], 5).is_err());
        assert!(LtcModel::new(vec![e(0, 0.0), e(3, 0.0)], 5).is_err());
    }

    #[test]
    fn constant_window_short_circuits() {
        let w = window(vec![4.0; 50]);
        let m = ltc_compress(&w, budget(0.0));
        assert_eq!(m.endpoints().len(), 2);
        assert_eq!(
            distortion(w.samples(), &ltc_reconstruct(&m).unwrap()).unwrap(),
            0.0
        );
    }
}
