//! Lossy compressors with a hard per-sample error bound, and the
//! rate/distortion metrics built on top of them.
//!
//! Both compressors take an [`ErrorBudget`] expressed as a percentage of the
//! window's value range, the same normalization used by [`distortion`], so a
//! requested budget and a measured distortion are directly comparable.

mod dct;
mod ltc;
mod rd;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::{raw_bits_for_len, SampleEncoding, TimeSeriesWindow};

pub use self::dct::{
    dct_compress, dct_compress_rate, dct_forward, dct_inverse, dct_reconstruct, DctModel,
};
pub use self::ltc::{ltc_compress, ltc_reconstruct, Endpoint, LtcModel};
pub use self::rd::{
    average_curve, class_curves, min_rate_for_tolerance, rd_sweep, CurveSidecar, RateLookup,
    RdCurve, RdPoint, DEFAULT_EPS_GRID_PCT,
};

/// Maximum tolerated per-sample error, in percent of the window range.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ErrorBudget {
    epsilon_pct: f64,
}

impl ErrorBudget {
    pub fn new(epsilon_pct: f64) -> Result<Self> {
        if !epsilon_pct.is_finite() || epsilon_pct < 0.0 {
            return Err(Error::invalid(format!(
                "error budget must be a finite percentage >= 0, got {epsilon_pct}"
            )));
        }
        Ok(ErrorBudget { epsilon_pct })
    }

    pub fn pct(self) -> f64 {
        self.epsilon_pct
    }

    /// Budget in signal units for a window of the given range.
    pub fn absolute(self, range: f64) -> f64 {
        self.epsilon_pct / 100.0 * range
    }

    pub fn grid(pcts: &[f64]) -> Result<Vec<ErrorBudget>> {
        pcts.iter().map(|&p| ErrorBudget::new(p)).collect()
    }
}

impl TryFrom<f64> for ErrorBudget {
    type Error = Error;

    fn try_from(pct: f64) -> Result<Self> {
        ErrorBudget::new(pct)
    }
}

impl From<ErrorBudget> for f64 {
    fn from(b: ErrorBudget) -> f64 {
        b.epsilon_pct
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ltc,
    Dct,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Algorithm::Ltc => "ltc",
            Algorithm::Dct => "dct",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ltc" => Ok(Algorithm::Ltc),
            "dct" => Ok(Algorithm::Dct),
            other => Err(Error::invalid(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// Output of either compressor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CompressedModel {
    Ltc(LtcModel),
    Dct(DctModel),
}

impl CompressedModel {
    pub fn compress(
        algorithm: Algorithm,
        window: &TimeSeriesWindow,
        eps: ErrorBudget,
    ) -> CompressedModel {
        match algorithm {
            Algorithm::Ltc => CompressedModel::Ltc(ltc_compress(window, eps)),
            Algorithm::Dct => CompressedModel::Dct(dct_compress(window, eps)),
        }
    }

    pub fn n_original(&self) -> usize {
        match self {
            CompressedModel::Ltc(m) => m.n_original(),
            CompressedModel::Dct(m) => m.n_original(),
        }
    }

    pub fn reconstruct(&self) -> Result<Vec<f64>> {
        match self {
            CompressedModel::Ltc(m) => ltc_reconstruct(m),
            CompressedModel::Dct(m) => dct_reconstruct(m),
        }
    }

    pub fn bits(&self, enc: SampleEncoding) -> u64 {
        match self {
            CompressedModel::Ltc(m) => model_bits_ltc(m, enc),
            CompressedModel::Dct(m) => model_bits_dct(m, enc),
        }
    }
}

/// Bits for a sample index into a window of `n` samples: ceil(log2 n).
pub fn index_bits(n: usize) -> u64 {
    if n <= 1 {
        0
    } else {
        u64::from(usize::BITS - (n - 1).leading_zeros())
    }
}

/// Each endpoint carries a value and a sample index.
pub fn model_bits_ltc(m: &LtcModel, enc: SampleEncoding) -> u64 {
    m.endpoints().len() as u64 * (u64::from(enc.bits_per_sample()) + index_bits(m.n_original()))
}

/// One value per retained coefficient plus a single coefficient-count field.
pub fn model_bits_dct(m: &DctModel, enc: SampleEncoding) -> u64 {
    m.coeffs().len() as u64 * u64::from(enc.bits_per_sample()) + index_bits(m.n_original())
}

pub fn model_bits(m: &CompressedModel, enc: SampleEncoding) -> u64 {
    m.bits(enc)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateOutcome {
    /// Compressed over raw bits, capped at 1.
    pub rate: f64,
    /// The model would be larger than the raw window; send raw samples.
    pub fallback_raw: bool,
}

pub fn rate(m: &CompressedModel, enc: SampleEncoding) -> RateOutcome {
    let raw = raw_bits_for_len(m.n_original(), enc);
    let bits = m.bits(enc);
    if bits >= raw {
        RateOutcome {
            rate: 1.0,
            fallback_raw: bits > raw,
        }
    } else {
        RateOutcome {
            rate: bits as f64 / raw as f64,
            fallback_raw: false,
        }
    }
}

const ZERO_RANGE_ROUNDOFF: f64 = 4.0 * f64::EPSILON;

pub(crate) fn max_abs_error(x: &[f64], x_hat: &[f64]) -> f64 {
    x.iter()
        .zip(x_hat)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

pub(crate) fn pct_of_range(err: f64, range: f64) -> f64 {
    100.0 * err / range
}

/// Maximum absolute reconstruction error in percent of the range of `x`.
///
/// A zero-range `x` has distortion 0 when reconstructed exactly, up to the
/// roundoff of a DC-only synthesis; any other reconstruction of it is an
/// error since the ratio is unbounded.
pub fn distortion(x: &[f64], x_hat: &[f64]) -> Result<f64> {
    if x.len() != x_hat.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} samples vs {} reconstructed",
            x.len(),
            x_hat.len()
        )));
    }
    let (lo, hi) = crate::stats::min_max(x);
    let range = hi - lo;
    let err = max_abs_error(x, x_hat);
    if range > 0.0 {
        Ok(pct_of_range(err, range))
    } else if err <= ZERO_RANGE_ROUNDOFF * (x_hat.len() as f64) * lo.abs() {
        Ok(0.0)
    } else {
        Err(Error::Computation(
            "zero-range window with imperfect reconstruction has unbounded distortion".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(xs: Vec<f64>) -> TimeSeriesWindow {
        TimeSeriesWindow::new(xs, "t").unwrap()
    }

    #[test]
    fn index_bits_is_ceil_log2() {
        assert_eq!(index_bits(500), 9);
        assert_eq!(index_bits(512), 9);
        assert_eq!(index_bits(513), 10);
        assert_eq!(index_bits(2), 1);
        assert_eq!(index_bits(1), 0);
    }

    #[test]
    fn model_bit_accounting() {
        let enc = SampleEncoding::default();
        let affine = window((0..500).map(|i| 3.0 * i as f64 - 7.0).collect());
        let ltc =
            CompressedModel::compress(Algorithm::Ltc, &affine, ErrorBudget::new(1.0).unwrap());
        assert_eq!(ltc.bits(enc), 50);
        assert_eq!(rate(&ltc, enc).rate, 50.0 / 8000.0);

        let flat = window(vec![2.5; 500]);
        let dct1 = CompressedModel::compress(Algorithm::Dct, &flat, ErrorBudget::new(1.0).unwrap());
        assert_eq!(dct1.bits(enc), 25);

        let full = CompressedModel::Dct(dct_compress_rate(&affine, 500).unwrap());
        assert_eq!(full.bits(enc), 8009);
        let r = rate(&full, enc);
        assert_eq!(r.rate, 1.0);
        assert!(r.fallback_raw);
    }

    #[test]
    fn distortion_definition() {
        assert_eq!(distortion(&[1.0, 5.0, 2.0], &[1.0, 5.0, 2.0]).unwrap(), 0.0);
        assert_eq!(distortion(&[0.0, 10.0], &[1.0, 10.0]).unwrap(), 10.0);
        assert_eq!(distortion(&[3.0, 3.0], &[3.0, 3.0]).unwrap(), 0.0);
        assert!(distortion(&[3.0, 3.0], &[3.0, 3.1]).is_err());
        assert!(distortion(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn budget_validation() {
        assert!(ErrorBudget::new(-0.1).is_err());
        assert!(ErrorBudget::new(f64::NAN).is_err());
        assert_eq!(ErrorBudget::new(10.0).unwrap().absolute(5.0), 0.5);
    }
}
