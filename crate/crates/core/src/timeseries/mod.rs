//! Windows of univariate samples, CSV ingestion and synthetic generators.

mod csv;
mod synth;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use self::csv::{load_csv, LoadReport};
pub use self::synth::{gen_synthetic, gen_synthetic_with, GeneratorConfig};

/// Rate-distortion class of a signal.
///
/// Variant order is the fixed iteration order used everywhere results are
/// grouped by class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalClass {
    Noisy,
    QuasiPeriodic,
    Trend,
}

impl SignalClass {
    pub const ALL: [SignalClass; 3] = [
        SignalClass::Noisy,
        SignalClass::QuasiPeriodic,
        SignalClass::Trend,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            SignalClass::Noisy => "noisy",
            SignalClass::QuasiPeriodic => "quasi_periodic",
            SignalClass::Trend => "trend",
        }
    }
}

impl fmt::Display for SignalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for SignalClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "noisy" => Ok(SignalClass::Noisy),
            "quasi_periodic" | "quasiperiodic" => Ok(SignalClass::QuasiPeriodic),
            "trend" => Ok(SignalClass::Trend),
            other => Err(Error::invalid(format!("unknown signal class `{other}`"))),
        }
    }
}

/// Fixed-point width of one raw sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct SampleEncoding {
    bits_per_sample: u32,
}

impl SampleEncoding {
    pub fn new(bits_per_sample: u32) -> Result<Self> {
        if !(8..=64).contains(&bits_per_sample) {
            return Err(Error::invalid(format!(
                "bits per sample must be in [8, 64], got {bits_per_sample}"
            )));
        }
        Ok(SampleEncoding { bits_per_sample })
    }

    pub fn bits_per_sample(self) -> u32 {
        self.bits_per_sample
    }
}

impl Default for SampleEncoding {
    fn default() -> Self {
        SampleEncoding {
            bits_per_sample: 16,
        }
    }
}

impl TryFrom<u32> for SampleEncoding {
    type Error = Error;

    fn try_from(bits: u32) -> Result<Self> {
        SampleEncoding::new(bits)
    }
}

impl From<SampleEncoding> for u32 {
    fn from(enc: SampleEncoding) -> u32 {
        enc.bits_per_sample
    }
}

/// `N` finite samples (N >= 2) plus provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWindow")]
pub struct TimeSeriesWindow {
    samples: Vec<f64>,
    source_id: String,
    class_label: Option<SignalClass>,
}

#[derive(Deserialize)]
struct RawWindow {
    samples: Vec<f64>,
    source_id: String,
    class_label: Option<SignalClass>,
}

impl TryFrom<RawWindow> for TimeSeriesWindow {
    type Error = Error;

    fn try_from(raw: RawWindow) -> Result<Self> {
        let w = TimeSeriesWindow::new(raw.samples, raw.source_id)?;
        Ok(w.with_label(raw.class_label))
    }
}

impl TimeSeriesWindow {
    pub fn new(samples: Vec<f64>, source_id: impl Into<String>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::invalid(format!(
                "a window needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!(
                "sample {i} is not finite ({})",
                samples[i]
            )));
        }
        Ok(TimeSeriesWindow {
            samples,
            source_id: source_id.into(),
            class_label: None,
        })
    }

    pub fn with_label(mut self, label: Option<SignalClass>) -> Self {
        self.class_label = label;
        self
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; windows hold at least two samples.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn class_label(&self) -> Option<SignalClass> {
        self.class_label
    }

    /// `max - min` of the samples.
    pub fn range(&self) -> f64 {
        let (lo, hi) = crate::stats::min_max(&self.samples);
        hi - lo
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// Bits needed to send the window uncompressed.
pub fn raw_bits(window: &TimeSeriesWindow, enc: SampleEncoding) -> u64 {
    raw_bits_for_len(window.len(), enc)
}

pub(crate) fn raw_bits_for_len(n: usize, enc: SampleEncoding) -> u64 {
    n as u64 * u64::from(enc.bits_per_sample())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize) -> TimeSeriesWindow {
        TimeSeriesWindow::new((0..n).map(|i| i as f64).collect(), "ramp").unwrap()
    }

    #[test]
    fn raw_bits_is_length_times_width() {
        let enc16 = SampleEncoding::default();
        assert_eq!(raw_bits(&ramp(500), enc16), 8000);
        assert_eq!(raw_bits(&ramp(2), enc16), 32);
        assert_eq!(
            raw_bits(&ramp(500), SampleEncoding::new(32).unwrap()),
            16000
        );
    }

    #[test]
    fn window_rejects_short_and_non_finite() {
        assert!(TimeSeriesWindow::new(vec![1.0], "x").is_err());
        assert!(TimeSeriesWindow::new(vec![1.0, f64::NAN], "x").is_err());
        assert!(TimeSeriesWindow::new(vec![1.0, f64::INFINITY], "x").is_err());
    }

    #[test]
    fn encoding_bounds() {
        assert!(SampleEncoding::new(7).is_err());
        assert!(SampleEncoding::new(65).is_err());
        assert_eq!(SampleEncoding::new(64).unwrap().bits_per_sample(), 64);
    }

    #[test]
    fn class_order_and_names() {
        assert!(SignalClass::Noisy < SignalClass::QuasiPeriodic);
        assert!(SignalClass::QuasiPeriodic < SignalClass::Trend);
        for c in SignalClass::ALL {
            assert_eq!(c.name().parse::<SignalClass>().unwrap(), c);
        }
    }

    #[test]
    fn deserialization_validates() {
        let bad = r#"{"samples":[1.0],"source_id":"a","class_label":null}"#;
        assert!(serde_json::from_str::<TimeSeriesWindow>(bad).is_err());
        let good = r#"{"samples":[1.0,2.0],"source_id":"a","class_label":"trend"}"#;
        let w: TimeSeriesWindow = serde_json::from_str(good).unwrap();
        assert_eq!(w.class_label(), Some(SignalClass::Trend));
    }
}
