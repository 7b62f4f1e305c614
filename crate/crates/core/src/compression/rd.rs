//! Empirical rate-distortion curves.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{distortion, index_bits, rate, Algorithm, CompressedModel, ErrorBudget};
use crate::error::{Error, Result};
use crate::timeseries::{raw_bits_for_len, SampleEncoding, SignalClass, TimeSeriesWindow};

/// Budgets, in percent of range, used when none are given.
pub const DEFAULT_EPS_GRID_PCT: [f64; 10] = [0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 7.0, 10.0, 15.0, 20.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdPoint {
    pub distortion_pct: f64,
    pub rate: f64,
}

/// Achievable rate as a function of distortion, sorted by distortion, with
/// rate non-increasing along the curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdCurve {
    pub algorithm: Algorithm,
    pub class_label: Option<SignalClass>,
    /// Length of the windows the curve was measured on.
    pub window_len: usize,
    pub encoding: SampleEncoding,
    /// How many per-window curves were averaged into this one.
    pub n_windows: usize,
    points: Vec<RdPoint>,
}

/// JSON metadata written next to a curve's CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSidecar {
    pub algorithm: Algorithm,
    pub class: Option<SignalClass>,
    pub n_windows: usize,
    pub window_len: usize,
    pub bits_per_sample: u32,
}

impl RdCurve {
    /// Build a curve from raw measurements: sort by distortion, replace each
    /// rate by the running minimum, then keep one point per distortion.
    pub fn from_measurements(
        algorithm: Algorithm,
        class_label: Option<SignalClass>,
        window_len: usize,
        encoding: SampleEncoding,
        n_windows: usize,
        mut points: Vec<RdPoint>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid(
                "a rate-distortion curve needs at least one point",
            ));
        }
        if points.iter().any(|p| {
            !(p.distortion_pct >= 0.0 && p.distortion_pct.is_finite())
                || !(p.rate > 0.0 && p.rate <= 1.0)
        }) {
            return Err(Error::invalid(
                "curve points need finite distortion >= 0 and rate in (0, 1]",
            ));
        }
        points.sort_by(|a, b| {
            a.distortion_pct
                .total_cmp(&b.distortion_pct)
                .then(b.rate.total_cmp(&a.rate))
        });
        let mut best = f64::INFINITY;
        for p in &mut points {
            best = best.min(p.rate);
            p.rate = best;
        }
        // Within a run of equal distortions the last point has the lowest rate.
        let mut deduped: Vec<RdPoint> = Vec::with_capacity(points.len());
        for p in points {
            match deduped.last_mut() {
                Some(last) if last.distortion_pct == p.distortion_pct => *last = p,
                _ => deduped.push(p),
            }
        }
        Ok(RdCurve {
            algorithm,
            class_label,
            window_len,
            encoding,
            n_windows,
            points: deduped,
        })
    }

    pub fn points(&self) -> &[RdPoint] {
        &self.points
    }

    /// Linear interpolation in distortion, constant beyond either end.
    pub fn rate_at(&self, distortion_pct: f64) -> f64 {
        let pts = &self.points;
        let first = pts[0];
        let last = pts[pts.len() - 1];
        if distortion_pct <= first.distortion_pct {
            return first.rate;
        }
        if distortion_pct >= last.distortion_pct {
            return last.rate;
        }
        let hi = pts.partition_point(|p| p.distortion_pct <= distortion_pct);
        let (a, b) = (pts[hi - 1], pts[hi]);
        if a.distortion_pct == distortion_pct {
            return a.rate;
        }
        let t = (distortion_pct - a.distortion_pct) / (b.distortion_pct - a.distortion_pct);
        a.rate + t * (b.rate - a.rate)
    }

    pub fn sidecar(&self) -> CurveSidecar {
        CurveSidecar {
            algorithm: self.algorithm,
            class: self.class_label,
            n_windows: self.n_windows,
            window_len: self.window_len,
            bits_per_sample: self.encoding.bits_per_sample(),
        }
    }

    /// CSV with header `distortion_pct,rate`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("distortion_pct,rate\n");
        for p in &self.points {
            s.push_str(&format!("{},{}\n", p.distortion_pct, p.rate));
        }
        s
    }

    /// Write `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn write_files(&self, dir: &Path, stem: &str) -> Result<()> {
        let csv_path = dir.join(format!("{stem}.csv"));
        std::fs::write(&csv_path, self.to_csv()).map_err(|e| Error::io(&csv_path, e))?;
        let json_path = dir.join(format!("{stem}.json"));
        let mut f = std::fs::File::create(&json_path).map_err(|e| Error::io(&json_path, e))?;
        serde_json::to_writer_pretty(&mut f, &self.sidecar())?;
        writeln!(f).map_err(|e| Error::io(&json_path, e))?;
        Ok(())
    }

    /// Read a curve written by [`RdCurve::write_files`].
    pub fn read_files(dir: &Path, stem: &str) -> Result<RdCurve> {
        let json_path = dir.join(format!("{stem}.json"));
        let text = std::fs::read_to_string(&json_path).map_err(|e| Error::io(&json_path, e))?;
        let meta: CurveSidecar = serde_json::from_str(&text)?;
        let csv_path = dir.join(format!("{stem}.csv"));
        let mut reader = csv::Reader::from_path(&csv_path).map_err(|e| Error::Parse {
            path: csv_path.clone(),
            message: e.to_string(),
        })?;
        let points = reader
            .deserialize::<RdPoint>()
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse {
                path: csv_path.clone(),
                message: e.to_string(),
            })?;
        RdCurve::from_measurements(
            meta.algorithm,
            meta.class,
            meta.window_len,
            SampleEncoding::new(meta.bits_per_sample)?,
            meta.n_windows,
            points,
        )
    }
}

/// Compress `window` at every budget in `eps_grid` and record the measured
/// (distortion, rate) pairs.
pub fn rd_sweep(
    window: &TimeSeriesWindow,
    algorithm: Algorithm,
    eps_grid: &[ErrorBudget],
    enc: SampleEncoding,
) -> Result<RdCurve> {
    if eps_grid.is_empty() {
        return Err(Error::invalid("error budget grid is empty"));
    }
    if eps_grid.windows(2).any(|p| p[0].pct() > p[1].pct()) {
        return Err(Error::invalid("error budget grid must be sorted ascending"));
    }
    let points = eps_grid
        .iter()
        .map(|&eps| {
            let model = CompressedModel::compress(algorithm, window, eps);
            let recon = model.reconstruct()?;
            Ok(RdPoint {
                distortion_pct: distortion(window.samples(), &recon)?,
                rate: rate(&model, enc).rate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    RdCurve::from_measurements(
        algorithm,
        window.class_label(),
        window.len(),
        enc,
        1,
        points,
    )
}

/// Interpolate every curve onto `grid` and average the rates pointwise.
pub fn average_curve(curves: &[RdCurve], grid: &[f64]) -> Result<RdCurve> {
    let first = curves
        .first()
        .ok_or_else(|| Error::invalid("cannot average an empty set of curves"))?;
    if grid.is_empty() || grid.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::invalid(
            "distortion grid must be non-empty and strictly ascending",
        ));
    }
    if curves.iter().any(|c| {
        c.algorithm != first.algorithm
            || c.window_len != first.window_len
            || c.encoding != first.encoding
    }) {
        return Err(Error::invalid(
            "averaged curves must share algorithm, window length and encoding",
        ));
    }
    let class_label = if curves.iter().all(|c| c.class_label == first.class_label) {
        first.class_label
    } else {
        None
    };
    let count = curves.len() as f64;
    let points = grid
        .iter()
        .map(|&d| RdPoint {
            distortion_pct: d,
            rate: curves.iter().map(|c| c.rate_at(d)).sum::<f64>() / count,
        })
        .collect();
    RdCurve::from_measurements(
        first.algorithm,
        class_label,
        first.window_len,
        first.encoding,
        curves.iter().map(|c| c.n_windows).sum(),
        points,
    )
}

/// One average curve per class present among `windows`, in class order.
/// Every window must carry a class label.
pub fn class_curves(
    windows: &[TimeSeriesWindow],
    algorithm: Algorithm,
    eps_grid: &[ErrorBudget],
    enc: SampleEncoding,
) -> Result<Vec<RdCurve>> {
    if let Some(w) = windows.iter().find(|w| w.class_label().is_none()) {
        return Err(Error::invalid(format!(
            "window {} has no class label",
            w.source_id()
        )));
    }
    let sweeps = windows
        .par_iter()
        .map(|w| rd_sweep(w, algorithm, eps_grid, enc))
        .collect::<Result<Vec<_>>>()?;
    let grid: Vec<f64> = eps_grid.iter().map(|e| e.pct()).collect();
    let mut out = Vec::new();
    for class in SignalClass::ALL {
        let members: Vec<RdCurve> = sweeps
            .iter()
            .filter(|c| c.class_label == Some(class))
            .cloned()
            .collect();
        if !members.is_empty() {
            out.push(average_curve(&members, &grid)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateLookup {
    pub rate: f64,
    /// Model size the rate buys: retained coefficients for DCT curves,
    /// segment endpoints for LTC curves. Never below the smallest valid
    /// model and never above the window length.
    pub k_equiv: usize,
}

/// Minimum rate the curve promises at distortion `xi_pct`, and the model
/// size that fits in that many bits.
pub fn min_rate_for_tolerance(curve: &RdCurve, xi_pct: f64) -> RateLookup {
    let rate = curve.rate_at(xi_pct);
    let n = curve.window_len;
    let raw = raw_bits_for_len(n, curve.encoding) as f64;
    let bps = f64::from(curve.encoding.bits_per_sample());
    let idx = index_bits(n) as f64;
    let k_equiv = match curve.algorithm {
        Algorithm::Dct => (floor_fit((rate * raw - idx) / bps).max(1.0) as usize).min(n),
        Algorithm::Ltc => (floor_fit(rate * raw / (bps + idx)).max(2.0) as usize).min(n),
    };
    RateLookup { rate, k_equiv }
}

/// Floor that forgives roundoff just below an integer, so a rate computed
/// from an exact bit count maps back to that count.
fn floor_fit(v: f64) -> f64 {
    (v + 1e-9).floor()
}
