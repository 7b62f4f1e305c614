//! The fixed 24-feature bank.
//!
//! Every feature is a pure function of the window. When the window has zero
//! spread the std-normalized features take fixed sentinel values so that
//! constant windows still produce finite rows:
//!
//! | feature                         | sentinel |
//! |---------------------------------|----------|
//! | skewness, excess kurtosis       | 0        |
//! | ACF at every lag                | 1        |
//! | first ACF zero crossing         | 1        |
//! | spectral centroid/entropy/low   | 0        |
//! | StatAv, sliding-std ratio       | 0        |
//! | approximate entropy             | 0        |
//! | time-reversal asymmetry         | 0        |
//! | AR(2) residual ratio            | 0        |
//! | trend slope, trend R^2          | 0        |
//!
//! StatAv and the sliding-std ratio need at least two 25-sample blocks and
//! are NaN below 50 samples; the matrix builder filters such outputs.

use crate::compression::dct_forward;
use crate::error::{Error, Result};
use crate::stats;

pub const BANK_VERSION: &str = "rdfeat-24/1";

/// Shortest window the bank accepts.
pub const MIN_WINDOW_LEN: usize = 20;

pub const FEATURE_NAMES: [&str; 24] = [
    "mean",
    "std",
    "skewness",
    "excess_kurtosis",
    "median",
    "iqr",
    "outlier_fraction",
    "acf_lag1",
    "acf_lag2",
    "acf_lag5",
    "acf_lag10",
    "first_acf_zero_crossing",
    "spectral_centroid",
    "spectral_entropy",
    "low_frequency_energy",
    "stat_av",
    "sliding_std_ratio",
    "approximate_entropy",
    "permutation_entropy",
    "lempel_ziv_complexity",
    "time_reversal_asymmetry",
    "ar2_residual_ratio",
    "trend_slope",
    "trend_r2",
];

const BLOCK_LEN: usize = 25;

/// Evaluate the whole bank on `x`.
pub fn extract_values(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < MIN_WINDOW_LEN {
        return Err(Error::invalid(format!(
            "feature extraction needs at least {MIN_WINDOW_LEN} samples, got {}",
            x.len()
        )));
    }
    let mean = stats::mean(x);
    let std = stats::std_dev(x);
    let degenerate = std == 0.0;
    let sorted = stats::sorted(x);
    let median = stats::quantile_sorted(&sorted, 0.5);
    let iqr = stats::quantile_sorted(&sorted, 0.75) - stats::quantile_sorted(&sorted, 0.25);

    let (skew, kurt) = if degenerate {
        (0.0, 0.0)
    } else {
        shape_moments(x, mean)
    };
    let acf_at = |lag: usize| if degenerate { 1.0 } else { acf(x, mean, lag) };
    let acf1 = acf_at(1);
    let acf2 = acf_at(2);

    let spectrum = if degenerate {
        None
    } else {
        let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
        Some(dct_forward(&centered))
    };
    let (centroid, entropy, low_energy) = match &spectrum {
        Some(s) => spectral_features(s),
        None => (0.0, 0.0, 0.0),
    };

    let (stat_av, sliding_std) = block_features(x, std);

    let (slope_feat, r2) = if degenerate {
        (0.0, 0.0)
    } else {
        linear_trend(x, std)
    };

    Ok(vec![
        mean,
        std,
        skew,
        kurt,
        median,
        iqr,
        outlier_fraction(x, mean, std),
        acf1,
        acf2,
        acf_at(5),
        acf_at(10),
        if degenerate {
            1.0
        } else {
            first_zero_crossing(x, mean)
        },
        centroid,
        entropy,
        low_energy,
        stat_av,
        sliding_std,
        if degenerate {
            0.0
        } else {
            approximate_entropy(x, 2, 0.2 * std)
        },
        permutation_entropy(x),
        lempel_ziv(x, median),
        time_reversal_asymmetry(x),
        if degenerate {
            0.0
        } else {
            ar2_residual_ratio(acf1, acf2)
        },
        slope_feat,
        r2,
    ])
}

/// Sample skewness and excess kurtosis from biased central moments.
fn shape_moments(x: &[f64], mean: f64) -> (f64, f64) {
    let n = x.len() as f64;
    let (m2, m3, m4) = x.iter().fold((0.0, 0.0, 0.0), |(a, b, c), v| {
        let d = v - mean;
        let d2 = d * d;
        (a + d2, b + d2 * d, c + d2 * d2)
    });
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
}

fn outlier_fraction(x: &[f64], mean: f64, std: f64) -> f64 {
    x.iter().filter(|v| (*v - mean).abs() > 2.0 * std).count() as f64 / x.len() as f64
}

/// Autocorrelation with the usual biased estimator
/// `sum (x_t - m)(x_{t+k} - m) / sum (x_t - m)^2`.
fn acf(x: &[f64], mean: f64, lag: usize) -> f64 {
    if lag >= x.len() {
        return 0.0;
    }
    let den: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    let num: f64 = x
        .iter()
        .zip(&x[lag..])
        .map(|(a, b)| (a - mean) * (b - mean))
        .sum();
    num / den
}

/// First lag with negative autocorrelation, divided by N (1 if none).
fn first_zero_crossing(x: &[f64], mean: f64) -> f64 {
    let n = x.len();
    let den: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    for lag in 1..n {
        let num: f64 = x
            .iter()
            .zip(&x[lag..])
            .map(|(a, b)| (a - mean) * (b - mean))
            .sum();
        if num / den < 0.0 {
            return lag as f64 / n as f64;
        }
    }
    1.0
}

/// Centroid (as a fraction of N), normalized Shannon entropy and the
/// lowest-decile energy share of the DCT spectrum of the centered window.
fn spectral_features(spectrum: &[f64]) -> (f64, f64, f64) {
    let n = spectrum.len();
    let mags: f64 = spectrum.iter().map(|c| c.abs()).sum();
    let energy: f64 = spectrum.iter().map(|c| c * c).sum();
    if mags == 0.0 || energy == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let centroid = spectrum
        .iter()
        .enumerate()
        .map(|(k, c)| k as f64 * c.abs())
        .sum::<f64>()
        / mags
        / n as f64;
    let entropy = -spectrum
        .iter()
        .map(|c| c * c / energy)
        .filter(|p| *p > 0.0)
        .map(|p| p * p.ln())
        .sum::<f64>()
        / (n as f64).ln();
    let low = n.div_ceil(10);
    let low_share = spectrum[..low].iter().map(|c| c * c).sum::<f64>() / energy;
    (centroid, entropy, low_share)
}

/// StatAv and mean block std over non-overlapping 25-sample blocks, both
/// relative to the overall std.
fn block_features(x: &[f64], std: f64) -> (f64, f64) {
    let blocks: Vec<&[f64]> = x.chunks_exact(BLOCK_LEN).collect();
    if blocks.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    if std == 0.0 {
        return (0.0, 0.0);
    }
    let means: Vec<f64> = blocks.iter().map(|b| stats::mean(b)).collect();
    let stds: Vec<f64> = blocks.iter().map(|b| stats::std_dev(b)).collect();
    (stats::std_dev(&means) / std, stats::mean(&stds) / std)
}

/// Approximate entropy ApEn(m, r), self-matches included.
fn approximate_entropy(x: &[f64], m: usize, r: f64) -> f64 {
    phi(x, m, r) - phi(x, m + 1, r)
}

fn phi(x: &[f64], m: usize, r: f64) -> f64 {
    let count = x.len() - m + 1;
    let mut total = 0.0;
    for i in 0..count {
        let matches = (0..count)
            .filter(|&j| (0..m).all(|k| (x[i + k] - x[j + k]).abs() <= r))
            .count();
        total += (matches as f64 / count as f64).ln();
    }
    total / count as f64
}

/// Order-3 permutation entropy over ln 3!, ties ranked by position.
fn permutation_entropy(x: &[f64]) -> f64 {
    let mut counts = [0usize; 6];
    for w in x.windows(3) {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| w[a].total_cmp(&w[b]));
        let code = match order {
            [0, 1, 2] => 0,
            [0, 2, 1] => 1,
            [1, 0, 2] => 2,
            [1, 2, 0] => 3,
            [2, 0, 1] => 4,
            _ => 5,
        };
        counts[code] += 1;
    }
    let total = (x.len() - 2) as f64;
    -counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            p * p.ln()
        })
        .sum::<f64>()
        / 6f64.ln()
}

/// LZ76 phrase count of the sequence binarized at the median, scaled by
/// log2(N) / N.
fn lempel_ziv(x: &[f64], median: f64) -> f64 {
    let bits: Vec<bool> = x.iter().map(|&v| v > median).collect();
    let n = bits.len();
    lz76_phrases(&bits) as f64 * (n as f64).log2() / n as f64
}

/// Kaspar-Schuster count of distinct phrases in the LZ76 parsing.
fn lz76_phrases(s: &[bool]) -> usize {
    let n = s.len();
    if n < 2 {
        return n;
    }
    let (mut c, mut l, mut i, mut k, mut k_max) = (1usize, 1usize, 0usize, 1usize, 1usize);
    loop {
        if s[i + k - 1] == s[l + k - 1] {
            k += 1;
            if l + k > n {
                c += 1;
                break;
            }
        } else {
            k_max = k_max.max(k);
            i += 1;
            if i == l {
                c += 1;
                l += k_max;
                if l + 1 > n {
                    break;
                }
                i = 0;
                k = 1;
                k_max = 1;
            } else {
                k = 1;
            }
        }
    }
    c
}

fn time_reversal_asymmetry(x: &[f64]) -> f64 {
    let diffs: Vec<f64> = x.windows(2).map(|p| p[1] - p[0]).collect();
    let m2 = diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64;
    if m2 == 0.0 {
        return 0.0;
    }
    let m3 = diffs.iter().map(|d| d * d * d).sum::<f64>() / diffs.len() as f64;
    m3 / m2.powf(1.5)
}

/// Innovation variance of the Yule-Walker AR(2) fit over the signal
/// variance: `1 - phi1 r1 - phi2 r2`.
fn ar2_residual_ratio(r1: f64, r2: f64) -> f64 {
    let den = 1.0 - r1 * r1;
    if den.abs() < 1e-12 {
        return 0.0;
    }
    let phi1 = r1 * (1.0 - r2) / den;
    let phi2 = (r2 - r1 * r1) / den;
    (1.0 - phi1 * r1 - phi2 * r2).max(0.0)
}

/// Least-squares slope over the window (times N / std) and the fit's R^2.
fn linear_trend(x: &[f64], std: f64) -> (f64, f64) {
    let n = x.len() as f64;
    let t_mean = (n - 1.0) / 2.0;
    let x_mean = stats::mean(x);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (i, v) in x.iter().enumerate() {
        let dt = i as f64 - t_mean;
        let dx = v - x_mean;
        sxy += dt * dx;
        sxx += dt * dt;
        syy += dx * dx;
    }
    let slope = sxy / sxx;
    (slope * n / std, (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0))
}
