use std::f64::consts::TAU;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{SignalClass, TimeSeriesWindow};
use crate::error::{Error, Result};

/// Shape parameters of the three synthetic signal classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    /// Std of the white noise in the noisy class.
    pub noisy_std: f64,
    /// Std of the random-walk component added to the noisy class.
    pub noisy_walk_amplitude: f64,

    pub periodic_amplitude: f64,
    /// Fundamental period range as fractions of the window length.
    pub periodic_min_period_frac: f64,
    pub periodic_max_period_frac: f64,
    /// Relative per-cycle jitter of amplitude and period (0.1 = +-10%).
    pub periodic_jitter: f64,
    /// Amplitudes of the 2nd and 3rd harmonics relative to the fundamental.
    pub periodic_harmonics: [f64; 2],
    /// Noise std as a fraction of the amplitude.
    pub periodic_noise_frac: f64,

    /// Expected change between consecutive spline knots.
    pub trend_knot_drift: f64,
    /// Std of the random offset added to each knot.
    pub trend_knot_jitter: f64,
    /// Noise std as a fraction of the knot value range.
    pub trend_noise_frac: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            noisy_std: 1.0,
            noisy_walk_amplitude: 0.2,
            periodic_amplitude: 1.0,
            periodic_min_period_frac: 1.0 / 25.0,
            periodic_max_period_frac: 1.0 / 10.0,
            periodic_jitter: 0.1,
            periodic_harmonics: [0.5, 0.25],
            periodic_noise_frac: 0.05,
            trend_knot_drift: 1.0,
            trend_knot_jitter: 0.3,
            trend_noise_frac: 0.01,
        }
    }
}

impl GeneratorConfig {
    /// Read overrides from a TOML file; absent keys keep their defaults.
    pub fn from_toml_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: GeneratorConfig = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let non_negative = [
            self.noisy_std,
            self.noisy_walk_amplitude,
            self.periodic_amplitude,
            self.periodic_jitter,
            self.periodic_noise_frac,
            self.trend_knot_drift,
            self.trend_knot_jitter,
            self.trend_noise_frac,
        ];
        if non_negative.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid(
                "generator parameters must be finite and >= 0",
            ));
        }
        if !(self.periodic_min_period_frac > 0.0
            && self.periodic_min_period_frac <= self.periodic_max_period_frac)
        {
            return Err(Error::invalid(
                "periodic period range must satisfy 0 < min <= max",
            ));
        }
        if self.periodic_jitter >= 1.0 {
            return Err(Error::invalid("periodic jitter must be below 1"));
        }
        Ok(())
    }
}

/// Synthetic window of `n` samples for `class`, a pure function of
/// `(class, n, seed)` under the default shape parameters.
pub fn gen_synthetic(class: SignalClass, n: usize, seed: u64) -> Result<TimeSeriesWindow> {
    gen_synthetic_with(&GeneratorConfig::default(), class, n, seed)
}

pub fn gen_synthetic_with(
    cfg: &GeneratorConfig,
    class: SignalClass,
    n: usize,
    seed: u64,
) -> Result<TimeSeriesWindow> {
    if n < 2 {
        return Err(Error::invalid(format!(
            "synthetic window needs n >= 2, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(class.index() as u64 + 1);
    let samples = match class {
        SignalClass::Noisy => noisy(cfg, n, &mut rng),
        SignalClass::QuasiPeriodic => quasi_periodic(cfg, n, &mut rng),
        SignalClass::Trend => trend(cfg, n, &mut rng),
    };
    let w = TimeSeriesWindow::new(samples, format!("synthetic/{class}/{seed}"))?;
    Ok(w.with_label(Some(class)))
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn noisy(cfg: &GeneratorConfig, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let white: Vec<f64> = (0..n).map(|_| cfg.noisy_std * gaussian(rng)).collect();
    let mut walk = Vec::with_capacity(n);
    let mut acc = 0.0;
    for _ in 0..n {
        acc += gaussian(rng);
        walk.push(acc);
    }
    // The walk is rescaled to a fixed std so it stays a small drift
    // regardless of window length.
    let walk_std = crate::stats::std_dev(&walk);
    let scale = if walk_std > 0.0 {
        cfg.noisy_walk_amplitude / walk_std
    } else {
        0.0
    };
    let walk_mean = crate::stats::mean(&walk);
    white
        .iter()
        .zip(&walk)
        .map(|(w, r)| w + scale * (r - walk_mean))
        .collect()
}

fn quasi_periodic(cfg: &GeneratorConfig, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let lo = cfg.periodic_min_period_frac * n as f64;
    let hi = cfg.periodic_max_period_frac * n as f64;
    let base_period = if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    };
    let base_amp = cfg.periodic_amplitude;
    let j = cfg.periodic_jitter;
    let noise = Normal::new(0.0, cfg.periodic_noise_frac * base_amp).expect("finite std");

    let draw_cycle = |rng: &mut ChaCha8Rng| {
        let (a, p) = if j > 0.0 {
            (rng.random_range(-j..=j), rng.random_range(-j..=j))
        } else {
            (0.0, 0.0)
        };
        (base_amp * (1.0 + a), base_period * (1.0 + p))
    };

    let mut phase = rng.random_range(0.0..TAU);
    let (mut amp, mut period) = draw_cycle(rng);
    let [h2, h3] = cfg.periodic_harmonics;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let shape = phase.sin() + h2 * (2.0 * phase).sin() + h3 * (3.0 * phase).sin();
        out.push(amp * shape + noise.sample(rng));
        phase += TAU / period;
        if phase >= TAU {
            phase -= TAU;
            (amp, period) = draw_cycle(rng);
        }
    }
    out
}

fn trend(cfg: &GeneratorConfig, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n_knots = n.div_ceil(100) + 2;
    let direction = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let knot_x: Vec<f64> = (0..n_knots)
        .map(|k| k as f64 * (n - 1) as f64 / (n_knots - 1) as f64)
        .collect();
    let knot_y: Vec<f64> = (0..n_knots)
        .map(|k| {
            direction * cfg.trend_knot_drift * k as f64 + cfg.trend_knot_jitter * gaussian(rng)
        })
        .collect();
    let (lo, hi) = crate::stats::min_max(&knot_y);
    let noise = Normal::new(0.0, cfg.trend_noise_frac * (hi - lo)).expect("finite std");
    let spline = NaturalCubicSpline::new(&knot_x, &knot_y);
    (0..n)
        .map(|i| spline.eval(i as f64) + noise.sample(rng))
        .collect()
}

/// Interpolating cubic spline with zero second derivative at both ends.
struct NaturalCubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    second: Vec<f64>,
}

impl NaturalCubicSpline {
    fn new(xs: &[f64], ys: &[f64]) -> Self {
        let n = xs.len();
        let mut second = vec![0.0; n];
        if n > 2 {
            // Tridiagonal system for the interior second derivatives.
            let m = n - 2;
            let mut diag = vec![0.0; m];
            let mut upper = vec![0.0; m];
            let mut rhs = vec![0.0; m];
            for i in 0..m {
                let h0 = xs[i + 1] - xs[i];
                let h1 = xs[i + 2] - xs[i + 1];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0);
            }
            for i in 1..m {
                let lower = xs[i + 1] - xs[i];
                let f = lower / diag[i - 1];
                diag[i] -= f * upper[i - 1];
                rhs[i] -= f * rhs[i - 1];
            }
            second[m] = rhs[m - 1] / diag[m - 1];
            for i in (0..m - 1).rev() {
                second[i + 1] = (rhs[i] - upper[i] * second[i + 2]) / diag[i];
            }
        }
        NaturalCubicSpline {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            second,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let k = match self.xs.iter().rposition(|&k| k <= x) {
            Some(k) if k + 1 < self.xs.len() => k,
            Some(k) => k - 1,
            None => 0,
        };
        let h = self.xs[k + 1] - self.xs[k];
        let a = (self.xs[k + 1] - x) / h;
        let b = (x - self.xs[k]) / h;
        a * self.ys[k]
            + b * self.ys[k + 1]
            + ((a * a * a - a) * self.second[k] + (b * b * b - b) * self.second[k + 1]) * h * h
                / 6.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lag1_acf(x: &[f64]) -> f64 {
        let m = x.iter().sum::<f64>() / x.len() as f64;
        let den: f64 = x.iter().map(|v| (v - m).powi(2)).sum();
        let num: f64 = x.windows(2).map(|p| (p[0] - m) * (p[1] - m)).sum();
        num / den
    }

    fn linear_fit_r2(y: &[f64]) -> f64 {
        let n = y.len() as f64;
        let t: Vec<f64> = (0..y.len()).map(|i| i as f64).collect();
        let mt = t.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let sxy: f64 = t.iter().zip(y).map(|(a, b)| (a - mt) * (b - my)).sum();
        let sxx: f64 = t.iter().map(|a| (a - mt).powi(2)).sum();
        let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
        sxy * sxy / (sxx * syy)
    }

    #[test]
    fn generators_are_deterministic() {
        for class in SignalClass::ALL {
            let a = gen_synthetic(class, 300, 42).unwrap();
            let b = gen_synthetic(class, 300, 42).unwrap();
            assert_eq!(a.samples(), b.samples());
            let c = gen_synthetic(class, 300, 43).unwrap();
            assert_ne!(a.samples(), c.samples());
        }
    }

    #[test]
    fn noisy_has_low_lag_one_correlation() {
        for seed in 0..100 {
            let w = gen_synthetic(SignalClass::Noisy, 500, seed).unwrap();
            let r = lag1_acf(w.samples());
            assert!(r < 0.6, "seed {seed}: lag-1 acf {r}");
        }
    }

    #[test]
    fn trend_is_mostly_linear() {
        for seed in 0..100 {
            let w = gen_synthetic(SignalClass::Trend, 500, seed).unwrap();
            let r2 = linear_fit_r2(w.samples());
            assert!(r2 > 0.5, "seed {seed}: r2 {r2}");
        }
    }

    #[test]
    fn spline_interpolates_knots() {
        let xs = [0.0, 1.0, 3.0, 4.0];
        let ys = [1.0, -2.0, 0.5, 3.0];
        let s = NaturalCubicSpline::new(&xs, &ys);
        for (x, y) in xs.iter().zip(&ys) {
            assert!((s.eval(*x) - y).abs() < 1e-12);
        }
        // Two knots: a straight line.
        let s = NaturalCubicSpline::new(&[0.0, 2.0], &[0.0, 4.0]);
        assert!((s.eval(1.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn config_overrides_from_toml() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("gen.toml");
        std::fs::write(&p, "periodic_amplitude = 3.0\ntrend_noise_frac = 0.0\n").unwrap();
        let cfg = GeneratorConfig::from_toml_file(&p).unwrap();
        assert_eq!(cfg.periodic_amplitude, 3.0);
        assert_eq!(cfg.noisy_std, 1.0);
        std::fs::write(&p, "bogus = 1\n").unwrap();
        assert!(GeneratorConfig::from_toml_file(&p).is_err());
    }

    #[test]
    fn tiny_windows_work() {
        for class in SignalClass::ALL {
            assert_eq!(gen_synthetic(class, 2, 1).unwrap().len(), 2);
        }
        assert!(gen_synthetic(SignalClass::Noisy, 1, 1).is_err());
    }
}
