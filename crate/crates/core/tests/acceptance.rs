//! Acceptance criteria, one check per criterion.
//!
//! Runs without the libtest harness so that every criterion prints its
//! verdict line even when it passes. The process exits non-zero if any
//! criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rdclass::classify::{cross_validate, Ffnn, FfnnParams, TrainerSpec};
use rdclass::compression::{
    class_curves, dct_compress, dct_forward, dct_inverse, dct_reconstruct, distortion,
    ltc_compress, model_bits, Algorithm, CompressedModel, ErrorBudget, DEFAULT_EPS_GRID_PCT,
};
use rdclass::features::{normalize, normalize_column, SignalFeatureMatrix};
use rdclass::netsim::{simulate, CurveSet, Scenario, SimulationReport, Strategy};
use rdclass::pipeline::{self, PipelineConfig};
use rdclass::reduce::{greedy_select, pca_fit, pca_transform};
use rdclass::timeseries::gen_synthetic;
use rdclass::{SampleEncoding, SignalClass, TimeSeriesWindow};

type Check = fn() -> Verdict;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

fn enc() -> SampleEncoding {
    SampleEncoding::new(16).unwrap()
}

fn budgets() -> Vec<ErrorBudget> {
    ErrorBudget::grid(&DEFAULT_EPS_GRID_PCT).unwrap()
}

/// 1000 synthetic windows of N=500, classes interleaved.
fn mixed_corpus() -> Vec<TimeSeriesWindow> {
    (0..1000u64)
        .map(|i| gen_synthetic(SignalClass::ALL[(i % 3) as usize], 500, 10_000 + i).unwrap())
        .collect()
}

fn error_bound() -> Verdict {
    let start = Instant::now();
    let corpus = mixed_corpus();
    let (mut cases, mut violations, mut worst) = (0usize, 0usize, 0.0f64);
    for w in &corpus {
        for alg in [Algorithm::Ltc, Algorithm::Dct] {
            for eps in budgets() {
                let m = CompressedModel::compress(alg, w, eps);
                let d = distortion(w.samples(), &m.reconstruct().unwrap()).unwrap();
                cases += 1;
                worst = worst.max(d / eps.pct());
                if d > eps.pct() {
                    violations += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Verdict::new(
        violations == 0 && secs < 120.0,
        format!(
            "{cases} cases, {violations} over budget, worst distortion/eps {worst:.4}, {secs:.1}s"
        ),
    )
}

fn rate_monotonicity() -> Verdict {
    let corpus = mixed_corpus();
    let mut violations = [0usize; 2];
    let mut example = None;
    for w in &corpus {
        for (a, alg) in [Algorithm::Ltc, Algorithm::Dct].into_iter().enumerate() {
            let bits: Vec<u64> = budgets()
                .into_iter()
                .map(|eps| model_bits(&CompressedModel::compress(alg, w, eps), enc()))
                .collect();
            let found = bits.windows(2).filter(|p| p[1] > p[0]).count();
            if found > 0 && example.is_none() {
                example = Some(format!("{} {}: {bits:?}", alg, w.source_id()));
            }
            violations[a] += found;
        }
    }
    Verdict::new(
        violations == [0, 0],
        format!(
            "{} windows, violations ltc {} dct {}{}",
            corpus.len(),
            violations[0],
            violations[1],
            example.map_or(String::new(), |e| format!(", first {e}"))
        ),
    )
}

/// Textbook orthonormal DCT-II straight from the definition.
fn reference_dct(x: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    (0..x.len())
        .map(|k| {
            let a = if k == 0 {
                (1.0 / n).sqrt()
            } else {
                (2.0 / n).sqrt()
            };
            a * x
                .iter()
                .enumerate()
                .map(|(i, v)| v * (PI * (i as f64 + 0.5) * k as f64 / n).cos())
                .sum::<f64>()
        })
        .collect()
}

fn max_abs(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn dct_correctness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut round_trip, mut parseval, mut vs_reference) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let n = rng.random_range(2..=600);
        let scale = 10f64.powi(rng.random_range(-3..=4));
        let offset = rng.random_range(-1.0..1.0) * scale * 10.0;
        let mut walk = 0.0;
        let x: Vec<f64> = (0..n)
            .map(|_| {
                walk += rng.random_range(-1.0..1.0);
                offset + scale * walk
            })
            .collect();
        let c = dct_forward(&x);
        let norm = max_abs(x.iter().copied());
        let back = dct_inverse(&c);
        round_trip = round_trip.max(max_abs(x.iter().zip(&back).map(|(a, b)| a - b)) / norm);
        let ex: f64 = x.iter().map(|v| v * v).sum();
        let ec: f64 = c.iter().map(|v| v * v).sum();
        parseval = parseval.max((ex - ec).abs() / ex);
        let r = reference_dct(&x);
        let cnorm = max_abs(r.iter().copied());
        vs_reference = vs_reference.max(max_abs(c.iter().zip(&r).map(|(a, b)| a - b)) / cnorm);
    }

    let mut edge_ok = true;
    for (value, n) in [(4.2, 500), (-0.03, 37), (1234.5, 2)] {
        let w = TimeSeriesWindow::new(vec![value; n], "const").unwrap();
        let m = dct_compress(&w, ErrorBudget::new(0.0).unwrap());
        let d = distortion(w.samples(), &dct_reconstruct(&m).unwrap()).unwrap();
        edge_ok &= m.coeffs().len() == 1 && d == 0.0;
    }
    for seed in 0..5 {
        let w = gen_synthetic(SignalClass::Noisy, 500, seed).unwrap();
        let m = dct_compress(&w, ErrorBudget::new(0.0).unwrap());
        edge_ok &= m.coeffs().len() == 500;
    }

    let pass = round_trip < 1e-9 && parseval < 1e-9 && vs_reference < 1e-9 && edge_ok;
    Verdict::new(
        pass,
        format!(
            "round trip {round_trip:.2e}, Parseval {parseval:.2e}, vs definition {vs_reference:.2e}, \
             K=1/K=N edge cases {}",
            if edge_ok { "exact" } else { "wrong" }
        ),
    )
}

/// Work budget the compressor actually enforces: the requested budget less
/// a roundoff margin.
fn ltc_work_budget(x: &[f64], eps_pct: f64) -> f64 {
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = eps_pct / 100.0 * (hi - lo);
    let scale = lo.abs().max(hi.abs());
    (tol - (tol * 1e-9 + 8.0 * f64::EPSILON * scale)).max(0.0)
}

/// Brute force: from each anchor, try every end index and keep the longest
/// segment for which some candidate slope satisfies every sample's band.
fn ltc_oracle_endpoints(x: &[f64], eps_pct: f64) -> usize {
    let n = x.len();
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        return 2;
    }
    let work = ltc_work_budget(x, eps_pct);
    let bands = |anchor: usize, v0: f64, end: usize| -> Vec<(f64, f64)> {
        (anchor + 1..=end)
            .map(|j| {
                let d = (j - anchor) as f64;
                ((x[j] - work - v0) / d, (x[j] + work - v0) / d)
            })
            .collect()
    };
    let feasible_slopes = |b: &[(f64, f64)]| -> Vec<f64> {
        b.iter()
            .flat_map(|&(l, h)| [l, h])
            .filter(|&s| b.iter().all(|&(l, h)| l <= s && s <= h))
            .collect()
    };

    let (mut anchor, mut v0, mut count) = (0usize, x[0], 1usize);
    loop {
        let mut end = anchor + 1;
        for e in anchor + 1..n {
            if !feasible_slopes(&bands(anchor, v0, e)).is_empty() {
                end = e;
            }
        }
        let slopes = feasible_slopes(&bands(anchor, v0, end));
        let s_lo = slopes.iter().copied().fold(f64::INFINITY, f64::min);
        let s_hi = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let v =
            (v0 + 0.5 * (s_lo + s_hi) * (end - anchor) as f64).clamp(x[end] - work, x[end] + work);
        count += 1;
        if end == n - 1 {
            return count;
        }
        anchor = end;
        v0 = v;
    }
}

fn ltc_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut mismatches = Vec::new();
    for case in 0..200 {
        let n = rng.random_range(2..=30);
        let x: Vec<f64> = match case % 4 {
            0 => (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            1 => (0..n).map(|_| rng.random_range(0..6) as f64).collect(),
            2 => {
                let f = rng.random_range(0.05..0.4);
                (0..n)
                    .map(|i| (2.0 * PI * f * i as f64).sin() + 0.1 * rng.random_range(-1.0..1.0))
                    .collect()
            }
            _ => {
                let mut v = 0.0;
                (0..n)
                    .map(|_| {
                        v += rng.random_range(-1.0..1.0);
                        v
                    })
                    .collect()
            }
        };
        let eps = rng.random_range(0.0..25.0);
        let w = TimeSeriesWindow::new(x.clone(), "oracle").unwrap();
        let got = ltc_compress(&w, ErrorBudget::new(eps).unwrap())
            .endpoints()
            .len();
        let want = ltc_oracle_endpoints(&x, eps);
        if got != want {
            mismatches.push(format!(
                "case {case}: N={n} eps={eps:.3} got {got} want {want}"
            ));
        }
    }
    Verdict::new(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "200 windows, endpoint counts identical".to_owned()
        } else {
            format!("{} mismatches, first: {}", mismatches.len(), mismatches[0])
        },
    )
}

/// Type-7 quantile written out from its definition.
fn type7(col: &[f64], p: f64) -> f64 {
    let mut s = col.to_vec();
    s.sort_by(f64::total_cmp);
    let h = (s.len() - 1) as f64 * p;
    let i = h.floor() as usize;
    if i + 1 < s.len() {
        s[i] + (h - i as f64) * (s[i + 1] - s[i])
    } else {
        s[i]
    }
}

fn direct_normalization(col: &[f64]) -> Option<Vec<f64>> {
    let med = type7(col, 0.5);
    let iqr = type7(col, 0.75) - type7(col, 0.25);
    if iqr == 0.0 {
        return None;
    }
    let t: Vec<f64> = col
        .iter()
        .map(|f| 1.0 / (1.0 + (-(f - med) / (1.35 * iqr)).exp()))
        .collect();
    let lo = t.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some(t.iter().map(|v| (v - lo) / (hi - lo)).collect())
}

fn normalization() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut max_err, mut range_ok, mut rank_ok) = (0.0f64, true, true);
    let mut columns: Vec<Vec<f64>> = vec![vec![1.0, 2.0, 3.0, 4.0, 100.0]];
    while columns.len() < 100 {
        let len = rng.random_range(5..200);
        let scale = 10f64.powi(rng.random_range(-2..=3));
        let mut col: Vec<f64> = (0..len)
            .map(|_| scale * rng.random_range(-1.0..1.0))
            .collect();
        // Outliers and ties.
        for _ in 0..rng.random_range(0..3) {
            let i = rng.random_range(0..len);
            col[i] *= 50.0;
        }
        if columns.len().is_multiple_of(5) {
            for v in col.iter_mut() {
                *v = (*v * 3.0 / scale).round();
            }
        }
        columns.push(col);
    }
    for col in &columns {
        let (got, flagged) = normalize_column(col);
        match direct_normalization(col) {
            Some(want) => {
                range_ok &= !flagged;
                max_err = max_err.max(max_abs(got.iter().zip(&want).map(|(a, b)| a - b)));
            }
            None => range_ok &= flagged,
        }
        range_ok &= got.iter().all(|v| (0.0..=1.0).contains(v));
        for i in 0..col.len() {
            for j in 0..col.len() {
                if col[i] < col[j] {
                    rank_ok &= got[i] <= got[j];
                } else if col[i] == col[j] {
                    rank_ok &= got[i] == got[j];
                }
            }
        }
    }

    // Zero-IQR column through the matrix path: constant 0.5 and flagged.
    let rows: Vec<Vec<f64>> = [1.0, 1.0, 1.0, 1.0, 9.0]
        .iter()
        .zip([0.1, 0.2, 0.3, 0.4, 0.5])
        .map(|(&a, b)| vec![a, b])
        .collect();
    let m = SignalFeatureMatrix::new(
        rows,
        vec![SignalClass::Noisy; 5],
        vec!["flat".into(), "spread".into()],
    )
    .unwrap();
    let nm = normalize(&m).unwrap();
    let sentinel_ok = nm.column(0).iter().all(|&v| v == 0.5)
        && nm.sidecar().flagged_columns == ["flat".to_owned()];

    Verdict::new(
        max_err <= 1e-12 && range_ok && rank_ok && sentinel_ok,
        format!(
            "{} columns, max deviation {max_err:.2e}, range {}, ranks {}, zero-IQR sentinel {}",
            columns.len(),
            ok(range_ok),
            ok(rank_ok),
            ok(sentinel_ok)
        ),
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "broken"
    }
}

fn ffnn_gradient() -> Verdict {
    let h = 1e-5;
    let mut worst = 0.0f64;
    let mut shapes = Vec::new();
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let inputs = rng.random_range(1..=8);
        let hidden = rng.random_range(1..=12);
        let n_classes = rng.random_range(2..=3);
        let samples = rng.random_range(4..=25);
        let classes = SignalClass::ALL[..n_classes].to_vec();
        let x: Vec<Vec<f64>> = (0..samples)
            .map(|_| (0..inputs).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let labels: Vec<SignalClass> = (0..samples).map(|i| classes[i % n_classes]).collect();
        let params = FfnnParams {
            hidden,
            seed,
            ..FfnnParams::default()
        };
        let mut net = Ffnn::init(classes, inputs, params).unwrap();
        // Move off the initial point so biases are non-zero too.
        let theta: Vec<f64> = net
            .flat_params()
            .iter()
            .map(|v| v + rng.random_range(-0.5..0.5))
            .collect();
        net.set_flat_params(&theta).unwrap();

        let (_, grad) = net.loss_and_gradient(&x, &labels).unwrap();
        for p in 0..theta.len() {
            let mut t = theta.clone();
            t[p] = theta[p] + h;
            net.set_flat_params(&t).unwrap();
            let up = net.loss(&x, &labels).unwrap();
            t[p] = theta[p] - h;
            net.set_flat_params(&t).unwrap();
            let down = net.loss(&x, &labels).unwrap();
            let numeric = (up - down) / (2.0 * h);
            let denom = grad[p].abs().max(numeric.abs()).max(1e-8);
            worst = worst.max((grad[p] - numeric).abs() / denom);
        }
        net.set_flat_params(&theta).unwrap();
        shapes.push(format!("{inputs}-{hidden}-{n_classes}"));
    }
    Verdict::new(
        worst < 1e-5,
        format!(
            "10 seeds, shapes {}, max relative error {worst:.2e}",
            shapes.join(" ")
        ),
    )
}

fn corpus_config() -> PipelineConfig {
    PipelineConfig {
        windows_per_class: 100,
        ..PipelineConfig::default()
    }
}

fn classification() -> Verdict {
    let start = Instant::now();
    let cfg = corpus_config();
    let dir = tempfile::tempdir().unwrap();
    pipeline::cmd_ingest(&cfg, &[], dir.path()).unwrap();
    let m = pipeline::cmd_features(&cfg, dir.path(), dir.path()).unwrap();
    let sel = greedy_select(&m, 20, 10, 0).unwrap();
    let x = m.select_columns(&sel.selected_indices).unwrap();
    let svm = cross_validate(&TrainerSpec::svm(), x.rows(), x.labels(), 10, 0).unwrap();
    let ffnn = cross_validate(&TrainerSpec::ffnn(0), x.rows(), x.labels(), 10, 0).unwrap();

    let mut pca_means = Vec::new();
    for l in 1..=10 {
        let scores = pca_transform(&pca_fit(&m, l).unwrap(), &m).unwrap();
        let mean = (0..10u64)
            .map(|s| cross_validate(&TrainerSpec::svm(), &scores, m.labels(), 10, s).unwrap())
            .sum::<f64>()
            / 10.0;
        pca_means.push(mean);
    }
    let pca_ok = pca_means.windows(2).all(|p| p[1] >= p[0]);
    let secs = start.elapsed().as_secs_f64();
    let trace: Vec<String> = pca_means.iter().map(|a| format!("{a:.3}")).collect();
    Verdict::new(
        svm >= 0.90 && ffnn >= 0.90 && pca_ok && secs < 600.0,
        format!(
            "{} rows, selected-20 SVM {svm:.3} FFNN {ffnn:.3}; PCA L=1..10 SVM [{}] {}; {secs:.1}s",
            m.n_rows(),
            trace.join(" "),
            if pca_ok {
                "non-decreasing"
            } else {
                "decreases"
            }
        ),
    )
}

fn rd_separation() -> Verdict {
    let windows: Vec<TimeSeriesWindow> = SignalClass::ALL
        .iter()
        .flat_map(|&c| (0..100u64).map(move |i| gen_synthetic(c, 500, 20_000 + i).unwrap()))
        .collect();
    let curves = class_curves(&windows, Algorithm::Ltc, &budgets(), enc()).unwrap();
    let at4 = |c: SignalClass| {
        curves
            .iter()
            .find(|k| k.class_label == Some(c))
            .unwrap()
            .rate_at(4.0)
    };
    let (noisy, qp) = (at4(SignalClass::Noisy), at4(SignalClass::QuasiPeriodic));
    let ratio = noisy / qp;
    Verdict::new(
        ratio >= 1.5,
        format!("LTC rate at 4%: noisy {noisy:.4}, quasi-periodic {qp:.4}, ratio {ratio:.2}"),
    )
}

fn simulation() -> Verdict {
    let start = Instant::now();
    let scenario = Scenario::default().with_synthetic_nodes(100);
    let curves = CurveSet::from_synthetic(
        &scenario.generator,
        scenario.window_len,
        100,
        &scenario.xi_grid,
        scenario.energy.encoding().unwrap(),
        scenario.seed,
    )
    .unwrap();
    let report = simulate(&scenario, &curves).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let mut notes = Vec::new();
    let mut pass = secs < 300.0;

    let groups: Vec<Option<SignalClass>> = std::iter::once(None)
        .chain(SignalClass::ALL.map(Some))
        .collect();
    let agg = |s: Strategy, c: Option<SignalClass>, xi: f64| {
        report.aggregate_for(s, c, xi).expect("aggregate present")
    };

    // NoCompression: flat in xi for every group, and the most expensive
    // strategy over the whole network.
    let mut flat = true;
    let mut maximal = true;
    let mut class_exceptions = Vec::new();
    for &c in &groups {
        let base = agg(Strategy::NoCompression, c, scenario.xi_grid[0]).mean_energy;
        for &xi in &scenario.xi_grid {
            let e = agg(Strategy::NoCompression, c, xi).mean_energy;
            flat &= e == base;
            for s in [Strategy::DctCl, Strategy::DctCa] {
                let other = agg(s, c, xi).mean_energy;
                if other > e {
                    match c {
                        None => maximal = false,
                        Some(_) => class_exceptions.push(format!("{s}/{}@{xi}", label(c))),
                    }
                }
            }
        }
    }
    pass &= flat && maximal;
    notes.push(format!(
        "no-compression {} and {} (per-class exceptions: [{}])",
        if flat { "flat" } else { "varies" },
        if maximal { "maximal" } else { "not maximal" },
        class_exceptions.join(" ")
    ));

    // DCT-CA mean distortion within 1.2 xi, overall and per class.
    let mut worst: Option<(f64, Option<SignalClass>, f64)> = None;
    let mut over = Vec::new();
    for &c in &groups {
        for &xi in &scenario.xi_grid {
            let r = agg(Strategy::DctCa, c, xi).mean_distortion_pct / xi;
            if r > 1.2 {
                over.push(format!("{}@{xi}:{r:.2}", label(c)));
            }
            if worst.is_none_or(|w| r > w.0) {
                worst = Some((r, c, xi));
            }
        }
    }
    let (wr, wc, wxi) = worst.unwrap();
    pass &= over.is_empty();
    notes.push(format!(
        "dct-ca distortion/xi worst {wr:.2} ({} at {wxi}), {} of {} points over 1.2 [{}]",
        label(wc),
        over.len(),
        groups.len() * scenario.xi_grid.len(),
        over.join(" ")
    ));

    // DCT-CL exceeds xi somewhere.
    let cl_over = SignalClass::ALL
        .iter()
        .flat_map(|&c| scenario.xi_grid.iter().map(move |&xi| (c, xi)))
        .filter(|&(c, xi)| agg(Strategy::DctCl, Some(c), xi).mean_distortion_pct > xi)
        .count();
    pass &= cl_over > 0;
    notes.push(format!(
        "dct-cl mean distortion above xi at {cl_over} class/xi points"
    ));

    // DCT-CA no costlier than DCT-CL on quasi-periodic nodes.
    let qp = Some(SignalClass::QuasiPeriodic);
    let costlier: Vec<String> = scenario
        .xi_grid
        .iter()
        .filter_map(|&xi| {
            let ca = agg(Strategy::DctCa, qp, xi).mean_energy;
            let cl = agg(Strategy::DctCl, qp, xi).mean_energy;
            (ca > cl).then(|| format!("{xi}:{:.3}", ca / cl))
        })
        .collect();
    pass &= costlier.is_empty();
    notes.push(format!(
        "quasi-periodic dct-ca energy above dct-cl at {} xi values [{}]",
        costlier.len(),
        costlier.join(" ")
    ));

    // Spec-side trend check on the class-aware energies.
    let ca_monotone = ca_energy_non_increasing(&report, &scenario.xi_grid);
    notes.push(format!(
        "dct-ca energy {} in xi",
        if ca_monotone {
            "non-increasing"
        } else {
            "increases"
        }
    ));
    notes.push(format!("{secs:.1}s"));
    Verdict::new(pass, notes.join("; "))
}

fn ca_energy_non_increasing(report: &SimulationReport, grid: &[f64]) -> bool {
    grid.windows(2).all(|p| {
        let e = |xi| {
            report
                .aggregate_for(Strategy::DctCa, None, xi)
                .unwrap()
                .mean_energy
        };
        e(p[1]) <= e(p[0])
    })
}

fn label(c: Option<SignalClass>) -> &'static str {
    c.map_or("all", SignalClass::name)
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

fn determinism() -> Verdict {
    let cfg = PipelineConfig {
        windows_per_class: 20,
        nodes_per_class: 10,
        folds: 5,
        k: 6,
        seed: 7,
        ..PipelineConfig::default()
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    pipeline::cmd_pipeline(&cfg, a.path()).unwrap();
    pipeline::cmd_pipeline(&cfg, b.path()).unwrap();
    let (sa, sb) = (snapshot(a.path()), snapshot(b.path()));
    let differing: Vec<&String> = sa
        .iter()
        .filter(|(name, bytes)| sb.get(*name) != Some(bytes))
        .map(|(name, _)| name)
        .collect();
    let same_names = sa.keys().eq(sb.keys());
    Verdict::new(
        same_names && differing.is_empty() && !sa.is_empty(),
        format!(
            "{} files from two pipeline runs, {} differ{}",
            sa.len(),
            differing.len(),
            if same_names { "" } else { ", file sets differ" }
        ),
    )
}

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("error-bound guarantee", error_bound),
        ("rate monotonicity", rate_monotonicity),
        ("DCT correctness", dct_correctness),
        ("LTC oracle equivalence", ltc_oracle),
        ("normalization", normalization),
        ("FFNN gradient check", ffnn_gradient),
        ("classification accuracy", classification),
        ("RD class separation", rd_separation),
        ("simulation orderings", simulation),
        ("determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let v = match std::panic::catch_unwind(check) {
            Ok(v) => v,
            Err(_) => Verdict::new(false, "panicked"),
        };
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<26} {}  {}",
            i + 1,
            name,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
