use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{class_stem, ClassifierKind, FeatureSet, PipelineConfig};
use crate::classify::{cross_validate, FfnnParams, SavedModel, Trainer, TrainerSpec};
use crate::compression::{average_curve, class_curves, Algorithm, ErrorBudget, RdCurve};
use crate::error::{Error, Result};
use crate::features::{build_matrix, normalize, SignalFeatureMatrix};
use crate::files::{read_json, write_json, write_text};
use crate::netsim::{self, CurveSet, Scenario, SimulationReport, Strategy};
use crate::reduce::{greedy_select, pca_fit, pca_transform, SelectionResult};
use crate::timeseries::{gen_synthetic_with, load_csv, SignalClass, TimeSeriesWindow};

/// A CSV file to ingest, optionally labeled: `PATH` or `PATH=CLASS`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvInput {
    pub path: PathBuf,
    pub label: Option<SignalClass>,
}

impl FromStr for CsvInput {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.rsplit_once('=') {
            Some((path, class)) => Ok(CsvInput {
                path: path.into(),
                label: Some(class.parse()?),
            }),
            None => Ok(CsvInput {
                path: s.into(),
                label: None,
            }),
        }
    }
}

/// Windows produced by ingestion, stored as `windows.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowStore {
    pub window_len: usize,
    pub windows: Vec<TimeSeriesWindow>,
}

impl WindowStore {
    pub const FILE: &'static str = "windows.json";

    pub fn save(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join(Self::FILE), self)
    }

    /// Load from a `windows.json` path or the directory holding one.
    pub fn load(path: &Path) -> Result<WindowStore> {
        let file = if path.is_dir() {
            path.join(Self::FILE)
        } else {
            path.to_owned()
        };
        read_json(&file)
    }

    fn labels(&self) -> Result<Vec<SignalClass>> {
        self.windows
            .iter()
            .map(|w| {
                w.class_label().ok_or_else(|| {
                    Error::invalid(format!("window {} has no class label", w.source_id()))
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub windows: usize,
    pub per_class: BTreeMap<String, usize>,
    pub dropped_windows: usize,
    pub discarded_samples: usize,
    pub synthetic: bool,
}

#[derive(Serialize)]
struct RunRecord<'a, T: Serialize> {
    command: &'a str,
    config: &'a PipelineConfig,
    summary: &'a T,
}

fn write_run<T: Serialize>(
    out: &Path,
    command: &str,
    cfg: &PipelineConfig,
    summary: &T,
) -> Result<()> {
    write_json(
        &out.join(format!("{command}_run.json")),
        &RunRecord {
            command,
            config: cfg,
            summary,
        },
    )
}

fn ensure_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))
}

/// Load CSV inputs into windows, or generate the synthetic corpus when
/// `inputs` is empty. Writes `windows.json`.
pub fn cmd_ingest(cfg: &PipelineConfig, inputs: &[CsvInput], out: &Path) -> Result<IngestSummary> {
    cfg.validate()?;
    ensure_dir(out)?;
    let mut windows = Vec::new();
    let (mut dropped_windows, mut discarded_samples) = (0, 0);
    if inputs.is_empty() {
        for class in SignalClass::ALL {
            for i in 0..cfg.windows_per_class {
                let seed = netsim::mix(&[cfg.seed, class.index() as u64, i as u64]);
                windows.push(gen_synthetic_with(
                    &cfg.generator,
                    class,
                    cfg.window_len,
                    seed,
                )?);
            }
        }
    } else {
        for input in inputs {
            let report = load_csv(&input.path, cfg.window_len)?;
            dropped_windows += report.dropped_windows;
            discarded_samples += report.discarded_samples;
            windows.extend(
                report
                    .windows
                    .into_iter()
                    .map(|w| w.with_label(input.label)),
            );
        }
    }
    let mut per_class = BTreeMap::new();
    for w in &windows {
        let key = w.class_label().map_or("unlabeled", SignalClass::name);
        *per_class.entry(key.to_owned()).or_insert(0) += 1;
    }
    let summary = IngestSummary {
        windows: windows.len(),
        per_class,
        dropped_windows,
        discarded_samples,
        synthetic: inputs.is_empty(),
    };
    WindowStore {
        window_len: cfg.window_len,
        windows,
    }
    .save(out)?;
    write_run(out, "ingest", cfg, &summary)?;
    Ok(summary)
}

/// Sweep every window, average per class and over classes. Writes
/// `rd_<algorithm>_<class>` and `rd_<algorithm>_classless` curve files.
/// Returns the class curves followed by the classless one.
pub fn cmd_rd(
    cfg: &PipelineConfig,
    windows: &Path,
    algorithm: Algorithm,
    out: &Path,
) -> Result<Vec<RdCurve>> {
    cfg.validate()?;
    ensure_dir(out)?;
    let store = WindowStore::load(windows)?;
    let budgets = ErrorBudget::grid(&cfg.eps_grid)?;
    let mut curves = class_curves(&store.windows, algorithm, &budgets, cfg.encoding()?)?;
    let mut classless = average_curve(&curves, &cfg.eps_grid)?;
    classless.class_label = None;
    curves.push(classless);
    let mut files = Vec::new();
    for c in &curves {
        let stem = format!("rd_{algorithm}_{}", class_stem(c.class_label));
        c.write_files(out, &stem)?;
        files.push(stem);
    }
    write_run(out, &format!("rd_{algorithm}"), cfg, &files)?;
    Ok(curves)
}

#[derive(Debug, Clone, Serialize)]
struct FeaturesSummary {
    rows: usize,
    columns: usize,
    dropped_rows: Vec<usize>,
    dropped_columns: Vec<String>,
    flagged_columns: Vec<String>,
}

/// Extract, clean and normalize the feature matrix. Writes
/// `features_raw` and `features` (normalized).
pub fn cmd_features(
    cfg: &PipelineConfig,
    windows: &Path,
    out: &Path,
) -> Result<SignalFeatureMatrix> {
    cfg.validate()?;
    ensure_dir(out)?;
    let store = WindowStore::load(windows)?;
    let labels = store.labels()?;
    let raw = build_matrix(&store.windows, &labels)?;
    raw.write_files(out, "features_raw")?;
    let m = normalize(&raw)?;
    m.write_files(out, "features")?;
    let meta = m.sidecar();
    write_run(
        out,
        "features",
        cfg,
        &FeaturesSummary {
            rows: m.n_rows(),
            columns: m.n_cols(),
            dropped_rows: meta.dropped_rows.clone(),
            dropped_columns: meta.dropped_columns.clone(),
            flagged_columns: meta.flagged_columns.clone(),
        },
    )?;
    Ok(m)
}

/// Accepts `dir/features.csv`, `dir/features` or `dir` (meaning
/// `dir/features`).
fn load_matrix(path: &Path) -> Result<SignalFeatureMatrix> {
    let (dir, stem) = if path.is_dir() {
        (path.to_owned(), "features".to_owned())
    } else {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::invalid(format!("bad matrix path {}", path.display())))?;
        (
            path.parent().unwrap_or(Path::new("")).to_owned(),
            stem.to_owned(),
        )
    };
    SignalFeatureMatrix::read_files(&dir, &stem)
}

/// Greedy forward selection of `cfg.k` features. Writes `selection.json`.
pub fn cmd_select(cfg: &PipelineConfig, matrix: &Path, out: &Path) -> Result<SelectionResult> {
    cfg.validate()?;
    ensure_dir(out)?;
    let m = load_matrix(matrix)?;
    let k = cfg.k.min(m.n_cols());
    let result = greedy_select(&m, k, cfg.folds, cfg.seed)?;
    result.save(&out.join("selection.json"))?;
    write_run(out, "select", cfg, &result)?;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub classifier: ClassifierKind,
    pub features: FeatureSet,
    pub feature_names: Vec<String>,
    pub folds: usize,
    pub seed: u64,
    pub n_samples: usize,
    pub accuracy: f64,
}

fn trainer(kind: ClassifierKind, seed: u64) -> TrainerSpec {
    match kind {
        ClassifierKind::Svm => TrainerSpec::svm(),
        ClassifierKind::Ffnn => TrainerSpec::Ffnn(FfnnParams {
            seed,
            ..FfnnParams::default()
        }),
    }
}

/// Rows and column names for a feature-set variant.
fn design(
    m: &SignalFeatureMatrix,
    features: FeatureSet,
    selection: Option<&SelectionResult>,
) -> Result<(Vec<Vec<f64>>, Vec<String>)> {
    match features {
        FeatureSet::All => Ok((m.rows().to_vec(), m.feature_names().to_vec())),
        FeatureSet::Selected => {
            let sel = selection
                .ok_or_else(|| Error::invalid("feature set `selected` needs a selection file"))?;
            for (&i, name) in sel.selected_indices.iter().zip(&sel.selected_names) {
                if m.feature_names().get(i) != Some(name) {
                    return Err(Error::invalid(format!(
                        "selection names feature {name} at column {i}, which the matrix does not have"
                    )));
                }
            }
            let sub = m.select_columns(&sel.selected_indices)?;
            Ok((sub.rows().to_vec(), sub.feature_names().to_vec()))
        }
        FeatureSet::Pca(l) => {
            let p = pca_fit(m, l)?;
            let names = (1..=l).map(|i| format!("pc{i}")).collect();
            Ok((pca_transform(&p, m)?, names))
        }
    }
}

fn artifact_stem(kind: ClassifierKind, features: FeatureSet) -> String {
    format!("{kind}_{}", features.to_string().replace(':', "-"))
}

/// Cross-validated accuracy of one classifier on one feature set, plus a
/// model trained on all rows. Writes `accuracy_<variant>.json` and
/// `model_<variant>.json`.
pub fn cmd_train_eval(
    cfg: &PipelineConfig,
    matrix: &Path,
    classifier: ClassifierKind,
    features: FeatureSet,
    selection: Option<&Path>,
    out: &Path,
) -> Result<AccuracyReport> {
    cfg.validate()?;
    ensure_dir(out)?;
    let m = load_matrix(matrix)?;
    let sel = selection.map(SelectionResult::load).transpose()?;
    let report = evaluate(cfg, &m, classifier, features, sel.as_ref())?;
    let (x, names) = design(&m, features, sel.as_ref())?;
    let model = trainer(classifier, cfg.seed).train(&x, m.labels())?;
    let stem = artifact_stem(classifier, features);
    SavedModel::new(names, model).save(&out.join(format!("model_{stem}.json")))?;
    write_json(&out.join(format!("accuracy_{stem}.json")), &report)?;
    write_run(out, &format!("train_eval_{stem}"), cfg, &report)?;
    Ok(report)
}

fn evaluate(
    cfg: &PipelineConfig,
    m: &SignalFeatureMatrix,
    classifier: ClassifierKind,
    features: FeatureSet,
    selection: Option<&SelectionResult>,
) -> Result<AccuracyReport> {
    if !m.is_normalized() {
        return Err(Error::invalid(
            "classification expects a normalized feature matrix",
        ));
    }
    let (x, names) = design(m, features, selection)?;
    let accuracy = cross_validate(
        &trainer(classifier, cfg.seed),
        &x,
        m.labels(),
        cfg.folds,
        cfg.seed,
    )?;
    Ok(AccuracyReport {
        classifier,
        features,
        feature_names: names,
        folds: cfg.folds,
        seed: cfg.seed,
        n_samples: m.n_rows(),
        accuracy,
    })
}

#[derive(Serialize)]
struct SimulationSummary<'a> {
    scenario: &'a Scenario,
    /// Where the rate-distortion curves came from.
    curves: &'a str,
    report_period_s: f64,
    aggregates: &'a [netsim::Aggregate],
}

fn default_scenario(cfg: &PipelineConfig) -> Scenario {
    Scenario {
        seed: cfg.seed,
        window_len: cfg.window_len,
        xi_grid: cfg.eps_grid.clone(),
        energy: cfg.energy,
        generator: cfg.generator.clone(),
        training_windows_per_class: cfg.windows_per_class,
        ..Scenario::default()
    }
    .with_synthetic_nodes(cfg.nodes_per_class)
}

/// Run a simulation scenario, or the default all-synthetic one built from
/// `cfg` when `scenario` is `None`. Curves come from `curves_dir`
/// (`rd_dct_<class>` files) when given, else from the scenario.
pub fn cmd_simulate(
    cfg: &PipelineConfig,
    scenario: Option<&Path>,
    curves_dir: Option<&Path>,
    out: &Path,
) -> Result<SimulationReport> {
    cfg.validate()?;
    ensure_dir(out)?;
    let mut sc = match scenario {
        Some(p) => Scenario::load(p)?,
        None => default_scenario(cfg),
    };
    if let Some(dir) = curves_dir {
        sc.curves_dir = Some(dir.to_owned());
    }
    let (curves, source) = match &sc.curves_dir {
        Some(dir) => {
            let dir = sc.resolve_path(dir);
            let class_curves = SignalClass::ALL
                .iter()
                .map(|c| RdCurve::read_files(&dir, &format!("rd_dct_{}", c.name())))
                .collect::<Result<Vec<_>>>()?;
            (CurveSet::new(class_curves, &cfg.eps_grid)?, "curves_dir")
        }
        None => (
            CurveSet::from_synthetic(
                &sc.generator,
                sc.window_len,
                sc.training_windows_per_class,
                &cfg.eps_grid,
                sc.energy.encoding()?,
                sc.seed,
            )?,
            "synthetic training corpus",
        ),
    };
    run_simulation(cfg, &sc, &curves, source, out)
}

fn run_simulation(
    cfg: &PipelineConfig,
    sc: &Scenario,
    curves: &CurveSet,
    source: &str,
    out: &Path,
) -> Result<SimulationReport> {
    let report = netsim::simulate(sc, curves)?;
    write_text(&out.join("simulation_results.csv"), &report.results_csv()?)?;
    write_json(
        &out.join("simulation_aggregates.json"),
        &SimulationSummary {
            scenario: &report.scenario,
            curves: source,
            report_period_s: report.report_period_s,
            aggregates: &report.aggregates,
        },
    )?;
    let mut energy = String::from("xi_pct,strategy,class,mean_energy_j\n");
    let mut error = String::from("xi_pct,strategy,class,mean_distortion_pct,max_distortion_pct\n");
    for a in &report.aggregates {
        let class = class_stem(a.class);
        let _ = writeln!(
            energy,
            "{},{},{class},{}",
            a.xi_pct, a.strategy, a.mean_energy
        );
        let _ = writeln!(
            error,
            "{},{},{class},{},{}",
            a.xi_pct, a.strategy, a.mean_distortion_pct, a.max_distortion_pct
        );
    }
    write_text(&out.join("energy_vs_xi.csv"), &energy)?;
    write_text(&out.join("error_vs_xi.csv"), &error)?;
    write_run(out, "simulate", cfg, &report.aggregates)?;
    Ok(report)
}

/// Synthetic corpus to energy report in one go: ingest, both rate-distortion
/// sweeps, features, selection, the classifier by feature-set accuracy
/// table, a PCA scatter and the default simulation driven by the measured
/// DCT curves.
pub fn cmd_pipeline(cfg: &PipelineConfig, out: &Path) -> Result<()> {
    cfg.validate()?;
    ensure_dir(out)?;
    cmd_ingest(cfg, &[], out)?;
    cmd_rd(cfg, out, Algorithm::Ltc, out)?;
    let mut dct_curves = cmd_rd(cfg, out, Algorithm::Dct, out)?;
    dct_curves.retain(|c| c.class_label.is_some());
    let m = cmd_features(cfg, out, out)?;
    let selection = cmd_select(cfg, out, out)?;
    let sel_path = out.join("selection.json");

    let mut variants = vec![FeatureSet::All, FeatureSet::Selected];
    variants.extend((1..=m.n_cols().min(10)).map(FeatureSet::Pca));
    let mut table = String::from("classifier,features,n_features,accuracy\n");
    for kind in [ClassifierKind::Svm, ClassifierKind::Ffnn] {
        for &fs in &variants {
            let r = evaluate(cfg, &m, kind, fs, Some(&selection))?;
            let _ = writeln!(
                table,
                "{kind},{fs},{},{}",
                r.feature_names.len(),
                r.accuracy
            );
        }
        cmd_train_eval(cfg, out, kind, FeatureSet::Selected, Some(&sel_path), out)?;
    }
    write_text(&out.join("accuracy.csv"), &table)?;

    if m.n_cols() >= 2 {
        let p = pca_fit(&m, 2)?;
        let mut scatter = String::from("pc1,pc2,label\n");
        for (s, l) in pca_transform(&p, &m)?.iter().zip(m.labels()) {
            let _ = writeln!(scatter, "{},{},{l}", s[0], s[1]);
        }
        write_text(&out.join("pca_scatter.csv"), &scatter)?;
    }

    let curves = CurveSet::new(dct_curves, &cfg.eps_grid)?;
    run_simulation(
        cfg,
        &default_scenario(cfg),
        &curves,
        "rd_dct curves of this run",
        out,
    )?;
    write_run(out, "pipeline", cfg, &Strategy::ALL)?;
    Ok(())
}
