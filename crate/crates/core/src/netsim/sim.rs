use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{resolve, run_period, CurveSet, EnergyConfig, NodeSpec, ReportPeriodResult, Strategy};
use crate::compression::DEFAULT_EPS_GRID_PCT;
use crate::error::{Error, Result};
use crate::files::read_json;
use crate::timeseries::{
    gen_synthetic_with, load_csv, GeneratorConfig, SignalClass, TimeSeriesWindow,
};

/// Where a node's windows come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum WindowSource {
    /// Fresh generator output of the node's true class every period.
    Synthetic { seed: u64 },
    /// Consecutive windows of a CSV file, wrapping around; relative paths
    /// resolve against the scenario file's directory.
    Csv { path: PathBuf },
}

/// A simulation run: nodes, strategies, tolerances and costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub seed: u64,
    pub window_len: usize,
    pub xi_grid: Vec<f64>,
    pub strategies: Vec<Strategy>,
    pub nodes: Vec<NodeSpec>,
    pub energy: EnergyConfig,
    pub generator: GeneratorConfig,
    /// Directory holding `dct_<class>` curve files. When absent the curves
    /// are measured on a synthetic training corpus.
    pub curves_dir: Option<PathBuf>,
    /// Windows per class in that training corpus.
    pub training_windows_per_class: usize,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            seed: 0,
            window_len: 500,
            xi_grid: DEFAULT_EPS_GRID_PCT.to_vec(),
            strategies: Strategy::ALL.to_vec(),
            nodes: Vec::new(),
            energy: EnergyConfig::default(),
            generator: GeneratorConfig::default(),
            curves_dir: None,
            training_windows_per_class: 100,
            base_dir: None,
        }
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario> {
        let mut s: Scenario = read_json(path)?;
        s.base_dir = path.parent().map(Path::to_owned);
        s.validate()?;
        Ok(s)
    }

    /// `per_class` synthetic nodes of every class, correctly classified.
    pub fn with_synthetic_nodes(mut self, per_class: usize) -> Self {
        self.nodes = SignalClass::ALL
            .iter()
            .flat_map(|&c| {
                (0..per_class).map(move |i| {
                    NodeSpec::synthetic(format!("{c}-{i}"), c, (c.index() * per_class + i) as u64)
                })
            })
            .collect();
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.energy.validate()?;
        self.generator.validate()?;
        if self.nodes.is_empty() || self.strategies.is_empty() || self.xi_grid.is_empty() {
            return Err(Error::invalid(
                "scenario needs nodes, strategies and tolerances",
            ));
        }
        if self.xi_grid.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::invalid("tolerances must be finite and non-negative"));
        }
        if self.window_len < 2 {
            return Err(Error::invalid("window length must be at least 2"));
        }
        Ok(())
    }

    pub fn resolve_path(&self, path: &Path) -> PathBuf {
        resolve(self.base_dir.as_deref(), path)
    }
}

/// Mean cost and error of one strategy at one tolerance, over all nodes
/// (`class` is `None`) or over the nodes of one true class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub strategy: Strategy,
    pub class: Option<SignalClass>,
    pub xi_pct: f64,
    pub nodes: usize,
    pub mean_energy: f64,
    pub mean_energy_tx: f64,
    pub mean_energy_comp: f64,
    pub mean_bits_sent: f64,
    pub mean_distortion_pct: f64,
    pub max_distortion_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub scenario: Scenario,
    pub report_period_s: f64,
    pub results: Vec<ReportPeriodResult>,
    pub aggregates: Vec<Aggregate>,
}

impl SimulationReport {
    pub fn aggregate_for(
        &self,
        strategy: Strategy,
        class: Option<SignalClass>,
        xi_pct: f64,
    ) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.strategy == strategy && a.class == class && a.xi_pct == xi_pct)
    }

    /// One CSV row per node, strategy and tolerance.
    pub fn results_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.results {
            w.serialize(r)
                .map_err(|e| Error::Computation(format!("CSV encoding failed: {e}")))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Computation(format!("CSV encoding failed: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Computation(e.to_string()))
    }
}

/// Run every node under every strategy at every tolerance.
///
/// Each (node, tolerance) pair gets its own window, derived from the
/// scenario seed, and all strategies see that same window. Results come
/// back in node, strategy, tolerance order regardless of scheduling.
pub fn simulate(scenario: &Scenario, curves: &CurveSet) -> Result<SimulationReport> {
    scenario.validate()?;
    let csv_windows: Vec<Option<Vec<TimeSeriesWindow>>> = scenario
        .nodes
        .iter()
        .map(|node| match &node.source {
            WindowSource::Synthetic { .. } => Ok(None),
            WindowSource::Csv { path } => {
                load_csv(scenario.resolve_path(path), scenario.window_len).map(|r| Some(r.windows))
            }
        })
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> = (0..scenario.nodes.len())
        .flat_map(|n| (0..scenario.xi_grid.len()).map(move |x| (n, x)))
        .collect();
    let per_job: Vec<Result<Vec<ReportPeriodResult>>> = jobs
        .par_iter()
        .map(|&(n, x)| {
            let node = &scenario.nodes[n];
            let window = match (&node.source, &csv_windows[n]) {
                (WindowSource::Synthetic { seed }, _) => gen_synthetic_with(
                    &scenario.generator,
                    node.true_class,
                    scenario.window_len,
                    mix(&[scenario.seed, *seed, x as u64]),
                )?,
                (_, Some(ws)) => ws[x % ws.len()].clone(),
                (_, None) => unreachable!("CSV windows are loaded up front"),
            };
            scenario
                .strategies
                .iter()
                .map(|&s| {
                    run_period(
                        node,
                        &window,
                        s,
                        scenario.xi_grid[x],
                        curves,
                        &scenario.energy,
                    )
                })
                .collect()
        })
        .collect();

    let mut by_job = Vec::with_capacity(per_job.len());
    for r in per_job {
        by_job.push(r?);
    }
    let (n_xi, n_strat) = (scenario.xi_grid.len(), scenario.strategies.len());
    let mut results = Vec::with_capacity(by_job.len() * n_strat);
    for node_jobs in by_job.chunks(n_xi) {
        for s in 0..n_strat {
            results.extend(node_jobs.iter().map(|job| job[s].clone()));
        }
    }
    let aggregates = aggregate(&results, &scenario.strategies, &scenario.xi_grid);
    Ok(SimulationReport {
        scenario: scenario.clone(),
        report_period_s: scenario.energy.report_period_s(scenario.window_len),
        results,
        aggregates,
    })
}

/// Per strategy and tolerance: one row over all nodes, then one per true
/// class present. Sums run in result order.
pub fn aggregate(
    results: &[ReportPeriodResult],
    strategies: &[Strategy],
    xi_grid: &[f64],
) -> Vec<Aggregate> {
    let mut out = Vec::new();
    for &strategy in strategies {
        for &xi in xi_grid {
            let groups = std::iter::once(None).chain(SignalClass::ALL.into_iter().map(Some));
            for class in groups {
                let rows: Vec<&ReportPeriodResult> = results
                    .iter()
                    .filter(|r| {
                        r.strategy == strategy
                            && r.xi_pct == xi
                            && class.is_none_or(|c| r.true_class == c)
                    })
                    .collect();
                if rows.is_empty() {
                    continue;
                }
                let n = rows.len() as f64;
                let mean = |f: &dyn Fn(&ReportPeriodResult) -> f64| {
                    rows.iter().map(|r| f(r)).sum::<f64>() / n
                };
                out.push(Aggregate {
                    strategy,
                    class,
                    xi_pct: xi,
                    nodes: rows.len(),
                    mean_energy: mean(&|r| r.energy_total()),
                    mean_energy_tx: mean(&|r| r.energy_tx),
                    mean_energy_comp: mean(&|r| r.energy_comp),
                    mean_bits_sent: mean(&|r| r.bits_sent as f64),
                    mean_distortion_pct: mean(&|r| r.measured_distortion_pct),
                    max_distortion_pct: rows
                        .iter()
                        .map(|r| r.measured_distortion_pct)
                        .fold(0.0, f64::max),
                });
            }
        }
    }
    out
}

/// Order-sensitive combination of seeds (splitmix64 finalizer chained over
/// the parts).
pub(crate) fn mix(parts: &[u64]) -> u64 {
    let mut h: u64 = 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        let mut z = h ^ p.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h = z ^ (z >> 31);
    }
    h
}
