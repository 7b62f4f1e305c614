//! Energy and reconstruction error of a single-hop star of sensor nodes
//! reporting one window per report period to a sink.
//!
//! A node either sends its window raw or sends a prefix of its DCT
//! coefficients whose length is read off a rate-distortion curve at the
//! application tolerance `xi`. The classless strategy uses the average of
//! the per-class curves; the class-aware strategy uses the curve of the
//! class the node was assigned to. Medium access is reduced to per-packet
//! header overhead and an optional retransmission multiplier.

mod sim;
pub(crate) use sim::mix;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::compression::{
    average_curve, class_curves, dct_compress_rate, dct_reconstruct, distortion,
    min_rate_for_tolerance, model_bits_dct, Algorithm, ErrorBudget, RdCurve,
};
use crate::error::{Error, Result};
use crate::timeseries::{
    gen_synthetic_with, raw_bits, GeneratorConfig, SampleEncoding, SignalClass, TimeSeriesWindow,
};

pub use sim::{aggregate, simulate, Aggregate, Scenario, SimulationReport, WindowSource};

/// Radio and processing costs. Defaults are nominal values that only fix
/// the relative cost of sending a bit and of transforming a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyConfig {
    /// Joules per transmitted bit, headers included.
    pub e_tx_per_bit: f64,
    /// Joules per `N log2 N` unit of transform work.
    pub comp_c0: f64,
    /// Joules per sample of linear work.
    pub comp_c1: f64,
    pub header_bytes_per_packet: u32,
    pub max_payload_bytes: u32,
    pub bits_per_sample: u32,
    pub sampling_interval_s: f64,
    /// Expected transmissions per packet; 1.0 means no retransmissions.
    pub retransmission_multiplier: f64,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        EnergyConfig {
            e_tx_per_bit: 2.3e-7,
            comp_c0: 1e-9,
            comp_c1: 5e-9,
            header_bytes_per_packet: 13,
            max_payload_bytes: 114,
            bits_per_sample: 16,
            sampling_interval_s: 10.0,
            retransmission_multiplier: 1.0,
        }
    }
}

impl EnergyConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("e_tx_per_bit", self.e_tx_per_bit),
            ("comp_c0", self.comp_c0),
            ("comp_c1", self.comp_c1),
            ("sampling_interval_s", self.sampling_interval_s),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.retransmission_multiplier >= 1.0 && self.retransmission_multiplier.is_finite()) {
            return Err(Error::invalid(format!(
                "retransmission_multiplier must be at least 1, got {}",
                self.retransmission_multiplier
            )));
        }
        if self.header_bytes_per_packet == 0 || self.max_payload_bytes == 0 {
            return Err(Error::invalid(
                "packet header and payload sizes must be positive",
            ));
        }
        self.encoding().map(|_| ())
    }

    pub fn encoding(&self) -> Result<SampleEncoding> {
        SampleEncoding::new(self.bits_per_sample)
    }

    /// Time to collect one window of `n` samples.
    pub fn report_period_s(&self, n: usize) -> f64 {
        n as f64 * self.sampling_interval_s
    }

    /// Energy to transform and truncate one window of `n` samples.
    pub fn compression_energy(&self, n: usize) -> f64 {
        let n = n as f64;
        self.comp_c0 * n * n.log2() + self.comp_c1 * n
    }

    pub fn transmission_energy(&self, total_bits: u64) -> f64 {
        total_bits as f64 * self.e_tx_per_bit * self.retransmission_multiplier
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Packets {
    pub packets: u64,
    /// Payload plus headers.
    pub total_bits: u64,
}

/// Split a payload into packets of at most `max_payload_bytes` and add one
/// header per packet.
pub fn packetize(payload_bits: u64, cfg: &EnergyConfig) -> Packets {
    let per_packet = 8 * u64::from(cfg.max_payload_bytes);
    let packets = payload_bits.div_ceil(per_packet);
    Packets {
        packets,
        total_bits: payload_bits + packets * 8 * u64::from(cfg.header_bytes_per_packet),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    NoCompression,
    DctCl,
    DctCa,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::NoCompression, Strategy::DctCl, Strategy::DctCa];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::NoCompression => "no-compression",
            Strategy::DctCl => "dct-cl",
            Strategy::DctCa => "dct-ca",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown strategy `{s}`")))
    }
}

/// One sensor node. `assigned_class` is what the classifier said, which
/// may differ from `true_class` to model misclassification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub node_id: String,
    pub true_class: SignalClass,
    pub assigned_class: SignalClass,
    pub source: WindowSource,
}

impl NodeSpec {
    /// Correctly classified node fed by the synthetic generator.
    pub fn synthetic(node_id: impl Into<String>, class: SignalClass, seed: u64) -> Self {
        NodeSpec {
            node_id: node_id.into(),
            true_class: class,
            assigned_class: class,
            source: WindowSource::Synthetic { seed },
        }
    }
}

const TRAINING_STREAM: u64 = 0x7261_696E;

/// DCT rate-distortion curves per class plus their equal-weight average.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSet {
    pub per_class: BTreeMap<SignalClass, RdCurve>,
    pub classless: RdCurve,
}

impl CurveSet {
    /// The classless curve is the pointwise mean of the class curves on
    /// `grid`, each class weighted equally.
    pub fn new(class_curves: Vec<RdCurve>, grid: &[f64]) -> Result<CurveSet> {
        let mut per_class = BTreeMap::new();
        for c in class_curves {
            if c.algorithm != Algorithm::Dct {
                return Err(Error::invalid("the simulator only uses DCT curves"));
            }
            let class = c
                .class_label
                .ok_or_else(|| Error::invalid("per-class curve has no class label"))?;
            if per_class.insert(class, c).is_some() {
                return Err(Error::invalid(format!("two curves for class {class}")));
            }
        }
        let all: Vec<RdCurve> = per_class.values().cloned().collect();
        let classless = average_curve(&all, grid)?;
        Ok(CurveSet {
            per_class,
            classless,
        })
    }

    /// Measure DCT curves on `per_class` synthetic windows of every class.
    /// Training windows draw their seeds from a stream separate from the
    /// simulated nodes'.
    pub fn from_synthetic(
        generator: &GeneratorConfig,
        window_len: usize,
        per_class: usize,
        eps_grid_pct: &[f64],
        enc: SampleEncoding,
        seed: u64,
    ) -> Result<CurveSet> {
        if per_class == 0 {
            return Err(Error::invalid(
                "training corpus needs at least one window per class",
            ));
        }
        let windows = SignalClass::ALL
            .iter()
            .flat_map(|&c| (0..per_class).map(move |i| (c, i)))
            .map(|(c, i)| {
                let s = sim::mix(&[seed, TRAINING_STREAM, c.index() as u64, i as u64]);
                gen_synthetic_with(generator, c, window_len, s)
            })
            .collect::<Result<Vec<_>>>()?;
        let budgets = ErrorBudget::grid(eps_grid_pct)?;
        let curves = class_curves(&windows, Algorithm::Dct, &budgets, enc)?;
        CurveSet::new(curves, eps_grid_pct)
    }

    pub fn for_class(&self, class: SignalClass) -> Result<&RdCurve> {
        self.per_class
            .get(&class)
            .ok_or_else(|| Error::invalid(format!("no rate-distortion curve for class {class}")))
    }
}

/// What one node spent and how well the sink can rebuild its window in one
/// report period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportPeriodResult {
    pub node_id: String,
    pub true_class: SignalClass,
    pub assigned_class: SignalClass,
    pub strategy: Strategy,
    pub xi_pct: f64,
    /// Retained DCT coefficients; `None` when the window went out raw.
    pub coefficients: Option<usize>,
    pub payload_bits: u64,
    /// Payload plus packet headers.
    pub bits_sent: u64,
    pub packets: u64,
    pub energy_tx: f64,
    pub energy_comp: f64,
    pub measured_distortion_pct: f64,
}

impl ReportPeriodResult {
    pub fn energy_total(&self) -> f64 {
        self.energy_tx + self.energy_comp
    }
}

/// Send one window under `strategy` at tolerance `xi_pct`.
///
/// When the curve asks for the full raw rate, the DCT strategies send the
/// window uncompressed and spend no compression energy.
pub fn run_period(
    node: &NodeSpec,
    window: &TimeSeriesWindow,
    strategy: Strategy,
    xi_pct: f64,
    curves: &CurveSet,
    cfg: &EnergyConfig,
) -> Result<ReportPeriodResult> {
    let enc = cfg.encoding()?;
    let n = window.len();
    let raw = raw_bits(window, enc);
    let curve = match strategy {
        Strategy::NoCompression => None,
        Strategy::DctCl => Some(&curves.classless),
        Strategy::DctCa => Some(curves.for_class(node.assigned_class)?),
    };
    let mut coefficients = None;
    let mut payload_bits = raw;
    let mut energy_comp = 0.0;
    let mut measured = 0.0;
    if let Some(curve) = curve {
        if curve.window_len != n || curve.encoding != enc {
            return Err(Error::invalid(format!(
                "curve was built for {} samples at {} bits, node sends {n} at {}",
                curve.window_len,
                curve.encoding.bits_per_sample(),
                enc.bits_per_sample()
            )));
        }
        let lookup = min_rate_for_tolerance(curve, xi_pct);
        if lookup.rate < 1.0 {
            let model = dct_compress_rate(window, lookup.k_equiv)?;
            let bits = model_bits_dct(&model, enc);
            if bits < raw {
                measured = distortion(window.samples(), &dct_reconstruct(&model)?)?;
                payload_bits = bits;
                energy_comp = cfg.compression_energy(n);
                coefficients = Some(lookup.k_equiv);
            }
        }
    }
    let p = packetize(payload_bits, cfg);
    Ok(ReportPeriodResult {
        node_id: node.node_id.clone(),
        true_class: node.true_class,
        assigned_class: node.assigned_class,
        strategy,
        xi_pct,
        coefficients,
        payload_bits,
        bits_sent: p.total_bits,
        packets: p.packets,
        energy_tx: cfg.transmission_energy(p.total_bits),
        energy_comp,
        measured_distortion_pct: measured,
    })
}

/// Where a scenario's CSV sources are resolved from.
pub(crate) fn resolve(base: Option<&std::path::Path>, path: &std::path::Path) -> PathBuf {
    match base {
        Some(b) if path.is_relative() => b.join(path),
        _ => path.to_owned(),
    }
}
