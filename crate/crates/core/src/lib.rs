//! Rate-distortion profiling of sensor time series.
//!
//! The crate covers the whole chain from raw samples to network energy:
//!
//! - [`timeseries`]: windows, CSV ingestion and synthetic class generators
//! - [`compression`]: LTC and DCT lossy compressors, rate/distortion metrics,
//!   rate-distortion sweeps and class-average curves
//! - [`features`]: a fixed 24-feature bank, the signal-feature matrix and the
//!   outlier-robust sigmoidal normalization
//! - [`reduce`]: PCA and greedy forward feature selection
//! - [`classify`]: one-vs-one linear SVM, a single-hidden-layer FFNN and
//!   stratified k-fold cross-validation
//! - [`netsim`]: a single-hop star network energy model comparing
//!   uncompressed, classless and class-aware DCT reporting
//! - [`pipeline`]: the command layer used by the `rdclass` binary
//!
//! Runnable walkthroughs of each capability live in the crate's `examples/`
//! directory.

pub mod classify;
pub mod compression;
pub mod error;
pub mod features;
mod files;
pub mod netsim;
pub mod pipeline;
pub mod reduce;
pub(crate) mod stats;
pub mod timeseries;

pub use error::{Error, Result};
pub use timeseries::{SampleEncoding, SignalClass, TimeSeriesWindow};
