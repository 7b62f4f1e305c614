//! Compress one synthetic window with both algorithms at a few budgets and
//! print model size, rate and measured distortion.

use rdclass::compression::{distortion, model_bits, rate, Algorithm, CompressedModel, ErrorBudget};
use rdclass::timeseries::gen_synthetic;
use rdclass::{SampleEncoding, SignalClass};

fn main() -> rdclass::Result<()> {
    let enc = SampleEncoding::new(16)?;
    let w = gen_synthetic(SignalClass::QuasiPeriodic, 500, 1)?;
    println!(
        "window {} ({} samples, range {:.3})",
        w.source_id(),
        w.len(),
        w.range()
    );
    println!(
        "{:>4} {:>6} {:>8} {:>7} {:>11}",
        "alg", "eps%", "bits", "rate", "distortion%"
    );
    for alg in [Algorithm::Ltc, Algorithm::Dct] {
        for eps in [0.5, 2.0, 5.0, 10.0] {
            let m = CompressedModel::compress(alg, &w, ErrorBudget::new(eps)?);
            let r = rate(&m, enc);
            let bits = model_bits(&m, enc);
            let d = distortion(w.samples(), &m.reconstruct()?)?;
            println!("{alg:>4} {eps:>6.1} {:>8} {:>7.4} {d:>11.3}", bits, r.rate);
        }
    }
    Ok(())
}
