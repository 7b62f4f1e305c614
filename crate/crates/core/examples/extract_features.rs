//! Feature vectors for one window of each class, then the normalized matrix.

use rdclass::features::{build_matrix, extract, normalize, FEATURE_NAMES};
use rdclass::timeseries::gen_synthetic;
use rdclass::SignalClass;

fn main() -> rdclass::Result<()> {
    let windows = SignalClass::ALL
        .iter()
        .map(|&c| gen_synthetic(c, 500, 7))
        .collect::<rdclass::Result<Vec<_>>>()?;

    print!("{:<28}", "feature");
    for c in SignalClass::ALL {
        print!("{:>16}", c.name());
    }
    println!();
    let vectors = windows
        .iter()
        .map(extract)
        .collect::<rdclass::Result<Vec<_>>>()?;
    for (j, name) in FEATURE_NAMES.iter().enumerate() {
        print!("{name:<28}");
        for v in &vectors {
            print!("{:>16.4}", v.values[j]);
        }
        println!();
    }

    // Normalization needs a population, so use a few windows per class.
    let corpus = SignalClass::ALL
        .iter()
        .flat_map(|&c| (0..10).map(move |i| gen_synthetic(c, 500, i)))
        .collect::<rdclass::Result<Vec<_>>>()?;
    let labels: Vec<SignalClass> = corpus.iter().filter_map(|w| w.class_label()).collect();
    let m = normalize(&build_matrix(&corpus, &labels)?)?;
    println!(
        "\nnormalized matrix: {} rows x {} columns, flagged {:?}",
        m.n_rows(),
        m.n_cols(),
        m.sidecar().flagged_columns
    );
    Ok(())
}
