//! Greedy forward selection and PCA on a normalized synthetic feature matrix.

use rdclass::features::{build_matrix, normalize};
use rdclass::reduce::{greedy_select, pca_fit, pca_transform};
use rdclass::timeseries::gen_synthetic;
use rdclass::SignalClass;

fn main() -> rdclass::Result<()> {
    let windows = SignalClass::ALL
        .iter()
        .flat_map(|&c| (0..30).map(move |i| gen_synthetic(c, 500, i)))
        .collect::<rdclass::Result<Vec<_>>>()?;
    let labels: Vec<SignalClass> = windows.iter().filter_map(|w| w.class_label()).collect();
    let m = normalize(&build_matrix(&windows, &labels)?)?;

    let sel = greedy_select(&m, 5, 5, 0)?;
    for (name, acc) in sel.selected_names.iter().zip(&sel.accuracy_trajectory) {
        println!("+ {name:<28} cv accuracy {acc:.3}");
    }

    let pca = pca_fit(&m, 3)?;
    let total: f64 = (0..m.n_cols())
        .map(|j| {
            let col = m.column(j);
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (col.len() - 1) as f64
        })
        .sum();
    for (i, ev) in pca.explained_variance.iter().enumerate() {
        println!(
            "pc{} explains {:.1}% of the variance",
            i + 1,
            100.0 * ev / total
        );
    }
    let scores = pca_transform(&pca, &m)?;
    for c in SignalClass::ALL {
        let rows: Vec<&Vec<f64>> = scores
            .iter()
            .zip(m.labels())
            .filter(|(_, &l)| l == c)
            .map(|(s, _)| s)
            .collect();
        let centroid: Vec<f64> = (0..3)
            .map(|k| rows.iter().map(|r| r[k]).sum::<f64>() / rows.len() as f64)
            .collect();
        println!("{:<15} centroid {centroid:.3?}", c.name());
    }
    Ok(())
}
