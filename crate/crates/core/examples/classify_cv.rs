//! Cross-validated accuracy of the one-vs-one SVM and the FFNN, then a
//! model trained on everything, saved and reloaded.

use rdclass::classify::{
    cross_validate, stratified_folds, Predict, SavedModel, Trainer, TrainerSpec,
};
use rdclass::features::{build_matrix, normalize};
use rdclass::timeseries::gen_synthetic;
use rdclass::SignalClass;

fn main() -> rdclass::Result<()> {
    let windows = SignalClass::ALL
        .iter()
        .flat_map(|&c| (0..40).map(move |i| gen_synthetic(c, 500, 1000 + i)))
        .collect::<rdclass::Result<Vec<_>>>()?;
    let labels: Vec<SignalClass> = windows.iter().filter_map(|w| w.class_label()).collect();
    let m = normalize(&build_matrix(&windows, &labels)?)?;

    let folds = stratified_folds(m.labels(), 10, 0)?;
    println!(
        "fold sizes: {:?}",
        (0..10)
            .map(|f| folds.test_indices(f).len())
            .collect::<Vec<_>>()
    );

    for spec in [TrainerSpec::svm(), TrainerSpec::ffnn(0)] {
        let acc = cross_validate(&spec, m.rows(), m.labels(), 10, 0)?;
        println!("{spec:?}: 10-fold accuracy {acc:.3}");
    }

    let model = TrainerSpec::svm().train(m.rows(), m.labels())?;
    let path = std::env::temp_dir().join("rdclass_example_model.json");
    SavedModel::new(m.feature_names().to_vec(), model).save(&path)?;
    let loaded = SavedModel::load(&path)?;
    println!(
        "reloaded model from {}: training accuracy {:.3}",
        path.display(),
        loaded.classifier.accuracy(m.rows(), m.labels())
    );
    Ok(())
}
