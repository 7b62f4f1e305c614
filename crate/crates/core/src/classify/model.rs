//! Classifier choice, trained models and their JSON form.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Ffnn, FfnnParams, OvoSvm, Predict, Trainer, DEFAULT_C};
use crate::error::{Error, Result};
use crate::features::BANK_VERSION;
use crate::files::{read_json, write_json};
use crate::timeseries::SignalClass;

/// A classifier family with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TrainerSpec {
    Svm { c: f64 },
    Ffnn(FfnnParams),
}

impl TrainerSpec {
    pub fn svm() -> Self {
        TrainerSpec::Svm { c: DEFAULT_C }
    }

    pub fn ffnn(seed: u64) -> Self {
        TrainerSpec::Ffnn(FfnnParams {
            seed,
            ..FfnnParams::default()
        })
    }
}

impl Trainer for TrainerSpec {
    type Model = ClassifierModel;

    fn train(&self, x: &[Vec<f64>], labels: &[SignalClass]) -> Result<ClassifierModel> {
        match *self {
            TrainerSpec::Svm { c } => OvoSvm::train(x, labels, c).map(ClassifierModel::Svm),
            TrainerSpec::Ffnn(p) => Ffnn::train(x, labels, p).map(ClassifierModel::Ffnn),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "model", rename_all = "lowercase")]
pub enum ClassifierModel {
    Svm(OvoSvm),
    Ffnn(Ffnn),
}

impl Predict for ClassifierModel {
    fn predict(&self, x: &[f64]) -> SignalClass {
        match self {
            ClassifierModel::Svm(m) => m.predict(x),
            ClassifierModel::Ffnn(m) => m.predict(x),
        }
    }
}

/// A trained model together with the feature columns it expects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedModel {
    pub bank_version: String,
    pub feature_names: Vec<String>,
    pub classifier: ClassifierModel,
}

impl SavedModel {
    pub fn new(feature_names: Vec<String>, classifier: ClassifierModel) -> Self {
        SavedModel {
            bank_version: BANK_VERSION.to_owned(),
            feature_names,
            classifier,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn load(path: &Path) -> Result<SavedModel> {
        let m: SavedModel = read_json(path)?;
        if m.bank_version != BANK_VERSION {
            return Err(Error::Parse {
                path: path.to_owned(),
                message: format!(
                    "model was trained on feature bank {}, this build uses {BANK_VERSION}",
                    m.bank_version
                ),
            });
        }
        Ok(m)
    }
}

impl Predict for SavedModel {
    fn predict(&self, x: &[f64]) -> SignalClass {
        self.classifier.predict(x)
    }
}
