//! A trained classifier bundled with its feature space, standardiser and
//! provenance, stored as versioned JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Algorithm, Hyperparameters, Parameters};
use crate::dataset::{LabeledInstance, Task};
use crate::error::{Error, Result};
use crate::features::{FeatureBlocks, FeatureSpace, FeatureVector, Matrix, Standardizer};
use crate::ingest::NodeRecord;
use crate::vocab::Vocabulary;

pub const MODEL_VERSION: u64 = 1;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelProvenance {
    pub seed: u64,
    /// Identifier of the training data, usually a content hash.
    pub dataset: String,
    pub vocabulary: String,
    /// Training instances per class, in class order.
    pub class_sizes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub version: u64,
    pub algorithm: Algorithm,
    pub hyperparameters: Hyperparameters,
    pub classes: Vec<String>,
    pub feature_space: FeatureSpace,
    pub standardizer: Standardizer,
    pub parameters: Parameters,
    pub provenance: ModelProvenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: String,
    pub class_index: usize,
    pub scores: Vec<f64>,
}

/// Feature space, standardiser and standardised design matrix of a training
/// set.
pub struct Prepared {
    pub space: FeatureSpace,
    pub standardizer: Standardizer,
    pub x: Matrix,
    pub y: Vec<usize>,
}

/// Class index of every instance.
pub fn class_indices(instances: &[LabeledInstance], classes: &[String]) -> Result<Vec<usize>> {
    instances
        .iter()
        .map(|i| {
            classes
                .iter()
                .position(|c| *c == i.label)
                .ok_or_else(|| Error::Invalid(format!("label {:?} not in the class list", i.label)))
        })
        .collect()
}

/// Build the feature space and standardiser on `train` and return its
/// standardised matrix.
pub fn prepare(
    train: &[LabeledInstance],
    classes: &[String],
    vocab: &Vocabulary,
    task: &Task,
    blocks: FeatureBlocks,
) -> Result<Prepared> {
    let space = FeatureSpace::build(train, vocab, task, blocks)?;
    let vectors = space.featurize_all(train, vocab);
    let standardizer = Standardizer::fit(&vectors, space.dim())?;
    let x = standardizer.transform_all(&vectors)?;
    let y = class_indices(train, classes)?;
    Ok(Prepared {
        space,
        standardizer,
        x,
        y,
    })
}

/// Standardised matrix of `instances` under an existing space.
pub fn design_matrix(
    space: &FeatureSpace,
    standardizer: &Standardizer,
    instances: &[LabeledInstance],
    vocab: &Vocabulary,
) -> Result<Matrix> {
    standardizer.transform_all(&space.featurize_all(instances, vocab))
}

impl Model {
    /// Train on labeled instances. `classes` fixes the class order.
    pub fn train(
        train: &[LabeledInstance],
        classes: &[String],
        vocab: &Vocabulary,
        task: &Task,
        hyperparameters: Hyperparameters,
        seed: u64,
        dataset: impl Into<String>,
    ) -> Result<Model> {
        Self::train_with_blocks(train, classes, vocab, task, FeatureBlocks::default(), hyperparameters, seed, dataset)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn train_with_blocks(
        train: &[LabeledInstance],
        classes: &[String],
        vocab: &Vocabulary,
        task: &Task,
        blocks: FeatureBlocks,
        hyperparameters: Hyperparameters,
        seed: u64,
        dataset: impl Into<String>,
    ) -> Result<Model> {
        if classes.is_empty() {
            return Err(Error::Invalid("a model needs at least one class".into()));
        }
        let p = prepare(train, classes, vocab, task, blocks)?;
        let parameters = Parameters::fit(&hyperparameters, &p.x, &p.y, classes.len(), seed)?;
        let mut class_sizes = vec![0; classes.len()];
        for &c in &p.y {
            class_sizes[c] += 1;
        }
        Ok(Model {
            version: MODEL_VERSION,
            algorithm: hyperparameters.algorithm(),
            hyperparameters,
            classes: classes.to_vec(),
            feature_space: p.space,
            standardizer: p.standardizer,
            parameters,
            provenance: ModelProvenance {
                seed,
                dataset: dataset.into(),
                vocabulary: vocab.version().to_string(),
                class_sizes,
            },
        })
    }

    fn check(&self) -> Result<()> {
        if self.classes.is_empty() {
            return Err(Error::Invalid("model has no classes".into()));
        }
        if self.parameters.n_classes() != self.classes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.classes.len(),
                actual: self.parameters.n_classes(),
            });
        }
        if self.standardizer.dim() != self.feature_space.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_space.dim(),
                actual: self.standardizer.dim(),
            });
        }
        if self.parameters.algorithm() != self.algorithm || self.hyperparameters.algorithm() != self.algorithm {
            return Err(Error::Invalid("algorithm tag disagrees with the stored parameters".into()));
        }
        Ok(())
    }

    /// Predict from a raw (unstandardised) feature vector.
    pub fn predict_vector(&self, v: &FeatureVector) -> Result<Prediction> {
        let x = self.standardizer.transform(v)?;
        Ok(self.predict_standardized(&x))
    }

    pub fn predict_standardized(&self, x: &[f64]) -> Prediction {
        let class_index = self.parameters.predict(x);
        let scores = self.parameters.scores(x);
        debug_assert!(class_index < self.classes.len());
        Prediction {
            label: self.classes[class_index].clone(),
            class_index,
            scores,
        }
    }

    pub fn predict_node(&self, node: &NodeRecord, page: &[NodeRecord], vocab: &Vocabulary) -> Result<Prediction> {
        self.predict_vector(&self.feature_space.featurize(node, page, vocab))
    }

    /// Predicted labels for many instances.
    pub fn predict_instances(&self, instances: &[LabeledInstance], vocab: &Vocabulary) -> Result<Vec<String>> {
        let x = design_matrix(&self.feature_space, &self.standardizer, instances, vocab)?;
        Ok(self
            .parameters
            .predict_all(&x)
            .into_iter()
            .map(|c| self.classes[c].clone())
            .collect())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parse a model file. Anything that is not a version-1 model object is
    /// rejected with [`Error::UnknownModelVersion`].
    pub fn from_json(text: &str) -> Result<Model> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|_| Error::UnknownModelVersion)?;
        match value.get("version").and_then(serde_json::Value::as_u64) {
            Some(MODEL_VERSION) => {}
            _ => return Err(Error::UnknownModelVersion),
        }
        let model: Model = serde_json::from_value(value)?;
        model.check()?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Model> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Model::from_json(&text)
    }
}
