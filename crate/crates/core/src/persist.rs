//! JSON model files.
//!
//! Floats are written in their shortest round-trip form and parsed back
//! exactly, so a loaded model predicts bit-for-bit like the saved one.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{Attribute, Encoder, Schema};
use crate::dichotomy::{NestedDichotomy, Tree};
use crate::ensemble::{EnsembleMethod, EnsembleModel, Member};
use crate::error::{Error, Result};
use crate::model::{ModelSpec, TrainedModel};
use crate::scalar::Scalar;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaSection<T> {
    pub attributes: Vec<Attribute>,
    pub class_attribute: String,
    pub classes: Vec<String>,
    pub encoding: Encoder<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelPayload<T> {
    Single { tree: Tree<T> },
    Bagging { members: Vec<Tree<T>>, weights: Vec<T> },
    AdaBoost { members: Vec<Tree<T>>, weights: Vec<T> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub spec: ModelSpec,
    pub seed: u64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile<T> {
    pub format_version: u32,
    pub schema: SchemaSection<T>,
    pub model: ModelPayload<T>,
    pub provenance: Provenance,
}

impl<T: Scalar> ModelFile<T> {
    pub fn new(model: &TrainedModel<T>, schema: &Schema, spec: &ModelSpec) -> Self {
        let payload = match model {
            TrainedModel::Single(nd) => ModelPayload::Single { tree: nd.tree.clone() },
            TrainedModel::Ensemble(e) => {
                let members = e.members.iter().map(|m| m.tree.clone()).collect();
                let weights = e.members.iter().map(|m| m.weight).collect();
                match e.method {
                    EnsembleMethod::Bagging => ModelPayload::Bagging { members, weights },
                    EnsembleMethod::AdaBoost => ModelPayload::AdaBoost { members, weights },
                }
            }
        };
        ModelFile {
            format_version: FORMAT_VERSION,
            schema: SchemaSection {
                attributes: schema.attributes.clone(),
                class_attribute: schema.class_attribute.clone(),
                classes: schema.classes.clone(),
                encoding: model.encoder().clone(),
            },
            model: payload,
            provenance: Provenance {
                spec: *spec,
                seed: spec.seed(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
        }
    }

    pub fn schema(&self) -> Schema {
        Schema {
            attributes: self.schema.attributes.clone(),
            class_attribute: self.schema.class_attribute.clone(),
            classes: self.schema.classes.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Invariant(format!("cannot serialize model: {e}")))
    }

    /// Parses and validates a document. The version is checked before the
    /// rest of the structure so that newer files fail with a clear message.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::data(format!("invalid model file: {e}")))?;
        match value.get("format_version").and_then(serde_json::Value::as_u64) {
            Some(v) if v == u64::from(FORMAT_VERSION) => {}
            Some(v) => {
                return Err(Error::data(format!(
                    "unsupported model format_version {v} (expected {FORMAT_VERSION})"
                )))
            }
            None => return Err(Error::data("model file has no format_version")),
        }
        let file: ModelFile<T> =
            serde_json::from_value(value).map_err(|e| Error::data(format!("invalid model file: {e}")))?;
        file.validate()?;
        Ok(file)
    }

    fn validate(&self) -> Result<()> {
        let n_classes = self.schema.classes.len();
        let width = self.schema.encoding.width();
        if self.schema.encoding.attributes.len() != self.schema.attributes.len() {
            return Err(Error::data("encoding does not match the attribute list"));
        }
        let trees: Vec<&Tree<T>> = match &self.model {
            ModelPayload::Single { tree } => vec![tree],
            ModelPayload::Bagging { members, weights } | ModelPayload::AdaBoost { members, weights } => {
                if members.is_empty() || members.len() != weights.len() {
                    return Err(Error::data(format!(
                        "ensemble has {} members and {} weights",
                        members.len(),
                        weights.len()
                    )));
                }
                members.iter().collect()
            }
        };
        for tree in trees {
            if tree.n_classes != n_classes || tree.width != width {
                return Err(Error::data("tree does not match the schema"));
            }
            tree.validate().map_err(|e| Error::data(format!("invalid tree: {e}")))?;
        }
        Ok(())
    }

    pub fn into_model(self) -> TrainedModel<T> {
        let encoder = self.schema.encoding;
        let ensemble = |method, members: Vec<Tree<T>>, weights: Vec<T>| {
            TrainedModel::Ensemble(EnsembleModel {
                method,
                encoder: encoder.clone(),
                members: members
                    .into_iter()
                    .zip(weights)
                    .map(|(tree, weight)| Member { tree, weight })
                    .collect(),
            })
        };
        match self.model {
            ModelPayload::Single { tree } => TrainedModel::Single(NestedDichotomy {
                encoder: encoder.clone(),
                tree,
            }),
            ModelPayload::Bagging { members, weights } => ensemble(EnsembleMethod::Bagging, members, weights),
            ModelPayload::AdaBoost { members, weights } => ensemble(EnsembleMethod::AdaBoost, members, weights),
        }
    }
}

pub fn save_model<T: Scalar>(path: &Path, model: &TrainedModel<T>, schema: &Schema, spec: &ModelSpec) -> Result<()> {
    let mut text = ModelFile::new(model, schema, spec).to_json()?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Returns the model together with the schema it was trained on.
pub fn load_model<T: Scalar>(path: &Path) -> Result<(TrainedModel<T>, Schema)> {
    let file = ModelFile::<T>::from_json(&fs::read_to_string(path)?)?;
    let schema = file.schema();
    Ok((file.into_model(), schema))
}
