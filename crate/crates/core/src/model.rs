//! A single nested dichotomy or an ensemble, behind one interface.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Encoder, Value};
use crate::dichotomy::{build_nd, NestedDichotomy, SplitterSpec};
use crate::ensemble::{train_ensemble, EnsembleModel, EnsembleSpec};
use crate::error::Result;
use crate::learner::BinaryLearnerConfig;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpec {
    Single {
        splitter: SplitterSpec,
        learner: BinaryLearnerConfig,
    },
    Ensemble(EnsembleSpec),
}

impl ModelSpec {
    pub fn single(splitter: SplitterSpec) -> Self {
        ModelSpec::Single {
            splitter,
            learner: BinaryLearnerConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::Single { splitter, learner } => {
                splitter.validate()?;
                learner.validate()
            }
            ModelSpec::Ensemble(e) => e.validate(),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ModelSpec::Single { splitter, .. } => splitter.seed,
            ModelSpec::Ensemble(e) => e.seed,
        }
    }

    /// Same configuration with every seed replaced by `seed`.
    pub fn with_seed(&self, seed: u64) -> Self {
        match *self {
            ModelSpec::Single { splitter, learner } => ModelSpec::Single {
                splitter: splitter.with_seed(seed),
                learner,
            },
            ModelSpec::Ensemble(e) => ModelSpec::Ensemble(EnsembleSpec {
                seed,
                member_spec: e.member_spec.with_seed(seed),
                ..e
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel<T> {
    Single(NestedDichotomy<T>),
    Ensemble(EnsembleModel<T>),
}

impl<T: Scalar> TrainedModel<T> {
    pub fn fit(data: &Dataset, spec: &ModelSpec) -> Result<Self> {
        spec.validate()?;
        Ok(match spec {
            ModelSpec::Single { splitter, learner } => TrainedModel::Single(build_nd(data, splitter, learner)?),
            ModelSpec::Ensemble(e) => TrainedModel::Ensemble(train_ensemble(data, e)?),
        })
    }

    pub fn predict(&self, instance: &[Value]) -> Result<Vec<T>> {
        match self {
            TrainedModel::Single(nd) => nd.predict(instance),
            TrainedModel::Ensemble(e) => e.predict(instance),
        }
    }

    pub fn encoder(&self) -> &Encoder<T> {
        match self {
            TrainedModel::Single(nd) => &nd.encoder,
            TrainedModel::Ensemble(e) => &e.encoder,
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            TrainedModel::Single(nd) => nd.tree.n_classes,
            TrainedModel::Ensemble(e) => e.n_classes(),
        }
    }
}
