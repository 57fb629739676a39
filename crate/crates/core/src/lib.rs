//! Nested dichotomies for multiclass classification.
//!
//! A nested dichotomy recursively splits the class set in two and trains a
//! binary logistic model at every split; class probabilities are products of
//! branch probabilities. At each node several candidate splits can be drawn
//! and the one with the lowest training RMSE kept. The crate also counts the
//! distinct trees each selection strategy admits and models the expected
//! error of the best of several candidates.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common choices.

// Negated comparisons are how validation rejects NaN along with bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod data;
pub mod dichotomy;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod learner;
pub mod model;
pub mod persist;
pub mod scalar;
pub mod seed;

pub use data::{load_dataset, load_path, Attribute, AttributeKind, ClassSelector, Dataset, Format, Schema, Value};
pub use dichotomy::{build_nd, build_tree, select_split, ClassSet, ClassSplit, SplitterSpec, Strategy};
pub use ensemble::{EnsembleMethod, EnsembleSpec};
pub use error::{Error, Result};
pub use eval::{accuracy, argmax, cross_validate, rmse, CvReport, PredictionBatch};
pub use learner::{train_binary, BinaryLearnerConfig, Side};
pub use model::{ModelSpec, TrainedModel};
pub use persist::{load_model, save_model, ModelFile};
pub use scalar::Scalar;

pub type NestedDichotomy = dichotomy::NestedDichotomy<f64>;
pub type Tree = dichotomy::Tree<f64>;
pub type EnsembleModel = ensemble::EnsembleModel<f64>;
pub type Model = model::TrainedModel<f64>;
pub type EncodedDataset = data::EncodedDataset<f64>;
pub type BinaryModel = learner::BinaryModel<f64>;

pub type NestedDichotomyF32 = dichotomy::NestedDichotomy<f32>;
pub type TreeF32 = dichotomy::Tree<f32>;
pub type EnsembleModelF32 = ensemble::EnsembleModel<f32>;
pub type ModelF32 = model::TrainedModel<f32>;
pub type EncodedDatasetF32 = data::EncodedDataset<f32>;
pub type BinaryModelF32 = learner::BinaryModel<f32>;
