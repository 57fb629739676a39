//! Bagging and AdaBoost.M1 over nested dichotomies.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{bootstrap_indices, Dataset, EncodedDataset, Encoder, Value};
use crate::dichotomy::{build_tree, SplitterSpec, Tree};
use crate::error::{Error, Result};
use crate::eval::argmax;
use crate::learner::BinaryLearnerConfig;
use crate::scalar::Scalar;
use crate::seed;

/// Member weight used when a boosting round makes no training errors.
pub const PERFECT_MEMBER_WEIGHT_ODDS: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleMethod {
    Bagging,
    AdaBoost,
}

impl FromStr for EnsembleMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bagging" => Ok(EnsembleMethod::Bagging),
            "adaboost" => Ok(EnsembleMethod::AdaBoost),
            other => Err(Error::usage(format!("unknown ensemble method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub method: EnsembleMethod,
    pub size: usize,
    pub member_spec: SplitterSpec,
    pub learner: BinaryLearnerConfig,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(method: EnsembleMethod, member_spec: SplitterSpec) -> Self {
        EnsembleSpec {
            method,
            size: 10,
            member_spec,
            learner: BinaryLearnerConfig::default(),
            seed: member_spec.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::usage("ensemble size must be at least 1"));
        }
        self.member_spec.validate()?;
        self.learner.validate()
    }

    fn member_key(&self, t: usize) -> u64 {
        seed::mix(seed::mix(self.seed, seed::MEMBER), t as u64)
    }

    fn member_splitter(&self, key: u64) -> SplitterSpec {
        self.member_spec.with_seed(seed::mix(key, seed::TREE))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member<T> {
    pub tree: Tree<T>,
    pub weight: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel<T> {
    pub method: EnsembleMethod,
    /// Shared encoding, fitted on the full training set.
    pub encoder: Encoder<T>,
    pub members: Vec<Member<T>>,
}

impl<T: Scalar> EnsembleModel<T> {
    pub fn n_classes(&self) -> usize {
        self.members[0].tree.n_classes
    }

    /// Bagging averages member distributions; AdaBoost normalizes the
    /// members' weighted votes for their top class.
    pub fn predict_encoded(&self, row: &[T]) -> Result<Vec<T>> {
        let m = self.n_classes();
        let mut out = vec![T::zero(); m];
        match self.method {
            EnsembleMethod::Bagging => {
                for member in &self.members {
                    for (o, p) in out.iter_mut().zip(member.tree.predict_encoded(row)?) {
                        *o += p;
                    }
                }
                let k = T::from_usize_lossy(self.members.len());
                out.iter_mut().for_each(|o| *o /= k);
            }
            EnsembleMethod::AdaBoost => {
                let mut total = T::zero();
                for member in &self.members {
                    let probs = member.tree.predict_encoded(row)?;
                    out[argmax(&probs)] += member.weight;
                    total += member.weight;
                }
                if total > T::zero() {
                    out.iter_mut().for_each(|o| *o /= total);
                } else {
                    out.iter_mut().for_each(|o| *o = T::one() / T::from_usize_lossy(m));
                }
            }
        }
        Ok(out)
    }

    pub fn predict(&self, instance: &[Value]) -> Result<Vec<T>> {
        self.predict_encoded(&self.encoder.encode_row(instance)?)
    }
}

pub fn ensemble_predict<T: Scalar>(model: &EnsembleModel<T>, instance: &[Value]) -> Result<Vec<T>> {
    model.predict(instance)
}

/// Member `t` is a tree on the bootstrap replicate drawn with seed
/// `mix(member_key(t), BOOTSTRAP)`, i.e. the same rows `bootstrap_sample`
/// would select.
pub fn train_bagging<T: Scalar>(data: &Dataset, spec: &EnsembleSpec) -> Result<EnsembleModel<T>> {
    spec.validate()?;
    let encoder = Encoder::fit(data);
    let encoded = encoder.transform(data)?;
    let members = (0..spec.size)
        .into_par_iter()
        .map(|t| {
            let key = spec.member_key(t);
            let rows = bootstrap_indices(encoded.len(), seed::mix(key, seed::BOOTSTRAP));
            let sample = encoded.resample(&rows);
            let tree = build_tree(&sample, &spec.member_splitter(key), &spec.learner)?;
            Ok(Member { tree, weight: T::one() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleModel {
        method: EnsembleMethod::Bagging,
        encoder,
        members,
    })
}

/// Per-round record of an AdaBoost run.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostRound<T> {
    pub error: T,
    /// Instance weights after the round's update (sum `n`).
    pub weights: Vec<T>,
    pub kept: bool,
}

pub fn train_adaboost<T: Scalar>(data: &Dataset, spec: &EnsembleSpec) -> Result<EnsembleModel<T>> {
    train_adaboost_traced(data, spec).map(|(m, _)| m)
}

/// AdaBoost.M1 by reweighting. Weights start at one per instance and are
/// renormalized to sum `n` after each round.
pub fn train_adaboost_traced<T: Scalar>(
    data: &Dataset,
    spec: &EnsembleSpec,
) -> Result<(EnsembleModel<T>, Vec<BoostRound<T>>)> {
    spec.validate()?;
    let encoder = Encoder::fit(data);
    let encoded: EncodedDataset<T> = encoder.transform(data)?;
    let n = encoded.len();
    let n_t = T::from_usize_lossy(n);
    let mut weights = vec![T::one(); n];
    let mut members = Vec::new();
    let mut rounds = Vec::new();

    for t in 0..spec.size {
        let key = spec.member_key(t);
        let weighted = encoded.with_weights(weights.clone());
        let tree = build_tree(&weighted, &spec.member_splitter(key), &spec.learner)?;
        let correct: Vec<bool> = (0..n)
            .map(|i| {
                tree.predict_encoded(encoded.matrix.row(i))
                    .map(|p| argmax(&p) == encoded.labels[i])
            })
            .collect::<Result<_>>()?;
        let total: T = weights.iter().copied().sum();
        let wrong: T = weights.iter().zip(&correct).filter(|(_, &c)| !c).map(|(&w, _)| w).sum();
        let error = wrong / total;

        if error >= T::lit(0.5) {
            let kept = members.is_empty();
            if kept {
                members.push(Member {
                    tree,
                    weight: T::zero(),
                });
            }
            rounds.push(BoostRound {
                error,
                weights: weights.clone(),
                kept,
            });
            break;
        }
        if error == T::zero() {
            members.push(Member {
                tree,
                weight: T::lit(PERFECT_MEMBER_WEIGHT_ODDS).ln(),
            });
            rounds.push(BoostRound {
                error,
                weights: weights.clone(),
                kept: true,
            });
            break;
        }
        members.push(Member {
            tree,
            weight: ((T::one() - error) / error).ln(),
        });
        let factor = error / (T::one() - error);
        for (w, &c) in weights.iter_mut().zip(&correct) {
            if c {
                *w *= factor;
            }
        }
        let sum: T = weights.iter().copied().sum();
        weights.iter_mut().for_each(|w| *w = *w * n_t / sum);
        rounds.push(BoostRound {
            error,
            weights: weights.clone(),
            kept: true,
        });
    }

    Ok((
        EnsembleModel {
            method: EnsembleMethod::AdaBoost,
            encoder,
            members,
        },
        rounds,
    ))
}

pub fn train_ensemble<T: Scalar>(data: &Dataset, spec: &EnsembleSpec) -> Result<EnsembleModel<T>> {
    match spec.method {
        EnsembleMethod::Bagging => train_bagging(data, spec),
        EnsembleMethod::AdaBoost => train_adaboost(data, spec),
    }
}
