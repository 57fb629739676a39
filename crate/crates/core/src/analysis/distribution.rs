//! Empirical distribution of root-split RMSE as the number of evaluated
//! candidates grows, set against the order-statistic prediction.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::order_stat::{expected_min_normal, OrderStatQuery};
use crate::data::{Dataset, Encoder};
use crate::dichotomy::{draw_split, evaluate_split, split_rmse, ClassSet, NodeView, Strategy};
use crate::error::{Error, Result};
use crate::learner::BinaryLearnerConfig;
use crate::scalar::Scalar;
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
pub struct RmseDistributionConfig {
    pub strategy: Strategy,
    pub learner: BinaryLearnerConfig,
    pub trials: usize,
    pub lambda_max: usize,
    pub holdout_fraction: f64,
    pub seed: u64,
    pub alpha: f64,
}

impl RmseDistributionConfig {
    pub fn new(strategy: Strategy, trials: usize, lambda_max: usize) -> Self {
        RmseDistributionConfig {
            strategy,
            learner: BinaryLearnerConfig::default(),
            trials,
            lambda_max,
            holdout_fraction: 0.0,
            seed: seed::DEFAULT_SEED,
            alpha: super::order_stat::DEFAULT_ALPHA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 2 {
            return Err(Error::usage("at least 2 trials are required"));
        }
        if self.lambda_max == 0 {
            return Err(Error::usage("lambda-max must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.holdout_fraction) {
            return Err(Error::usage("holdout fraction must lie in [0, 1)"));
        }
        if !(0.0..=0.5).contains(&self.alpha) {
            return Err(Error::usage("alpha must lie in [0, 0.5]"));
        }
        self.learner.validate()
    }
}

/// The minima observed for one value of λ.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSummary<T> {
    pub lambda: usize,
    /// Lowest train RMSE among the λ candidates of each trial.
    pub train: Vec<T>,
    /// Holdout RMSE of the candidate chosen in each trial.
    pub test: Option<Vec<T>>,
    pub mean: T,
    /// Sample standard deviation of `train`.
    pub sd: T,
    /// Order-statistic prediction from the λ = 1 mean and deviation.
    pub predicted_mean: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmseDistributionReport<T> {
    pub seed: u64,
    pub summaries: Vec<LambdaSummary<T>>,
}

impl<T: Scalar> RmseDistributionReport<T> {
    /// One row per (λ, trial) followed by a summary comment per λ.
    /// `test_rmse` is empty when no holdout was used.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,trial,train_rmse,test_rmse\n");
        for s in &self.summaries {
            for (t, train) in s.train.iter().enumerate() {
                let test = s.test.as_ref().map(|v| v[t].to_string()).unwrap_or_default();
                let _ = writeln!(out, "{},{},{},{}", s.lambda, t, train, test);
            }
        }
        let _ = writeln!(out, "# seed={}", self.seed);
        for s in &self.summaries {
            let _ = writeln!(
                out,
                "# lambda={} empirical_mean={} empirical_sd={} predicted_mean={}",
                s.lambda, s.mean, s.sd, s.predicted_mean
            );
        }
        out
    }
}

fn mean_sd<T: Scalar>(xs: &[T]) -> (T, T) {
    let n = T::from_usize_lossy(xs.len());
    let mean = xs.iter().copied().sum::<T>() / n;
    let ss: T = xs.iter().map(|&x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - T::one())).sqrt())
}

/// Trains root-level binary models on freshly drawn class splits.
///
/// Trial `t` at λ draws λ candidates, candidate `i` from the stream
/// `mix(mix(mix(mix(seed, TRIAL), λ), t), i)`, and keeps the one with the
/// lowest train RMSE. The holdout rows are a prefix of a permutation keyed
/// by `mix(seed, HOLDOUT)`; encoding statistics come from the rest.
pub fn rmse_distribution<T: Scalar>(
    data: &Dataset,
    config: &RmseDistributionConfig,
) -> Result<RmseDistributionReport<T>> {
    config.validate()?;
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut seed::stream(seed::mix(config.seed, seed::HOLDOUT)));
    let n_test = (config.holdout_fraction * data.len() as f64).round() as usize;
    let (test_idx, train_idx) = order.split_at(n_test);
    let mut train_idx = train_idx.to_vec();
    let mut test_idx = test_idx.to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    if train_idx.is_empty() {
        return Err(Error::usage("holdout leaves no training instances"));
    }
    let train = data.subset(&train_idx)?;
    let encoder = Encoder::<T>::fit(&train);
    let train_enc = encoder.transform(&train)?;
    let test_enc = if test_idx.is_empty() {
        None
    } else {
        Some(encoder.transform(&data.subset(&test_idx)?)?)
    };

    let train_view = NodeView::all(&train_enc);
    let classes = ClassSet::new(
        (0..train_enc.n_classes)
            .filter(|&c| train_enc.labels.contains(&c))
            .collect(),
    )?;
    if classes.len() < 2 {
        return Err(Error::data("training part needs at least 2 classes"));
    }

    let trial_base = seed::mix(config.seed, seed::TRIAL);
    let cells: Vec<(usize, usize)> = (1..=config.lambda_max)
        .flat_map(|l| (0..config.trials).map(move |t| (l, t)))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(lambda, trial)| {
            let key = seed::mix(seed::mix(trial_base, lambda as u64), trial as u64);
            let mut best = None;
            for i in 0..lambda {
                let mut rng = seed::stream(seed::mix(key, i as u64));
                let split = draw_split(config.strategy, &classes, &train_view, &config.learner, &mut rng)?;
                let (model, err) = evaluate_split(&train_view, &split, &config.learner)?;
                if best.as_ref().is_none_or(|(_, _, e)| err < *e) {
                    best = Some((split, model, err));
                }
            }
            let (split, model, train_rmse) = best.expect("lambda >= 1");
            let test_rmse = match &test_enc {
                Some(enc) => {
                    let view = NodeView::all(enc).restrict(&classes);
                    Some(split_rmse(&model, &view, &split)?)
                }
                None => None,
            };
            Ok((train_rmse, test_rmse))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut summaries: Vec<LambdaSummary<T>> = Vec::with_capacity(config.lambda_max);
    for (l, chunk) in results.chunks(config.trials).enumerate() {
        let train: Vec<T> = chunk.iter().map(|r| r.0).collect();
        let test = test_enc
            .as_ref()
            .map(|_| chunk.iter().map(|r| r.1.expect("holdout present")).collect());
        let (mean, sd) = mean_sd(&train);
        summaries.push(LambdaSummary {
            lambda: l + 1,
            train,
            test,
            mean,
            sd,
            predicted_mean: T::zero(),
        });
    }
    let (mu, sigma) = (summaries[0].mean, summaries[0].sd);
    for s in &mut summaries {
        let q = OrderStatQuery::new(mu, sigma, s.lambda).with_alpha(T::lit(config.alpha));
        s.predicted_mean = expected_min_normal(&q)?;
    }
    Ok(RmseDistributionReport {
        seed: config.seed,
        summaries,
    })
}
