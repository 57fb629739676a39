use rayon::prelude::*;

use super::{draw_split, ClassSet, ClassSplit, SplitterSpec};
use crate::data::EncodedDataset;
use crate::error::{Error, Result};
use crate::eval::{rmse, PredictionBatch};
use crate::learner::{train_binary, BinaryLearnerConfig, BinaryModel, BinaryProblem, Side};
use crate::scalar::Scalar;
use crate::seed;

/// The instances reaching a tree node.
#[derive(Debug, Clone)]
pub struct NodeView<'a, T> {
    pub data: &'a EncodedDataset<T>,
    pub rows: Vec<usize>,
}

impl<'a, T: Scalar> NodeView<'a, T> {
    pub fn all(data: &'a EncodedDataset<T>) -> Self {
        NodeView {
            data,
            rows: (0..data.len()).collect(),
        }
    }

    /// Rows whose label is in `classes`.
    pub fn restrict(&self, classes: &ClassSet) -> NodeView<'a, T> {
        NodeView {
            data: self.data,
            rows: self
                .rows
                .iter()
                .copied()
                .filter(|&r| classes.contains(self.data.labels[r]))
                .collect(),
        }
    }
}

/// Trains the meta-class model for `split` (left side positive) and
/// returns it with its training RMSE over the two meta-classes.
pub fn evaluate_split<T: Scalar>(
    node: &NodeView<'_, T>,
    split: &ClassSplit,
    config: &BinaryLearnerConfig,
) -> Result<(BinaryModel<T>, T)> {
    check_membership(node, split)?;
    let problem = BinaryProblem::from_encoded(node.data, &node.rows, |l| split.left.contains(l));
    let model = train_binary(&problem, config, Side::Left);
    let err = split_rmse(&model, node, split)?;
    Ok((model, err))
}

fn check_membership<T: Scalar>(node: &NodeView<'_, T>, split: &ClassSplit) -> Result<()> {
    match node
        .rows
        .iter()
        .find(|&&r| split.side_of(node.data.labels[r]).is_none())
    {
        Some(&r) => Err(Error::usage(format!(
            "instance of class {} does not belong to the split",
            node.data.labels[r]
        ))),
        None => Ok(()),
    }
}

/// Weighted RMSE of `model` over the two meta-classes of `split` on the
/// rows of `node`.
pub fn split_rmse<T: Scalar>(model: &BinaryModel<T>, node: &NodeView<'_, T>, split: &ClassSplit) -> Result<T> {
    check_membership(node, split)?;
    let mut estimates = Vec::with_capacity(node.rows.len());
    let mut truth = Vec::with_capacity(node.rows.len());
    for &r in &node.rows {
        let p = model.probability_of(Side::Left, node.data.matrix.row(r))?;
        estimates.push(vec![p, T::one() - p]);
        truth.push(usize::from(split.side_of(node.data.labels[r]) == Some(Side::Right)));
    }
    let weights = node.rows.iter().map(|&r| node.data.weights[r]).collect();
    let batch = PredictionBatch::new(estimates, truth, 2)?.with_weights(weights)?;
    rmse(&batch)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate<T> {
    pub split: ClassSplit,
    pub train_rmse: T,
}

/// The chosen split plus every evaluated candidate, in draw order.
#[derive(Debug, Clone)]
pub struct SplitSelection<T> {
    pub split: ClassSplit,
    pub model: BinaryModel<T>,
    pub train_rmse: T,
    pub chosen: usize,
    pub candidates: Vec<Candidate<T>>,
}

/// Multiple subset evaluation at one node.
///
/// Candidate `i` is drawn and trained with the stream keyed by
/// `mix(mix(node_key, CANDIDATE), i)`; the lowest training RMSE wins, ties
/// going to the earliest draw.
pub fn select_split<T: Scalar>(
    node: &NodeView<'_, T>,
    classes: &ClassSet,
    spec: &SplitterSpec,
    learner: &BinaryLearnerConfig,
    node_key: u64,
) -> Result<SplitSelection<T>> {
    spec.validate()?;
    if classes.len() < 2 {
        return Err(Error::usage("a node needs at least two classes to split"));
    }
    let k = spec.candidates_for(classes.len());
    let base = seed::mix(node_key, seed::CANDIDATE);
    let evaluated = (0..k)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::stream(seed::mix(base, i as u64));
            let split = draw_split(spec.strategy, classes, node, learner, &mut rng)?;
            let (model, err) = evaluate_split(node, &split, learner)?;
            Ok((split, model, err))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best = 0;
    for (i, (_, _, err)) in evaluated.iter().enumerate() {
        let current = evaluated[best].2;
        if *err < current || (current.is_nan() && !err.is_nan()) {
            best = i;
        }
    }
    let candidates = evaluated
        .iter()
        .map(|(s, _, e)| Candidate {
            split: s.clone(),
            train_rmse: *e,
        })
        .collect();
    let (split, model, train_rmse) = evaluated.into_iter().nth(best).expect("k >= 1");
    Ok(SplitSelection {
        split,
        model,
        train_rmse,
        chosen: best,
        candidates,
    })
}
