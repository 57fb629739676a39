//! Probability-estimate metrics and the repeated cross-validation harness.

mod cv;

pub use cv::{cross_validate, plan_cross_validation, CvCell, CvEntry, CvReport};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Probability estimates for `n` instances over `m` classes, the true
/// class of each instance and optional instance weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionBatch<T> {
    estimates: Vec<Vec<T>>,
    truth: Vec<usize>,
    n_classes: usize,
    weights: Option<Vec<T>>,
}

impl<T: Scalar> PredictionBatch<T> {
    pub fn new(estimates: Vec<Vec<T>>, truth: Vec<usize>, n_classes: usize) -> Result<Self> {
        if estimates.len() != truth.len() {
            return Err(Error::usage("estimates and truth differ in length"));
        }
        let tol = T::lit(1e-6).max(T::epsilon() * T::lit(64.0) * T::from_usize_lossy(n_classes));
        for (row, &t) in estimates.iter().zip(&truth) {
            if row.len() != n_classes {
                return Err(Error::usage(format!(
                    "estimate row has {} entries, expected {n_classes}",
                    row.len()
                )));
            }
            if t >= n_classes {
                return Err(Error::usage(format!("true class {t} out of range")));
            }
            let s: T = row.iter().copied().sum();
            if !((s - T::one()).abs() <= tol) {
                return Err(Error::usage(format!("estimate row sums to {s}, not 1")));
            }
        }
        Ok(PredictionBatch {
            estimates,
            truth,
            n_classes,
            weights: None,
        })
    }

    /// Builds a batch from one-hot truth rows.
    pub fn from_one_hot(estimates: Vec<Vec<T>>, truth: &[Vec<T>]) -> Result<Self> {
        let m = truth.first().map_or(0, Vec::len);
        let labels = truth
            .iter()
            .map(|row| {
                let ones: Vec<usize> = (0..row.len()).filter(|&j| row[j] == T::one()).collect();
                let zeros = row.iter().filter(|&&v| v == T::zero()).count();
                if row.len() == m && ones.len() == 1 && zeros == m - 1 {
                    Ok(ones[0])
                } else {
                    Err(Error::usage("truth row is not one-hot"))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        PredictionBatch::new(estimates, labels, m)
    }

    pub fn with_weights(mut self, weights: Vec<T>) -> Result<Self> {
        if weights.len() != self.truth.len() {
            return Err(Error::usage("weights and estimates differ in length"));
        }
        if weights.iter().any(|w| !(*w >= T::zero())) {
            return Err(Error::usage("weights must be non-negative"));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.truth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.truth.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn weight(&self, i: usize) -> T {
        self.weights.as_ref().map_or(T::one(), |w| w[i])
    }

    fn total_weight(&self) -> Result<T> {
        if self.is_empty() {
            return Err(Error::usage("empty prediction batch"));
        }
        let total: T = (0..self.len()).map(|i| self.weight(i)).sum();
        if total > T::zero() {
            Ok(total)
        } else {
            Err(Error::usage("prediction batch has zero total weight"))
        }
    }
}

/// `sqrt(1/(n m) Σ_i Σ_j (ŷ_ij - y_ij)²)`, instance-weighted when weights
/// are attached.
pub fn rmse<T: Scalar>(batch: &PredictionBatch<T>) -> Result<T> {
    let total = batch.total_weight()?;
    let mut sum = T::zero();
    for (i, (row, &t)) in batch.estimates.iter().zip(&batch.truth).enumerate() {
        let sq: T = row
            .iter()
            .enumerate()
            .map(|(j, &p)| {
                let d = if j == t { p - T::one() } else { p };
                d * d
            })
            .sum();
        sum += batch.weight(i) * sq;
    }
    Ok((sum / (total * T::from_usize_lossy(batch.n_classes))).sqrt())
}

/// First index of the largest entry.
pub fn argmax<T: Scalar>(row: &[T]) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = j;
        }
    }
    best
}

/// Fraction of instances whose highest estimate is the true class.
pub fn accuracy<T: Scalar>(batch: &PredictionBatch<T>) -> Result<T> {
    let total = batch.total_weight()?;
    let correct: T = batch
        .estimates
        .iter()
        .zip(&batch.truth)
        .enumerate()
        .filter(|(_, (row, &t))| argmax(row) == t)
        .map(|(i, _)| batch.weight(i))
        .sum();
    Ok(correct / total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rmse_closed_forms() {
        let perfect = PredictionBatch::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0, 1], 2).unwrap();
        assert_eq!(rmse(&perfect).unwrap(), 0.0);
        let half = PredictionBatch::new(vec![vec![0.5, 0.5]; 3], vec![0, 1, 1], 2).unwrap();
        assert_eq!(rmse(&half).unwrap(), 0.5);
        let quarter = PredictionBatch::new(vec![vec![0.25f64; 4]; 2], vec![0, 3], 4).unwrap();
        assert!((rmse(&quarter).unwrap() - 0.4330127).abs() < 1e-7);
    }

    #[test]
    fn accuracy_and_ties() {
        let b = PredictionBatch::new(vec![vec![0.9, 0.1], vec![0.2, 0.8]], vec![0, 1], 2).unwrap();
        assert_eq!(accuracy(&b).unwrap(), 1.0);
        let w = PredictionBatch::new(vec![vec![0.1, 0.9], vec![0.8, 0.2]], vec![0, 1], 2).unwrap();
        assert_eq!(accuracy(&w).unwrap(), 0.0);
        let third = 1.0 / 3.0;
        let tie = PredictionBatch::new(vec![vec![third; 3]], vec![0], 3).unwrap();
        assert_eq!(accuracy(&tie).unwrap(), 1.0);
    }

    #[test]
    fn validation_and_empty() {
        assert!(PredictionBatch::<f64>::new(vec![vec![0.5, 0.4]], vec![0], 2).is_err());
        assert!(PredictionBatch::<f64>::new(vec![vec![0.5, 0.5]], vec![2], 2).is_err());
        let empty = PredictionBatch::<f64>::new(vec![], vec![], 2).unwrap();
        assert!(matches!(rmse(&empty), Err(Error::Usage(_))));
        assert!(accuracy(&empty).is_err());
        let oh = PredictionBatch::from_one_hot(vec![vec![0.5, 0.5]], &[vec![0.0, 1.0]]).unwrap();
        assert_eq!(oh.truth, vec![1]);
        assert!(PredictionBatch::from_one_hot(vec![vec![0.5, 0.5]], &[vec![1.0, 1.0]]).is_err());
    }

    #[test]
    fn unit_weights_match_unweighted() {
        let est = vec![vec![0.7_f64, 0.3], vec![0.4, 0.6], vec![0.2, 0.8]];
        let b = PredictionBatch::new(est.clone(), vec![0, 0, 1], 2).unwrap();
        let w = b.clone().with_weights(vec![1.0; 3]).unwrap();
        assert_eq!(rmse(&b).unwrap(), rmse(&w).unwrap());
        let dup = PredictionBatch::new(
            vec![est[0].clone(), est[0].clone(), est[1].clone(), est[2].clone()],
            vec![0, 0, 0, 1],
            2,
        )
        .unwrap();
        let w2 = b.with_weights(vec![2.0, 1.0, 1.0]).unwrap();
        assert!((rmse(&dup).unwrap() - rmse(&w2).unwrap()).abs() < 1e-15);
    }
}
