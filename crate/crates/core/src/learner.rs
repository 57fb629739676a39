//! Weighted, ridge-penalized binary logistic regression.
//!
//! Training minimizes
//!
//! ```text
//! sum_i w_i * (softplus(z_i) - y_i * z_i) + ridge * |beta|^2,   z_i = b + beta . x_i
//! ```
//!
//! with a damped Newton method and Armijo backtracking, starting from zero.
//! The intercept `b` is not penalized.

use serde::{Deserialize, Serialize};

use crate::data::{EncodedDataset, Matrix};
use crate::error::{Error, Result};
use crate::scalar::{logistic, softplus, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryLearnerConfig {
    pub ridge: f64,
    pub max_iterations: usize,
    /// Convergence threshold on the gradient infinity-norm.
    pub tolerance: f64,
}

impl Default for BinaryLearnerConfig {
    fn default() -> Self {
        BinaryLearnerConfig {
            ridge: 1e-8,
            max_iterations: 200,
            tolerance: 1e-8,
        }
    }
}

impl BinaryLearnerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::usage("ridge must be finite and non-negative"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::usage("tolerance must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::usage("max_iterations must be positive"));
        }
        Ok(())
    }
}

/// Which side of a class split a binary model calls "positive".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryModel<T> {
    pub coefficients: Vec<T>,
    pub intercept: T,
    pub positive_side: Side,
    /// Constant output for models trained on a single outcome.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate_probability: Option<T>,
}

impl<T: Scalar> BinaryModel<T> {
    /// A constant model; `coefficients` is sized for width checks.
    pub fn constant(width: usize, probability: T, positive_side: Side) -> Self {
        BinaryModel {
            coefficients: vec![T::zero(); width],
            intercept: T::zero(),
            positive_side,
            degenerate_probability: Some(probability),
        }
    }

    pub fn width(&self) -> usize {
        self.coefficients.len()
    }

    /// Probability of the positive side for an encoded row.
    pub fn predict(&self, row: &[T]) -> Result<T> {
        if row.len() != self.coefficients.len() {
            return Err(Error::usage(format!(
                "row width {} does not match model width {}",
                row.len(),
                self.coefficients.len()
            )));
        }
        Ok(self.predict_unchecked(row))
    }

    pub(crate) fn predict_unchecked(&self, row: &[T]) -> T {
        if let Some(p) = self.degenerate_probability {
            return p;
        }
        logistic(self.intercept + dot(&self.coefficients, row))
    }

    /// Probability of `side`; the two sides always sum to one.
    pub fn probability_of(&self, side: Side, row: &[T]) -> Result<T> {
        let p = self.predict(row)?;
        Ok(if side == self.positive_side { p } else { T::one() - p })
    }
}

/// Free-function form of [`BinaryModel::predict`].
pub fn predict_binary<T: Scalar>(model: &BinaryModel<T>, row: &[T]) -> Result<T> {
    model.predict(row)
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Rows of a shared matrix with binary targets and instance weights.
#[derive(Debug, Clone)]
pub struct BinaryProblem<'a, T> {
    x: &'a Matrix<T>,
    rows: Vec<usize>,
    targets: Vec<bool>,
    weights: Vec<T>,
}

impl<'a, T: Scalar> BinaryProblem<'a, T> {
    pub fn new(x: &'a Matrix<T>, rows: Vec<usize>, targets: Vec<bool>, weights: Vec<T>) -> Result<Self> {
        if rows.len() != targets.len() || rows.len() != weights.len() {
            return Err(Error::usage("rows, targets and weights differ in length"));
        }
        if rows.iter().any(|&r| r >= x.n_rows()) {
            return Err(Error::usage("row index out of range"));
        }
        if weights.iter().any(|w| !(*w >= T::zero()) || !w.is_finite()) {
            return Err(Error::usage("weights must be finite and non-negative"));
        }
        Ok(BinaryProblem {
            x,
            rows,
            targets,
            weights,
        })
    }

    /// Selects `rows` of `data`; `target(label)` marks the positive outcome.
    pub fn from_encoded(data: &'a EncodedDataset<T>, rows: &[usize], target: impl Fn(usize) -> bool) -> Self {
        BinaryProblem {
            x: &data.matrix,
            rows: rows.to_vec(),
            targets: rows.iter().map(|&r| target(data.labels[r])).collect(),
            weights: rows.iter().map(|&r| data.weights[r]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn width(&self) -> usize {
        self.x.n_cols()
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn targets(&self) -> &[bool] {
        &self.targets
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn row(&self, k: usize) -> &[T] {
        self.x.row(self.rows[k])
    }

    fn weight_by_target(&self) -> (T, T) {
        let mut pos = T::zero();
        let mut neg = T::zero();
        for (&t, &w) in self.targets.iter().zip(&self.weights) {
            if t {
                pos += w;
            } else {
                neg += w;
            }
        }
        (pos, neg)
    }
}

/// Penalized weighted negative log-likelihood and its gradient.
/// `params[0]` is the intercept, `params[1..]` the coefficients.
pub fn objective<T: Scalar>(problem: &BinaryProblem<'_, T>, params: &[T], ridge: T) -> (T, Vec<T>) {
    let d = problem.width();
    assert_eq!(params.len(), d + 1);
    let mut value = T::zero();
    let mut grad = vec![T::zero(); d + 1];
    for k in 0..problem.len() {
        let w = problem.weights[k];
        if w == T::zero() {
            continue;
        }
        let x = problem.row(k);
        let z = params[0] + dot(&params[1..], x);
        let y = if problem.targets[k] { T::one() } else { T::zero() };
        value += w * (softplus(z) - y * z);
        let r = w * (logistic(z) - y);
        grad[0] += r;
        for (g, &xj) in grad[1..].iter_mut().zip(x) {
            *g += r * xj;
        }
    }
    let two = T::lit(2.0);
    for (g, &b) in grad[1..].iter_mut().zip(&params[1..]) {
        value += ridge * b * b;
        *g += two * ridge * b;
    }
    (value, grad)
}

fn hessian<T: Scalar>(problem: &BinaryProblem<'_, T>, params: &[T], ridge: T) -> Vec<T> {
    let n = params.len();
    let mut h = vec![T::zero(); n * n];
    let mut xa = vec![T::zero(); n];
    for k in 0..problem.len() {
        let w = problem.weights[k];
        if w == T::zero() {
            continue;
        }
        let x = problem.row(k);
        xa[0] = T::one();
        xa[1..].copy_from_slice(x);
        let p = logistic(dot(params, &xa));
        let s = w * p * (T::one() - p);
        if s == T::zero() {
            continue;
        }
        for i in 0..n {
            let si = s * xa[i];
            if si == T::zero() {
                continue;
            }
            for j in 0..=i {
                h[i * n + j] += si * xa[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            h[j * n + i] = h[i * n + j];
        }
    }
    for i in 1..n {
        h[i * n + i] += T::lit(2.0) * ridge;
    }
    h
}

/// Solves `(h + damping*I) x = b` by Cholesky; `None` if not positive definite.
fn cholesky_solve<T: Scalar>(h: &[T], b: &[T], damping: T) -> Option<Vec<T>> {
    let n = b.len();
    let mut l = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = h[i * n + j];
            if i == j {
                sum += damping;
            }
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(sum > T::zero()) || !sum.is_finite() {
                    return None;
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    let mut y = vec![T::zero(); n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    Some(x)
}

/// A trained model plus the objective value after every accepted iterate
/// (starting with the zero initialization).
#[derive(Debug, Clone)]
pub struct TrainingTrace<T> {
    pub model: BinaryModel<T>,
    pub objective_history: Vec<T>,
    pub converged: bool,
}

/// Trains a model whose positive outcome is `targets == true`, labelled as
/// `positive_side`.
pub fn train_binary<T: Scalar>(
    problem: &BinaryProblem<'_, T>,
    config: &BinaryLearnerConfig,
    positive_side: Side,
) -> BinaryModel<T> {
    train_binary_traced(problem, config, positive_side).model
}

pub fn train_binary_traced<T: Scalar>(
    problem: &BinaryProblem<'_, T>,
    config: &BinaryLearnerConfig,
    positive_side: Side,
) -> TrainingTrace<T> {
    let width = problem.width();
    let (pos, neg) = problem.weight_by_target();
    if pos == T::zero() || neg == T::zero() {
        // Laplace-smoothed constant for single-outcome training sets.
        let p = (pos + T::one()) / (pos + neg + T::lit(2.0));
        return TrainingTrace {
            model: BinaryModel::constant(width, p, positive_side),
            objective_history: Vec::new(),
            converged: true,
        };
    }

    let ridge = T::lit(config.ridge);
    let tol = T::lit(config.tolerance);
    let mut params = vec![T::zero(); width + 1];
    let (mut value, mut grad) = objective(problem, &params, ridge);
    let mut history = vec![value];
    let mut converged = false;

    for _ in 0..config.max_iterations {
        if inf_norm(&grad) <= tol {
            converged = true;
            break;
        }
        let h = hessian(problem, &params, ridge);
        let scale = (0..params.len()).fold(T::zero(), |m, i| m.max(h[i * params.len() + i]));
        let mut damping = T::zero();
        let step = loop {
            if let Some(s) = cholesky_solve(&h, &grad, damping) {
                break Some(s);
            }
            damping = if damping == T::zero() {
                T::epsilon().sqrt() * (T::one() + scale)
            } else {
                damping * T::lit(10.0)
            };
            if !damping.is_finite() || damping > T::lit(1e12) * (T::one() + scale) {
                break None;
            }
        };
        let Some(step) = step else { break };

        // Armijo backtracking along -step.
        let slope = dot(&grad, &step);
        if !(slope > T::zero()) {
            break;
        }
        let mut t = T::one();
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<T> = params.iter().zip(&step).map(|(&p, &s)| p - t * s).collect();
            let (v, g) = objective(problem, &trial, ridge);
            if v.is_finite() && v <= value - T::lit(1e-4) * t * slope {
                accepted = Some((trial, v, g));
                break;
            }
            t *= T::lit(0.5);
        }
        let Some((trial, v, g)) = accepted else { break };
        let improvement = value - v;
        params = trial;
        value = v;
        grad = g;
        history.push(value);
        // no further progress representable in this precision
        if improvement <= T::epsilon() * (T::one() + value.abs()) {
            break;
        }
    }
    converged |= inf_norm(&grad) <= tol;

    TrainingTrace {
        model: BinaryModel {
            intercept: params[0],
            coefficients: params[1..].to_vec(),
            positive_side,
            degenerate_probability: None,
        },
        objective_history: history,
        converged,
    }
}

fn inf_norm<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn separable_one_dimensional() {
        let x = matrix(&[&[-1.0], &[1.0]]);
        let prob = BinaryProblem::new(&x, vec![0, 1], vec![false, true], vec![1.0, 1.0]).unwrap();
        let m = train_binary(&prob, &BinaryLearnerConfig::default(), Side::Left);
        assert!(m.coefficients[0] > 0.0);
        assert!(m.predict(&[1.0]).unwrap() > 0.99);
        assert!(m.predict(&[-1.0]).unwrap() < 0.01);
    }

    #[test]
    fn single_outcome_is_laplace_constant() {
        let x = matrix(&[&[0.0], &[1.0], &[2.0]]);
        let all_pos = BinaryProblem::new(&x, vec![0, 1, 2], vec![true; 3], vec![1.0; 3]).unwrap();
        let m = train_binary(&all_pos, &BinaryLearnerConfig::default(), Side::Left);
        assert_eq!(m.degenerate_probability, Some(4.0 / 5.0));

        let x2 = matrix(&[&[0.0], &[1.0], &[2.0], &[3.0], &[4.0]]);
        let zero_weight_neg = BinaryProblem::new(
            &x2,
            vec![0, 1, 2, 3, 4],
            vec![true, true, true, false, false],
            vec![1.0, 1.0, 1.0, 0.0, 0.0],
        )
        .unwrap();
        let m2 = train_binary(&zero_weight_neg, &BinaryLearnerConfig::default(), Side::Left);
        assert_eq!(m, m2);
    }

    #[test]
    fn predict_identities() {
        let zero = BinaryModel::<f64> {
            coefficients: vec![0.0, 0.0],
            intercept: 0.0,
            positive_side: Side::Left,
            degenerate_probability: None,
        };
        assert_eq!(zero.predict(&[3.0, -1.0]).unwrap(), 0.5);
        let ten = BinaryModel {
            intercept: 10.0,
            ..zero.clone()
        };
        let p = ten.predict(&[0.0, 0.0]).unwrap();
        assert!((p - 0.9999546).abs() < 1e-7);
        let l = ten.probability_of(Side::Left, &[0.0, 0.0]).unwrap();
        let r = ten.probability_of(Side::Right, &[0.0, 0.0]).unwrap();
        assert_eq!(l + r, 1.0);
        assert!(matches!(ten.predict(&[1.0]), Err(Error::Usage(_))));
    }

    #[test]
    fn config_validation() {
        assert!(BinaryLearnerConfig::default().validate().is_ok());
        assert!(BinaryLearnerConfig {
            ridge: -1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(BinaryLearnerConfig {
            tolerance: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn cholesky_solves_spd() {
        let h = vec![4.0, 2.0, 2.0, 3.0];
        let x = cholesky_solve(&h, &[2.0, 1.0], 0.0).unwrap();
        assert!((4.0 * x[0] + 2.0 * x[1] - 2.0f64).abs() < 1e-12);
        assert!((2.0 * x[0] + 3.0 * x[1] - 1.0f64).abs() < 1e-12);
        assert!(cholesky_solve(&[0.0, 0.0, 0.0, 0.0], &[1.0, 1.0], 0.0).is_none());
    }
}
