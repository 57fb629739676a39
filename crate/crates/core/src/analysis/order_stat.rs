//! Normal approximation to the expected minimum of `lambda` training errors.

use serde::{Deserialize, Serialize};

use super::normal::inverse_normal_cdf;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Blom's plotting-position constant.
pub const DEFAULT_ALPHA: f64 = 0.375;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderStatQuery<T> {
    pub mu: T,
    pub sigma: T,
    pub lambda: usize,
    /// Compromise value in `[0, 0.5]`.
    pub alpha: T,
}

impl<T: Scalar> OrderStatQuery<T> {
    pub fn new(mu: T, sigma: T, lambda: usize) -> Self {
        OrderStatQuery {
            mu,
            sigma,
            lambda,
            alpha: T::lit(DEFAULT_ALPHA),
        }
    }

    pub fn with_alpha(self, alpha: T) -> Self {
        OrderStatQuery { alpha, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= T::zero()) {
            return Err(Error::usage("sigma must be non-negative"));
        }
        if self.lambda == 0 {
            return Err(Error::usage("lambda must be at least 1"));
        }
        if !(self.alpha >= T::zero() && self.alpha <= T::lit(0.5)) {
            return Err(Error::usage("alpha must lie in [0, 0.5]"));
        }
        if !self.mu.is_finite() || !self.sigma.is_finite() {
            return Err(Error::usage("mu and sigma must be finite"));
        }
        Ok(())
    }
}

/// `E[min of lambda N(mu, sigma²) draws] ≈ mu + sigma Φ⁻¹((1 - α) / (lambda - 2α + 1))`.
pub fn expected_min_normal<T: Scalar>(q: &OrderStatQuery<T>) -> Result<T> {
    q.validate()?;
    if q.lambda == 1 || q.sigma == T::zero() {
        return Ok(q.mu);
    }
    let lambda = T::from_usize_lossy(q.lambda);
    let position = (T::one() - q.alpha) / (lambda - T::lit(2.0) * q.alpha + T::one());
    Ok(q.mu + q.sigma * inverse_normal_cdf(position)?)
}
