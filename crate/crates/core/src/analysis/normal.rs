//! Standard normal CDF and its inverse.
//!
//! `Φ(z) = erfc(-z/√2) / 2`. For `|x| < 3` the error function uses the
//! all-positive series `erf(x) = 2/√π · e^{-x²} · Σ 2ⁿ x^{2n+1} / (2n+1)!!`;
//! beyond that `erfc` is evaluated by its continued fraction with the
//! modified Lentz method. The quantile starts from Acklam's rational
//! approximation and is polished with Halley steps against `Φ`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const SERIES_LIMIT: f64 = 3.0;

fn erf_series<T: Scalar>(x: T) -> T {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let two = T::lit(2.0);
    let mut k = T::one();
    for _ in 0..500 {
        term = term * two * x2 / (two * k + T::one());
        sum += term;
        if term.abs() <= T::epsilon() * sum.abs() {
            break;
        }
        k += T::one();
    }
    two / T::PI().sqrt() * (-x2).exp() * sum
}

/// `erfc(x)` for `x > 0` by continued fraction
/// `e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`.
fn erfc_continued_fraction<T: Scalar>(x: T) -> T {
    let tiny = T::min_positive_value().sqrt();
    let half = T::lit(0.5);
    let mut f = x;
    let mut c = x;
    let mut d = T::zero();
    for k in 1..1000 {
        let a = T::from_usize_lossy(k) * half;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = T::one() / d;
        let delta = c * d;
        f *= delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    (-x * x).exp() / (T::PI().sqrt() * f)
}

pub fn erfc<T: Scalar>(x: T) -> T {
    let limit = T::lit(SERIES_LIMIT);
    if x.abs() < limit {
        T::one() - erf_series(x)
    } else if x > T::zero() {
        erfc_continued_fraction(x)
    } else {
        T::lit(2.0) - erfc_continued_fraction(-x)
    }
}

/// Standard normal cumulative distribution function.
pub fn normal_cdf<T: Scalar>(z: T) -> T {
    T::lit(0.5) * erfc(-z / T::SQRT_2())
}

/// Standard normal density.
pub fn normal_pdf<T: Scalar>(z: T) -> T {
    (-(z * z) / T::lit(2.0)).exp() / (T::lit(2.0) * T::PI()).sqrt()
}

fn acklam<T: Scalar>(p: T) -> T {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let poly = |coef: &[f64], x: T| coef.iter().fold(T::zero(), |acc, &c| acc * x + T::lit(c));
    let low = T::lit(0.02425);
    if p < low {
        let q = (T::lit(-2.0) * p.ln()).sqrt();
        poly(&C, q) / (poly(&D, q) * q + T::one())
    } else if p <= T::one() - low {
        let q = p - T::lit(0.5);
        let r = q * q;
        poly(&A, r) * q / (poly(&B, r) * r + T::one())
    } else {
        let q = (T::lit(-2.0) * (T::one() - p).ln()).sqrt();
        -poly(&C, q) / (poly(&D, q) * q + T::one())
    }
}

/// Inverse of the standard normal CDF on `(0, 1)`.
pub fn inverse_normal_cdf<T: Scalar>(p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::usage(format!("probability {p} outside (0, 1)")));
    }
    if p == T::lit(0.5) {
        return Ok(T::zero());
    }
    let mut x = acklam(p);
    for _ in 0..4 {
        let e = normal_cdf(x) - p;
        if e == T::zero() {
            break;
        }
        let u = e / normal_pdf(x);
        let next = x - u / (T::one() + x * u / T::lit(2.0));
        if !next.is_finite() {
            break;
        }
        x = next;
    }
    Ok(x)
}
