//! Growth functions: how many distinct nested dichotomies an `n`-class
//! problem admits under each selection strategy, with and without the
//! restriction induced by keeping only the best of `lambda` candidates.

use std::collections::{HashMap, HashSet};
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dichotomy::Strategy;
use crate::error::{Error, Result};

/// Largest class count accepted by explicit enumeration.
pub const MAX_ENUMERATION_CLASSES: usize = 8;

/// Number of nested dichotomies under uniform random selection:
/// `T(1) = 1`, `T(n) = (2n - 3) T(n - 1)`.
pub fn growth_random(n: usize) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(2 * k - 3))
}

/// Number of class-balanced nested dichotomies, `T_CB(1) = T_CB(2) = 1`.
pub fn growth_balanced(n: usize) -> BigUint {
    if n <= 2 {
        return BigUint::one();
    }
    let nb = BigUint::from(n);
    if n.is_multiple_of(2) {
        let half = growth_balanced(n / 2);
        binomial(nb, BigUint::from(n / 2)) * &half * &half / BigUint::from(2u32)
    } else {
        binomial(nb, BigUint::from(n.div_ceil(2))) * growth_balanced(n.div_ceil(2)) * growth_balanced((n - 1) / 2)
    }
}

/// Fitted polynomial factor of the random-pair growth estimate.
pub fn random_pair_polynomial(n: f64) -> f64 {
    0.3812 * n * n - 1.4979 * n + 2.9027
}

/// Empirical estimate of the random-pair growth function,
/// `T_RP(n) = p(n) T_RP(n/3) T_RP(2n/3)` with the sub-problem sizes
/// rounded to the nearest integer and clamped to at least one.
pub fn growth_random_pair_estimate(n: usize) -> f64 {
    if n <= 2 {
        return 1.0;
    }
    let third = ((n as f64 / 3.0).round() as usize).max(1);
    let two_thirds = ((2.0 * n as f64 / 3.0).round() as usize).max(1);
    random_pair_polynomial(n as f64) * growth_random_pair_estimate(third) * growth_random_pair_estimate(two_thirds)
}

/// Split shapes available at a node with `n` classes: `(smaller side, number
/// of distinct unordered splits with that shape)`, smaller side ascending.
pub fn split_shapes(n: usize, strategy: Strategy) -> Vec<(usize, BigUint)> {
    let count = |a: usize| {
        let c = binomial(BigUint::from(n), BigUint::from(a));
        if 2 * a == n {
            c / BigUint::from(2u32)
        } else {
            c
        }
    };
    match strategy {
        Strategy::Balanced if n >= 2 => vec![(n / 2, count(n / 2))],
        _ => (1..=n / 2).map(|a| (a, count(a))).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalPolicy {
    None,
    /// Discarded candidates are the most unbalanced splits (singletons first).
    IsolateSingleton,
    /// Discarded candidates are the most balanced splits.
    BalancedRemoval,
}

impl FromStr for RemovalPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(RemovalPolicy::None),
            "isolate" | "isolate_singleton" | "isolate-singleton" => Ok(RemovalPolicy::IsolateSingleton),
            "balanced" | "balanced_removal" | "balanced-removal" => Ok(RemovalPolicy::BalancedRemoval),
            other => Err(Error::usage(format!("unknown removal policy '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMethod {
    Recurrence,
    Enumerate,
}

impl FromStr for CountMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "recurrence" => Ok(CountMethod::Recurrence),
            "enumerate" => Ok(CountMethod::Enumerate),
            other => Err(Error::usage(format!("unknown counting method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthQuery {
    pub n: usize,
    pub strategy: Strategy,
    pub lambda: usize,
    pub removal_policy: RemovalPolicy,
    pub method: CountMethod,
}

impl GrowthQuery {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::usage("n must be at least 1"));
        }
        if self.lambda == 0 {
            return Err(Error::usage("lambda must be at least 1"));
        }
        if (self.removal_policy == RemovalPolicy::None) != (self.lambda == 1) {
            return Err(Error::usage("a removal policy is required exactly when lambda > 1"));
        }
        if self.method == CountMethod::Enumerate && self.n > MAX_ENUMERATION_CLASSES {
            return Err(Error::usage(format!(
                "enumeration is limited to n <= {MAX_ENUMERATION_CLASSES}"
            )));
        }
        if self.strategy == Strategy::RandomPair {
            return Err(Error::Unsupported(
                "restricted growth for random-pair selection depends on the data".into(),
            ));
        }
        Ok(())
    }
}

/// Number of nested dichotomies left when, at every node, `lambda - 1`
/// splits of the removal policy's shape are excluded (always keeping one).
pub fn growth_restricted(q: &GrowthQuery) -> Result<BigUint> {
    q.validate()?;
    Ok(match q.method {
        CountMethod::Recurrence => {
            let mut memo = HashMap::new();
            restricted_recurrence(q.n, q, &mut memo)
        }
        CountMethod::Enumerate => {
            let classes: Vec<usize> = (0..q.n).collect();
            let trees = enumerate_trees(&classes, q);
            let distinct: HashSet<&String> = trees.iter().collect();
            BigUint::from(distinct.len())
        }
    })
}

/// Shape counts left after removal, as `(smaller side, remaining count)`.
fn surviving_shapes(n: usize, q: &GrowthQuery) -> Vec<(usize, BigUint)> {
    let mut shapes = split_shapes(n, q.strategy);
    let total: BigUint = shapes.iter().map(|(_, c)| c.clone()).sum();
    let mut to_remove = BigUint::from(q.lambda - 1).min(total - BigUint::one());
    let order: Vec<usize> = match q.removal_policy {
        RemovalPolicy::None | RemovalPolicy::IsolateSingleton => (0..shapes.len()).collect(),
        RemovalPolicy::BalancedRemoval => (0..shapes.len()).rev().collect(),
    };
    for i in order {
        if to_remove.is_zero() {
            break;
        }
        let take = to_remove.clone().min(shapes[i].1.clone());
        shapes[i].1 -= &take;
        to_remove -= take;
    }
    shapes
}

fn restricted_recurrence(n: usize, q: &GrowthQuery, memo: &mut HashMap<usize, BigUint>) -> BigUint {
    if n <= 1 {
        return BigUint::one();
    }
    if let Some(v) = memo.get(&n) {
        return v.clone();
    }
    let mut total = BigUint::zero();
    for (a, count) in surviving_shapes(n, q) {
        if count.is_zero() {
            continue;
        }
        total += count * restricted_recurrence(a, q, memo) * restricted_recurrence(n - a, q, memo);
    }
    memo.insert(n, total.clone());
    total
}

/// All trees over `classes` as canonical strings, built by explicitly
/// listing splits at every node. Removal drops, in enumeration order, the
/// first splits of the shapes named by the policy.
fn enumerate_trees(classes: &[usize], q: &GrowthQuery) -> Vec<String> {
    if classes.len() == 1 {
        return vec![classes[0].to_string()];
    }
    let n = classes.len();
    // Subsets containing classes[0] fix the orientation of each unordered split.
    let mut splits: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for mask in 0u32..(1 << (n - 1)) {
        let left_mask = (mask << 1) | 1;
        if left_mask == (1 << n) - 1 {
            continue;
        }
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (i, &c) in classes.iter().enumerate() {
            if left_mask & (1 << i) != 0 {
                left.push(c);
            } else {
                right.push(c);
            }
        }
        let balanced = left.len().abs_diff(right.len()) <= 1;
        if q.strategy == Strategy::Balanced && !balanced {
            continue;
        }
        splits.push((left, right));
    }
    let removable = (q.lambda - 1).min(splits.len() - 1);
    let smaller = |s: &(Vec<usize>, Vec<usize>)| s.0.len().min(s.1.len());
    let mut ranked: Vec<usize> = (0..splits.len()).collect();
    match q.removal_policy {
        RemovalPolicy::BalancedRemoval => ranked.sort_by_key(|&i| std::cmp::Reverse(smaller(&splits[i]))),
        _ => ranked.sort_by_key(|&i| smaller(&splits[i])),
    }
    let removed: HashSet<usize> = ranked.into_iter().take(removable).collect();

    let mut out = Vec::new();
    for (i, (left, right)) in splits.iter().enumerate() {
        if removed.contains(&i) {
            continue;
        }
        let lt = enumerate_trees(left, q);
        let rt = enumerate_trees(right, q);
        for l in &lt {
            for r in &rt {
                out.push(format!("({l}|{r})"));
            }
        }
    }
    out
}

/// Unrestricted growth value for a strategy.
pub fn growth(n: usize, strategy: Strategy) -> GrowthValue {
    match strategy {
        Strategy::Random => GrowthValue::Exact(growth_random(n)),
        Strategy::Balanced => GrowthValue::Exact(growth_balanced(n)),
        Strategy::RandomPair => GrowthValue::Estimate(growth_random_pair_estimate(n)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GrowthValue {
    Exact(BigUint),
    Estimate(f64),
}

impl std::fmt::Display for GrowthValue {
    /// Exact values print as decimal integers; estimates with six
    /// significant digits followed by `estimate`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GrowthValue::Exact(v) => write!(f, "{v}"),
            GrowthValue::Estimate(v) => write!(f, "{} estimate", six_significant(*v)),
        }
    }
}

fn six_significant(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = 5 - magnitude;
    if decimals >= 0 {
        format!("{:.*}", decimals as usize, v)
    } else {
        let unit = 10f64.powi(-decimals);
        format!("{:.0}", (v / unit).round() * unit)
    }
}

impl GrowthValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            GrowthValue::Exact(v) => v.to_f64().unwrap_or(f64::INFINITY),
            GrowthValue::Estimate(v) => *v,
        }
    }
}
