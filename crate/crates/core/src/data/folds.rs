use rand::seq::SliceRandom;
use rand::Rng;

use super::Dataset;
use crate::error::{Error, Result};
use crate::seed;

/// Partitions `0..labels.len()` into `k` stratified folds.
///
/// Each class's instances are shuffled, classes are concatenated in index
/// order and positions are dealt round-robin, so per-class counts (and fold
/// sizes) differ by at most one between folds.
pub fn stratified_folds_for_labels(labels: &[usize], n_classes: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k == 0 {
        return Err(Error::usage("number of folds must be positive"));
    }
    if k > labels.len() {
        return Err(Error::usage(format!(
            "{k} folds requested for {} instances",
            labels.len()
        )));
    }
    let mut rng = seed::stream(seed);
    let mut by_class = vec![Vec::new(); n_classes];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l].push(i);
    }
    let mut folds = vec![Vec::new(); k];
    let mut pos = 0;
    for members in &mut by_class {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            folds[pos % k].push(i);
            pos += 1;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

pub fn stratified_folds(d: &Dataset, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    stratified_folds_for_labels(d.labels(), d.n_classes(), k, seed)
}

/// `n` uniform draws with replacement from `0..n`.
pub fn bootstrap_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = seed::stream(seed);
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

/// Bootstrap replicate of `d`; weights are reset to one.
pub fn bootstrap_sample(d: &Dataset, seed: u64) -> Dataset {
    let idx = bootstrap_indices(d.len(), seed);
    let sample = d.subset(&idx).expect("subset of a valid dataset");
    let ones = vec![1.0; sample.len()];
    sample.reweighted(ones).expect("unit weights are valid")
}
