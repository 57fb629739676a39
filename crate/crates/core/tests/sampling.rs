//! Split samplers draw whole trees uniformly from their strategy's space.

mod common;

use std::collections::HashMap;

use nested_dichotomies::analysis::{growth_balanced, growth_random};
use nested_dichotomies::dichotomy::{sample_balanced_split, sample_random_split};
use nested_dichotomies::seed;
use nested_dichotomies::{build_tree, BinaryLearnerConfig, ClassSet, SplitterSpec, Strategy};
use num_traits::ToPrimitive;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn shape(
    classes: &ClassSet,
    draw: &impl Fn(&ClassSet, &mut seed::Stream) -> ClassSet,
    rng: &mut seed::Stream,
) -> String {
    if classes.len() == 1 {
        return classes.members()[0].to_string();
    }
    let left = draw(classes, rng);
    let right = ClassSet::new(
        classes
            .members()
            .iter()
            .copied()
            .filter(|c| !left.contains(*c))
            .collect(),
    )
    .unwrap();
    let (l, r) = (shape(&left, draw, rng), shape(&right, draw, rng));
    // order children by their smallest class so the key ignores side order
    if left.members().iter().min() < right.members().iter().min() {
        format!("({l}|{r})")
    } else {
        format!("({r}|{l})")
    }
}

fn chi_square_p(counts: &HashMap<String, usize>, categories: usize, draws: usize) -> f64 {
    let expected = draws as f64 / categories as f64;
    let stat: f64 = counts
        .values()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum::<f64>()
        + (categories - counts.len()) as f64 * expected;
    1.0 - ChiSquared::new((categories - 1) as f64).unwrap().cdf(stat)
}

fn sample_shapes(
    n: usize,
    draws: usize,
    sampler: impl Fn(&ClassSet, &mut seed::Stream) -> ClassSet,
) -> HashMap<String, usize> {
    let mut rng = seed::stream(2024);
    let mut counts = HashMap::new();
    for _ in 0..draws {
        *counts
            .entry(shape(&ClassSet::range(n), &sampler, &mut rng))
            .or_insert(0) += 1;
    }
    counts
}

#[test]
fn random_sampler_is_uniform_over_trees() {
    for (n, draws) in [(3, 6_000), (4, 15_000), (5, 30_000)] {
        let counts = sample_shapes(n, draws, |c, rng| sample_random_split(c, rng).unwrap().left);
        let total = growth_random(n).to_usize().unwrap();
        assert_eq!(counts.len(), total, "n = {n}");
        let p = chi_square_p(&counts, total, draws);
        assert!(p > 0.001, "n = {n}: p = {p}");
    }
}

#[test]
fn balanced_sampler_is_uniform_over_trees() {
    for (n, draws) in [(4, 6_000), (5, 15_000), (6, 30_000)] {
        let counts = sample_shapes(n, draws, |c, rng| sample_balanced_split(c, rng).unwrap().left);
        let total = growth_balanced(n).to_usize().unwrap();
        assert_eq!(counts.len(), total, "n = {n}");
        let p = chi_square_p(&counts, total, draws);
        assert!(p > 0.001, "n = {n}: p = {p}");
    }
}

#[test]
fn built_trees_are_uniform_with_one_candidate() {
    let data = common::blobs(4, 24, 1, 5);
    let encoded = nested_dichotomies::data::encode::<f64>(&data);
    let draws = 3_000;
    let mut counts = HashMap::new();
    let mut rng = seed::stream(77);
    for _ in 0..draws {
        let spec = SplitterSpec::new(Strategy::Random, 1).with_seed(rng.random());
        let tree = build_tree(&encoded, &spec, &BinaryLearnerConfig::default()).unwrap();
        *counts.entry(tree.shape_key()).or_insert(0) += 1;
    }
    assert_eq!(counts.len(), 15);
    let p = chi_square_p(&counts, 15, draws);
    assert!(p > 0.001, "p = {p}");
}
