mod common;

use nested_dichotomies::data::encode;
use nested_dichotomies::dichotomy::{evaluate_split, NodeView};
use nested_dichotomies::{
    build_nd, build_tree, select_split, BinaryLearnerConfig, ClassSet, Dataset, ModelFile, ModelSpec, SplitterSpec,
    Strategy, TrainedModel,
};
use proptest::prelude::*;

const STRATEGIES: [Strategy; 3] = [Strategy::Random, Strategy::Balanced, Strategy::RandomPair];

#[test]
fn selection_returns_the_minimal_candidate() {
    let data = common::blobs(6, 240, 4, 11);
    let encoded = encode::<f64>(&data);
    let learner = BinaryLearnerConfig::default();
    let node = NodeView::all(&encoded);
    let classes = ClassSet::range(6);
    for strategy in STRATEGIES {
        for key in 0..20u64 {
            let spec = SplitterSpec::new(strategy, 5);
            let sel = select_split(&node, &classes, &spec, &learner, key).unwrap();
            assert_eq!(sel.candidates.len(), 5);
            for c in &sel.candidates {
                // re-evaluate independently
                let (_, err) = evaluate_split(&node, &c.split, &learner).unwrap();
                assert_eq!(err, c.train_rmse);
                assert!(sel.train_rmse <= c.train_rmse);
            }
            let first_min = sel
                .candidates
                .iter()
                .position(|c| c.train_rmse == sel.train_rmse)
                .unwrap();
            assert_eq!(sel.chosen, first_min);
            assert_eq!(sel.split, sel.candidates[sel.chosen].split);
        }
    }
}

#[test]
fn threshold_above_class_count_draws_one_candidate() {
    let data = common::blobs(5, 100, 3, 3);
    let encoded = encode::<f64>(&data);
    let node = NodeView::all(&encoded);
    for strategy in STRATEGIES {
        let spec = SplitterSpec::new(strategy, 7).with_class_threshold(6);
        let sel = select_split(&node, &ClassSet::range(5), &spec, &BinaryLearnerConfig::default(), 1).unwrap();
        assert_eq!(sel.candidates.len(), 1);
        assert_eq!(sel.chosen, 0);
    }
}

#[test]
fn trees_cover_every_class_once() {
    let data = common::blobs(7, 210, 3, 8);
    let encoded = encode::<f64>(&data);
    for strategy in STRATEGIES {
        for lambda in [1, 3] {
            let tree = build_tree(
                &encoded,
                &SplitterSpec::new(strategy, lambda),
                &BinaryLearnerConfig::default(),
            )
            .unwrap();
            tree.validate().unwrap();
            assert_eq!(tree.internal_count(), 6);
            if strategy == Strategy::Balanced {
                assert_eq!(tree.depth(), 3);
            }
        }
    }
}

#[test]
fn predictions_sum_to_one() {
    let data = common::blobs(6, 180, 4, 21);
    let instances = common::random_instances(1000, 4, 5);
    for strategy in STRATEGIES {
        let nd = build_nd::<f64>(&data, &SplitterSpec::new(strategy, 3), &BinaryLearnerConfig::default()).unwrap();
        for row in &instances {
            let p = nd.predict(row).unwrap();
            assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }
}

#[test]
fn single_precision_trees() {
    let data = common::blobs(4, 120, 3, 2);
    let nd = build_nd::<f32>(
        &data,
        &SplitterSpec::new(Strategy::Random, 2),
        &BinaryLearnerConfig::default(),
    )
    .unwrap();
    for row in common::random_instances(50, 3, 1) {
        let p = nd.predict(&row).unwrap();
        assert!((p.iter().sum::<f32>() - 1.0).abs() <= 1e-5);
    }
}

#[test]
fn absent_classes_get_a_neutral_leaf() {
    let full = common::blobs(5, 100, 2, 4);
    let keep: Vec<usize> = (0..full.len()).filter(|&i| full.labels()[i] != 2).collect();
    let data = full.subset(&keep).unwrap();
    let nd = build_nd::<f64>(
        &data,
        &SplitterSpec::new(Strategy::Random, 2),
        &BinaryLearnerConfig::default(),
    )
    .unwrap();
    nd.tree.validate().unwrap();
    for row in common::random_instances(20, 2, 9) {
        let p = nd.predict(&row).unwrap();
        // class 2 hangs beside class 1 under a 0.5/0.5 node
        assert!((p[2] - p[1]).abs() < 1e-15);
    }
}

fn model_json(data: &Dataset, spec: &ModelSpec) -> String {
    let model = TrainedModel::<f64>::fit(data, spec).unwrap();
    ModelFile::new(&model, data.schema(), spec).to_json().unwrap()
}

#[test]
fn thread_count_does_not_change_models() {
    let data = common::blobs(8, 400, 5, 17);
    for strategy in STRATEGIES {
        let spec = ModelSpec::single(SplitterSpec::new(strategy, 4).with_seed(5));
        let one = common::with_threads(1, || model_json(&data, &spec));
        let many = common::with_threads(6, || model_json(&data, &spec));
        assert_eq!(one, many);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn same_seed_same_tree(seed in any::<u64>(), lambda in 1usize..4) {
        let data = common::blobs(5, 100, 3, 6);
        let spec = SplitterSpec::new(Strategy::Random, lambda).with_seed(seed);
        let a = build_nd::<f64>(&data, &spec, &BinaryLearnerConfig::default()).unwrap();
        let b = build_nd::<f64>(&data, &spec, &BinaryLearnerConfig::default()).unwrap();
        prop_assert_eq!(a, b);
    }
}
