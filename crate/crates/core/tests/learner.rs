use nested_dichotomies::data::Matrix;
use nested_dichotomies::learner::{objective, train_binary_traced, BinaryProblem};
use nested_dichotomies::seed;
use nested_dichotomies::{train_binary, BinaryLearnerConfig, Side};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

struct Fixture {
    x: Matrix<f64>,
    targets: Vec<bool>,
    weights: Vec<f64>,
}

fn fixture(rows: usize, cols: usize, key: u64) -> Fixture {
    let mut rng = seed::stream(key);
    let data: Vec<Vec<f64>> = (0..rows)
        .map(|_| (0..cols).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    Fixture {
        x: Matrix::from_rows(&data).unwrap(),
        targets: (0..rows).map(|_| rng.random_bool(0.5)).collect(),
        weights: (0..rows).map(|_| rng.random_range(0.1..3.0)).collect(),
    }
}

impl Fixture {
    fn problem(&self) -> BinaryProblem<'_, f64> {
        BinaryProblem::new(
            &self.x,
            (0..self.x.n_rows()).collect(),
            self.targets.clone(),
            self.weights.clone(),
        )
        .unwrap()
    }
}

#[test]
fn gradient_matches_central_differences() {
    let f = fixture(40, 5, 7);
    let problem = f.problem();
    let ridge = 0.3;
    let mut rng = seed::stream(99);
    let h = 1e-6;
    for _ in 0..100 {
        let params: Vec<f64> = (0..6)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                2.0 * z
            })
            .collect();
        let (_, grad) = objective(&problem, &params, ridge);
        let fd: Vec<f64> = (0..params.len())
            .map(|j| {
                let mut up = params.clone();
                let mut down = params.clone();
                up[j] += h;
                down[j] -= h;
                (objective(&problem, &up, ridge).0 - objective(&problem, &down, ridge).0) / (2.0 * h)
            })
            .collect();
        let diff: f64 = grad.iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = grad.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-12);
        assert!(diff / norm <= 1e-4, "relative gradient error {}", diff / norm);
    }
}

#[test]
fn objective_never_increases_during_training() {
    for key in 0..10 {
        let f = fixture(60, 4, key);
        let trace = train_binary_traced(&f.problem(), &BinaryLearnerConfig::default(), Side::Left);
        for w in trace.objective_history.windows(2) {
            assert!(
                w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0),
                "{:?}",
                trace.objective_history
            );
        }
    }
}

#[test]
fn separable_data_is_fit_perfectly() {
    let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64 - 19.5, ((i * 7) % 5) as f64]).collect();
    let x = Matrix::from_rows(&rows).unwrap();
    let targets: Vec<bool> = (0..40).map(|i| i >= 20).collect();
    let problem = BinaryProblem::new(&x, (0..40).collect(), targets.clone(), vec![1.0; 40]).unwrap();
    let model = train_binary(&problem, &BinaryLearnerConfig::default(), Side::Left);
    for (row, t) in rows.iter().zip(&targets) {
        assert_eq!(model.predict(row).unwrap() >= 0.5, *t);
    }
}

#[test]
fn single_outcome_gives_laplace_constant() {
    let f = fixture(10, 2, 3);
    let problem = BinaryProblem::new(&f.x, (0..10).collect(), vec![true; 10], vec![1.0; 10]).unwrap();
    let model = train_binary(&problem, &BinaryLearnerConfig::default(), Side::Left);
    assert_eq!(model.predict(f.x.row(0)).unwrap(), 11.0 / 12.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn uniform_weight_scaling_leaves_the_fit_unchanged(key in 0u64..1000, scale in 0.5f64..4.0) {
        let f = fixture(30, 3, key);
        let config = BinaryLearnerConfig { ridge: 0.0, ..BinaryLearnerConfig::default() };
        let base = train_binary(&f.problem(), &config, Side::Left);
        let scaled_w: Vec<f64> = f.weights.iter().map(|w| w * scale).collect();
        let scaled = BinaryProblem::new(&f.x, (0..30).collect(), f.targets.clone(), scaled_w).unwrap();
        let other = train_binary(&scaled, &config, Side::Left);
        for i in 0..30 {
            let a = base.predict(f.x.row(i)).unwrap();
            let b = other.predict(f.x.row(i)).unwrap();
            prop_assert!((a - b).abs() < 1e-6, "{} vs {}", a, b);
        }
    }

    #[test]
    fn predictions_are_probabilities(key in 0u64..1000) {
        let f = fixture(25, 3, key);
        let model = train_binary(&f.problem(), &BinaryLearnerConfig::default(), Side::Right);
        for i in 0..25 {
            let p = model.probability_of(Side::Left, f.x.row(i)).unwrap();
            let q = model.probability_of(Side::Right, f.x.row(i)).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!((p + q - 1.0).abs() < 1e-15);
        }
    }
}
