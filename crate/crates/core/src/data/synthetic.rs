//! Seeded Gaussian class-blob generator used by tests, benchmarks and the
//! acceptance suite.

use rand::Rng;

use super::{Attribute, Dataset, Schema, Value};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBlobs {
    pub classes: usize,
    pub instances: usize,
    pub features: usize,
    /// Standard deviation of the class centres; instance noise has unit variance.
    pub spread: f64,
    pub seed: u64,
}

impl Default for GaussianBlobs {
    fn default() -> Self {
        GaussianBlobs {
            classes: 8,
            instances: 2000,
            features: 10,
            spread: 1.0,
            seed: seed::DEFAULT_SEED,
        }
    }
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

impl GaussianBlobs {
    /// Instance `i` belongs to class `i % classes`.
    pub fn generate(&self) -> Dataset {
        assert!(self.classes >= 2 && self.instances >= self.classes);
        let mut rng = seed::stream(self.seed);
        let centres: Vec<Vec<f64>> = (0..self.classes)
            .map(|_| {
                (0..self.features)
                    .map(|_| self.spread * standard_normal(&mut rng))
                    .collect()
            })
            .collect();
        let mut rows = Vec::with_capacity(self.instances);
        let mut labels = Vec::with_capacity(self.instances);
        for i in 0..self.instances {
            let c = i % self.classes;
            rows.push(
                centres[c]
                    .iter()
                    .map(|m| Value::Numeric(m + standard_normal(&mut rng)))
                    .collect(),
            );
            labels.push(c);
        }
        let schema = Schema {
            attributes: (0..self.features)
                .map(|j| Attribute::numeric(format!("x{j}")))
                .collect(),
            class_attribute: "class".into(),
            classes: (0..self.classes).map(|c| format!("c{c}")).collect(),
        };
        Dataset::new(schema, rows, labels).expect("generated dataset is valid")
    }
}
