#![allow(dead_code)]

use nested_dichotomies::data::synthetic::GaussianBlobs;
use nested_dichotomies::seed;
use nested_dichotomies::{Dataset, Value};
use rand_distr::{Distribution, StandardNormal};

pub fn blobs(classes: usize, instances: usize, features: usize, seed: u64) -> Dataset {
    GaussianBlobs {
        classes,
        instances,
        features,
        spread: 1.5,
        seed,
    }
    .generate()
}

/// Raw numeric instances drawn from N(0, 3²) per attribute.
pub fn random_instances(count: usize, width: usize, key: u64) -> Vec<Vec<Value>> {
    let mut rng = seed::stream(key);
    (0..count)
        .map(|_| {
            (0..width)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    Value::Numeric(3.0 * z)
                })
                .collect()
        })
        .collect()
}

/// Runs `f` inside a dedicated pool of `threads` workers.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}
