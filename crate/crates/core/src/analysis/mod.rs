//! Growth functions, the order-statistic error model and the empirical
//! RMSE-distribution experiment.

pub mod distribution;
pub mod growth;
pub mod normal;
pub mod order_stat;

pub use distribution::{rmse_distribution, LambdaSummary, RmseDistributionConfig, RmseDistributionReport};
pub use growth::{
    growth, growth_balanced, growth_random, growth_random_pair_estimate, growth_restricted, random_pair_polynomial,
    split_shapes, CountMethod, GrowthQuery, GrowthValue, RemovalPolicy, MAX_ENUMERATION_CLASSES,
};
pub use normal::{erfc, inverse_normal_cdf, normal_cdf, normal_pdf};
pub use order_stat::{expected_min_normal, OrderStatQuery, DEFAULT_ALPHA};
