//! Closed-form and quadrature evaluation of nearest-distance laws, interference
//! Laplace transforms, coverage, ergodic spectral efficiency, mean
//! interference, density-ratio thresholds and SE lower bounds.

mod bounds;
mod distance;
mod model;

pub use bounds::{
    density_ratio_threshold, mean_interference, se_lower_bound, se_lower_bound_parts,
    LowerBoundParts,
};
pub use distance::{nearest_distance_cdf, nearest_distance_pdf, nonempty_probability};
pub use model::{
    interference_tiers, serving_link, AnalyticModel, GammaTransform, InterferenceTier,
    QuadratureConfig, ServingLink, TierFading, TierStart,
};

use crate::error::Result;
use crate::scenario::ScenarioConfig;

/// Laplace transform of interference plus noise at serving distance `r`.
pub fn laplace_interference(config: &ScenarioConfig, r: f64, s: f64) -> Result<f64> {
    AnalyticModel::new(config, QuadratureConfig::default())?.laplace(r, s)
}

/// `v`-th derivative in `s` of [`laplace_interference`].
pub fn laplace_derivative(config: &ScenarioConfig, r: f64, s: f64, v: u32) -> Result<f64> {
    AnalyticModel::new(config, QuadratureConfig::default())?.laplace_derivative(r, s, v)
}

pub fn coverage_probability(config: &ScenarioConfig, gamma: f64) -> Result<f64> {
    AnalyticModel::new(config, QuadratureConfig::default())?.coverage(gamma)
}

pub fn ergodic_se(config: &ScenarioConfig) -> Result<f64> {
    AnalyticModel::new(config, QuadratureConfig::default())?.ergodic_se()
}
