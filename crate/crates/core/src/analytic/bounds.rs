//! Campbell mean interference, density-ratio thresholds and the Jensen-type
//! lower bound on ergodic SE.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fading::PowerFading;
use crate::scenario::{Direction, ScenarioConfig, SharingConfig};

use super::model::{power_integral, AnalyticModel, InterferenceTier, QuadratureConfig, TierStart};

fn tier_mean(model: &AnalyticModel, tier: &InterferenceTier, lo: f64) -> f64 {
    if !(tier.density > 0.0) || tier.end <= lo {
        return 0.0;
    }
    2.0 * PI
        * tier.density
        * tier.gain_power
        * model.fading_moment(tier.fading, 1)
        * power_integral(lo, tier.end, 1.0 - tier.alpha)
}

/// Mean aggregate terrestrial interference at the typical receiver, watts.
///
/// The disk of terrestrial users around a satellite user is cut at the
/// configured inner exclusion radius, without which the mean diverges for
/// `alpha_t > 2`.
pub fn mean_interference(config: &ScenarioConfig) -> Result<f64> {
    let model = AnalyticModel::new(config, QuadratureConfig::default())?;
    Ok(terrestrial_mean(&model))
}

fn terrestrial_mean(model: &AnalyticModel) -> f64 {
    model
        .tiers()
        .iter()
        .filter(|t| t.terrestrial)
        .map(|t| tier_mean(model, t, t.mean_inner))
        .sum()
}

/// Mean same-tier satellite interference given serving distance `r`.
fn satellite_mean_given(model: &AnalyticModel, r: f64) -> f64 {
    model
        .tiers()
        .iter()
        .filter(|t| !t.terrestrial)
        .map(|t| {
            let lo = match t.start {
                TierStart::Serving => r,
                TierStart::Fixed(lo) => lo,
            };
            tier_mean(model, t, lo)
        })
        .sum()
}

/// `lambda_ut / lambda_b` at which both terrestrial sharing modes produce the
/// same mean terrestrial interference.
pub fn density_ratio_threshold(config: &ScenarioConfig, direction: Direction) -> Result<f64> {
    if config.alpha_s != 2.0 {
        return Err(Error::Unsupported(format!(
            "density-ratio threshold needs alpha_s = 2, got {}",
            config.alpha_s
        )));
    }
    if direction == Direction::Dl && config.alpha_t != 4.0 {
        return Err(Error::Unsupported(format!(
            "DL density-ratio threshold needs alpha_t = 4, got {}",
            config.alpha_t
        )));
    }
    let [bs_mode, ut_mode] = SharingConfig::for_direction(direction);
    let mut bs = config.with_sharing(bs_mode);
    bs.densities.lambda_b = 1.0;
    let mut ut = config.with_sharing(ut_mode);
    ut.densities.lambda_ut = 1.0;
    let per_bs = mean_interference(&bs)?;
    let per_ut = mean_interference(&ut)?;
    if !(per_ut > 0.0) {
        return Err(Error::Domain(
            "terrestrial users cause no mean interference".into(),
        ));
    }
    Ok(per_bs / per_ut)
}

/// Components of the lower bound, useful for reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundParts {
    pub nonempty_probability: f64,
    pub log_signal_mean: f64,
    pub satellite_interference_mean: f64,
    pub terrestrial_interference_mean: f64,
    pub noise_power: f64,
    pub value: f64,
}

/// `P[nonempty] log2(1 + exp(E[ln S]) / (E[I_s] + E[I_t] + sigma^2))`, with
/// the satellite-tier mean taken conditionally on the serving distance.
pub fn se_lower_bound_parts(config: &ScenarioConfig) -> Result<LowerBoundParts> {
    let model = AnalyticModel::new(config, QuadratureConfig::default())?;
    let pne = model.nonempty_probability();
    let it = terrestrial_mean(&model);
    let noise = model.noise_power();
    if pne == 0.0 {
        return Ok(LowerBoundParts {
            nonempty_probability: 0.0,
            log_signal_mean: f64::NEG_INFINITY,
            satellite_interference_mean: 0.0,
            terrestrial_interference_mean: it,
            noise_power: noise,
            value: 0.0,
        });
    }
    let serving = *model.serving();
    let ln_r = model.serving_expectation(|r| Ok(r.ln()), "log serving distance")? / pne;
    let is =
        model.serving_expectation(|r| Ok(satellite_mean_given(&model, r)), "satellite mean")? / pne;
    let ln_s = serving.gain_power.ln() + model.shadowed_rician().log_mean() - serving.alpha * ln_r;
    let value = pne * (ln_s - (is + it + noise).ln()).exp().ln_1p() / std::f64::consts::LN_2;
    Ok(LowerBoundParts {
        nonempty_probability: pne,
        log_signal_mean: ln_s,
        satellite_interference_mean: is,
        terrestrial_interference_mean: it,
        noise_power: noise,
        value,
    })
}

pub fn se_lower_bound(config: &ScenarioConfig) -> Result<f64> {
    Ok(se_lower_bound_parts(config)?.value)
}
