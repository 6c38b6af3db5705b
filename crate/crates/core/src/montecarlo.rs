//! Brute-force network simulation used as an independent oracle.
//!
//! Nodes are drawn directly on their spherical caps: a uniform point on a cap
//! has a uniform depth below the pole, and by rotational symmetry the
//! distance to an on-axis observer depends on the depth only. Ring sampling
//! (the planar equivalent) is available for testing that equivalence itself.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::antenna::{effective_gain, BsLevel};
use crate::error::Result;
use crate::fading::{NakagamiParams, PowerFading, ShadowedRicianParams};
use crate::geometry::{cap_bounds_dl, cap_bounds_ul, CapBounds, NodeKind};
use crate::scenario::{ScenarioConfig, SharingConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplingMode {
    /// Points on the spherical cap.
    Cap,
    /// Points on the equivalent planar ring with rescaled density.
    Ring,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    pub sampling: SamplingMode,
    /// Inner exclusion radius of the terrestrial-user disk around a
    /// satellite user. Zero by default.
    pub ut_inner_exclusion: f64,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            sampling: SamplingMode::Cap,
            ut_inner_exclusion: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    /// `f64::INFINITY` when served with no interference and no noise.
    pub sinr: f64,
    pub serving_distance: f64,
    pub served: bool,
    pub interference_satellite_tier: f64,
    pub interference_terrestrial_tier: f64,
}

impl TrialResult {
    pub fn interference_free(&self) -> bool {
        self.served && self.sinr.is_infinite()
    }

    /// `log2(1 + SINR)`, zero when unserved.
    pub fn spectral_efficiency(&self) -> f64 {
        if self.served {
            self.sinr.ln_1p() / std::f64::consts::LN_2
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    /// Unserved trials count as zero.
    pub ergodic_se: EstimateWithCI,
    /// Over served trials only.
    pub conditional_se: EstimateWithCI,
    pub coverage: Vec<(f64, EstimateWithCI)>,
    /// Mean terrestrial-tier interference over all trials.
    pub mean_interference: EstimateWithCI,
    /// Mean same-tier satellite interference over served trials.
    pub mean_satellite_interference: EstimateWithCI,
    pub nonempty: EstimateWithCI,
}

#[derive(Debug, Clone, Copy)]
enum Region {
    /// Cap of radius `radius`, `height` deep, observer on axis at `observer`.
    Cap {
        radius: f64,
        height: f64,
        observer: f64,
    },
    /// Planar annulus, distances measured in the plane.
    Annulus { inner: f64, outer: f64 },
}

impl Region {
    fn mean_count(&self, density: f64) -> f64 {
        match *self {
            Region::Cap { radius, height, .. } => density * 2.0 * PI * radius * height,
            Region::Annulus { inner, outer } => density * PI * (outer - inner) * (outer + inner),
        }
    }

    fn sample_distance<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        match *self {
            Region::Cap {
                radius,
                height,
                observer,
            } => {
                let h = height * u;
                let rho2 = h * (2.0 * radius - h);
                let dz = (observer - radius) + h;
                (rho2 + dz * dz).sqrt()
            }
            Region::Annulus { inner, outer } => {
                (inner * inner + u * (outer - inner) * (outer + inner)).sqrt()
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Gain {
    Fixed(f64),
    /// BS to satellite: lobe from elevation. Holds `sin psi1`, `sin psi2`,
    /// `R_s^2 - R_b^2`, `2 R_b` and the per-lobe gain-power products.
    BsElevation {
        sin_psi1: f64,
        sin_psi2: f64,
        radial: f64,
        two_rb: f64,
        main: f64,
        high: f64,
        low: f64,
    },
}

impl Gain {
    fn at(&self, d: f64) -> f64 {
        match *self {
            Gain::Fixed(g) => g,
            Gain::BsElevation {
                sin_psi1,
                sin_psi2,
                radial,
                two_rb,
                main,
                high,
                low,
            } => {
                let sin_psi = (radial - d * d) / (two_rb * d);
                if sin_psi <= sin_psi1 {
                    main
                } else if sin_psi <= sin_psi2 {
                    high
                } else {
                    low
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fading {
    ShadowedRician,
    Nakagami,
}

#[derive(Debug, Clone, Copy)]
struct Tier {
    region: Region,
    density: f64,
    gain: Gain,
    alpha: f64,
    fading: Fading,
}

/// Precomputed sampler for one scenario.
#[derive(Debug, Clone)]
pub struct Simulator {
    serving_region: Region,
    serving_density: f64,
    serving_gain: f64,
    same_tier_gain: f64,
    alpha_s: f64,
    terrestrial: Vec<Tier>,
    noise: f64,
    sr: ShadowedRicianParams,
    nakagami: NakagamiParams,
}

fn region_for(
    bounds: &CapBounds,
    radius: f64,
    observer: f64,
    density: f64,
    mode: SamplingMode,
) -> (Region, f64) {
    match mode {
        SamplingMode::Cap => (
            Region::Cap {
                radius,
                height: bounds.area / (2.0 * PI * radius),
                observer,
            },
            density,
        ),
        SamplingMode::Ring => (
            Region::Annulus {
                inner: bounds.r_min,
                outer: bounds.r_max,
            },
            density * radius / observer,
        ),
    }
}

fn path_loss(d: f64, alpha: f64) -> f64 {
    if alpha == 2.0 {
        1.0 / (d * d)
    } else if alpha == 4.0 {
        let q = d * d;
        1.0 / (q * q)
    } else {
        d.powf(-alpha)
    }
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    Poisson::new(mean)
        .expect("finite positive mean")
        .sample(rng) as u64
}

impl Simulator {
    pub fn new(config: &ScenarioConfig, opts: &McOptions) -> Result<Self> {
        use NodeKind::*;
        config.validate()?;
        let g = &config.geometry;
        let gains = &config.gains;
        let d = &config.densities;
        let p = &config.powers;
        let na = BsLevel::NotApplicable;
        let mode = opts.sampling;
        let mut terrestrial = Vec::new();

        let (serving_region, serving_density, serving_gain, same_tier_gain) =
            if config.sharing.is_uplink() {
                let b = cap_bounds_ul(g, SatUser)?;
                let (region, dens) = region_for(&b, g.r_us, g.r_s, d.lambda_us, mode);
                (
                    region,
                    dens,
                    effective_gain(gains, SatUser, Satellite, true, na)? * p.p_us,
                    effective_gain(gains, SatUser, Satellite, false, na)? * p.p_us,
                )
            } else {
                let b = cap_bounds_dl(g, Satellite)?;
                let (region, dens) = region_for(&b, g.r_s, g.r_us, d.lambda_s, mode);
                (
                    region,
                    dens,
                    effective_gain(gains, Satellite, SatUser, true, na)? * p.p_s,
                    effective_gain(gains, Satellite, SatUser, false, na)? * p.p_s,
                )
            };

        match config.sharing {
            SharingConfig::UlDlTerr => {
                let b = cap_bounds_ul(g, BaseStation)?;
                let (region, density) = region_for(&b, g.r_b, g.r_s, d.lambda_b, mode);
                let lobe = |level| -> Result<f64> {
                    Ok(effective_gain(gains, BaseStation, Satellite, false, level)? * p.p_b)
                };
                terrestrial.push(Tier {
                    region,
                    density,
                    gain: Gain::BsElevation {
                        sin_psi1: g.psi1_th.sin(),
                        sin_psi2: g.psi2_th.sin(),
                        radial: (g.r_s - g.r_b) * (g.r_s + g.r_b),
                        two_rb: 2.0 * g.r_b,
                        main: lobe(BsLevel::Main)?,
                        high: lobe(BsLevel::High)?,
                        low: lobe(BsLevel::Low)?,
                    },
                    alpha: config.alpha_s,
                    fading: Fading::ShadowedRician,
                });
            }
            SharingConfig::UlUlTerr => {
                let b = cap_bounds_ul(g, TerrUser)?;
                let (region, density) = region_for(&b, g.r_ut, g.r_s, d.lambda_ut, mode);
                terrestrial.push(Tier {
                    region,
                    density,
                    gain: Gain::Fixed(
                        effective_gain(gains, TerrUser, Satellite, false, na)? * p.p_ut,
                    ),
                    alpha: config.alpha_s,
                    fading: Fading::ShadowedRician,
                });
            }
            SharingConfig::DlDlTerr => {
                let b = cap_bounds_dl(g, BaseStation)?;
                let (region, density) = region_for(&b, g.r_b, g.r_us, d.lambda_b, mode);
                terrestrial.push(Tier {
                    region,
                    density,
                    gain: Gain::Fixed(
                        effective_gain(gains, BaseStation, SatUser, false, BsLevel::High)? * p.p_b,
                    ),
                    alpha: config.alpha_t,
                    fading: Fading::Nakagami,
                });
            }
            SharingConfig::DlUlTerr => {
                terrestrial.push(Tier {
                    region: Region::Annulus {
                        inner: opts.ut_inner_exclusion.min(g.r_max_ut_us),
                        outer: g.r_max_ut_us,
                    },
                    density: d.lambda_ut,
                    gain: Gain::Fixed(
                        effective_gain(gains, TerrUser, SatUser, false, na)? * p.p_ut,
                    ),
                    alpha: config.alpha_t,
                    fading: Fading::Nakagami,
                });
            }
        }

        Ok(Simulator {
            serving_region,
            serving_density,
            serving_gain,
            same_tier_gain,
            alpha_s: config.alpha_s,
            terrestrial,
            noise: config.noise_power,
            sr: config.sr.clone(),
            nakagami: config.nakagami,
        })
    }

    /// Per-trial generator: ChaCha8 keyed by the master seed, stream = trial.
    pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(trial);
        rng
    }

    fn fade<R: Rng + ?Sized>(&self, f: Fading, rng: &mut R) -> f64 {
        match f {
            Fading::ShadowedRician => self.sr.sample(rng),
            Fading::Nakagami => self.nakagami.sample(rng),
        }
    }

    fn terrestrial_interference<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut total = 0.0;
        for t in &self.terrestrial {
            let n = poisson(t.region.mean_count(t.density), rng);
            for _ in 0..n {
                let d = t.region.sample_distance(rng);
                total += t.gain.at(d) * self.fade(t.fading, rng) * path_loss(d, t.alpha);
            }
        }
        total
    }

    fn serving_tier_distances<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let n = poisson(self.serving_region.mean_count(self.serving_density), rng);
        (0..n)
            .map(|_| self.serving_region.sample_distance(rng))
            .collect()
    }

    pub fn run_trial(&self, master_seed: u64, trial: u64) -> TrialResult {
        let mut rng = Self::trial_rng(master_seed, trial);
        let distances = self.serving_tier_distances(&mut rng);
        let i_t = self.terrestrial_interference(&mut rng);
        let nearest = distances.iter().copied().fold(f64::INFINITY, f64::min);
        if distances.is_empty() {
            return TrialResult {
                sinr: 0.0,
                serving_distance: f64::NAN,
                served: false,
                interference_satellite_tier: 0.0,
                interference_terrestrial_tier: i_t,
            };
        }
        let mut i_s = 0.0;
        let mut serving_seen = false;
        let mut signal = 0.0;
        for &d in &distances {
            let h = self.sr.sample(&mut rng);
            if d == nearest && !serving_seen {
                serving_seen = true;
                signal = self.serving_gain * h * path_loss(d, self.alpha_s);
            } else {
                i_s += self.same_tier_gain * h * path_loss(d, self.alpha_s);
            }
        }
        let denom = i_s + i_t + self.noise;
        let sinr = if denom > 0.0 {
            signal / denom
        } else {
            f64::INFINITY
        };
        TrialResult {
            sinr,
            serving_distance: nearest,
            served: true,
            interference_satellite_tier: i_s,
            interference_terrestrial_tier: i_t,
        }
    }

    /// Interference plus noise with the serving node pinned at distance `r`:
    /// same-tier nodes closer than `r` are discarded, which for a PPP is the
    /// law of the other nodes given the nearest at `r`.
    pub fn interference_given_distance<R: Rng + ?Sized>(&self, r: f64, rng: &mut R) -> f64 {
        let mut i_s = 0.0;
        for d in self.serving_tier_distances(rng) {
            let h = self.sr.sample(rng);
            if d > r {
                i_s += self.same_tier_gain * h * path_loss(d, self.alpha_s);
            }
        }
        i_s + self.terrestrial_interference(rng) + self.noise
    }

    pub fn serving_gain_power(&self) -> f64 {
        self.serving_gain
    }

    pub fn estimate(&self, n_trials: u64, master_seed: u64, gamma_grid: &[f64]) -> McEstimate {
        let trials: Vec<TrialResult> = (0..n_trials)
            .into_par_iter()
            .map(|i| self.run_trial(master_seed, i))
            .collect();
        summarize(&trials, master_seed, gamma_grid)
    }
}

/// Pairwise summation in index order; independent of thread scheduling.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Sample mean and its standard error.
pub fn mean_with_ci(xs: &[f64], seed: u64) -> EstimateWithCI {
    let n = xs.len();
    if n == 0 {
        return EstimateWithCI {
            estimate: f64::NAN,
            std_error: f64::NAN,
            trials: 0,
            seed,
        };
    }
    let mean = pairwise_sum(xs) / n as f64;
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = if n > 1 {
        pairwise_sum(&dev) / (n - 1) as f64
    } else {
        0.0
    };
    EstimateWithCI {
        estimate: mean,
        std_error: (var / n as f64).sqrt(),
        trials: n as u64,
        seed,
    }
}

pub fn summarize(trials: &[TrialResult], seed: u64, gamma_grid: &[f64]) -> McEstimate {
    let se: Vec<f64> = trials.iter().map(|t| t.spectral_efficiency()).collect();
    let served: Vec<&TrialResult> = trials.iter().filter(|t| t.served).collect();
    let cond: Vec<f64> = served.iter().map(|t| t.spectral_efficiency()).collect();
    let indicator = |b: bool| if b { 1.0 } else { 0.0 };
    let coverage = gamma_grid
        .iter()
        .map(|&g| {
            let xs: Vec<f64> = trials
                .iter()
                .map(|t| indicator(t.served && t.sinr >= g))
                .collect();
            (g, mean_with_ci(&xs, seed))
        })
        .collect();
    let it: Vec<f64> = trials
        .iter()
        .map(|t| t.interference_terrestrial_tier)
        .collect();
    let is: Vec<f64> = served
        .iter()
        .map(|t| t.interference_satellite_tier)
        .collect();
    let ne: Vec<f64> = trials.iter().map(|t| indicator(t.served)).collect();
    McEstimate {
        ergodic_se: mean_with_ci(&se, seed),
        conditional_se: mean_with_ci(&cond, seed),
        coverage,
        mean_interference: mean_with_ci(&it, seed),
        mean_satellite_interference: mean_with_ci(&is, seed),
        nonempty: mean_with_ci(&ne, seed),
    }
}

/// One network realization of `config`, replayable from `(master_seed, trial)`.
pub fn run_trial(
    config: &ScenarioConfig,
    opts: &McOptions,
    master_seed: u64,
    trial: u64,
) -> Result<TrialResult> {
    Ok(Simulator::new(config, opts)?.run_trial(master_seed, trial))
}

/// Ergodic SE, coverage on `gamma_grid` and mean interference over
/// `n_trials` realizations.
pub fn estimate(
    config: &ScenarioConfig,
    opts: &McOptions,
    n_trials: u64,
    master_seed: u64,
    gamma_grid: &[f64],
) -> Result<McEstimate> {
    Ok(Simulator::new(config, opts)?.estimate(n_trials.max(1), master_seed, gamma_grid))
}
