//! Interference tiers, Laplace transforms, coverage and ergodic SE.
//!
//! Every interfering tier is a homogeneous planar PPP on a ring or disk after
//! the cap-to-ring replacement. With `x = s G P w^(-alpha)` the log-Laplace
//! transform of interference plus noise is
//!
//! ```text
//! g(s) = -s sigma^2 - sum_tiers 2 pi lambda int (1 - M(x)) w dw
//! ```
//!
//! and its scaled derivatives `h_j = s^j g^(j)(s)` are tier integrals of
//! `x^j M^(j)(x)`. Then `s^n L^(n) = L Y_n(h_1, ..., h_n)` with `Y_n` the
//! complete Bell polynomial.

use std::f64::consts::{LN_2, PI};

use crate::antenna::{effective_gain, BsLevel};
use crate::error::{Error, Result};
use crate::fading::{NakagamiParams, PowerFading, ShadowedRicianParams};
use crate::geometry::{cap_bounds_dl, cap_bounds_ul, distance_at_elevation, CapBounds, NodeKind};
use crate::quadrature::{geometric_breakpoints, integrate, QuadOptions};
use crate::scenario::{ScenarioConfig, SharingConfig};
use crate::special::{complete_bell, factorial, pochhammer};

use super::distance::{area_extent, distance_at_area, nonempty_probability};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaTransform {
    /// `gamma = t / (1 - t)`.
    Unit,
    /// `gamma = gamma0 t / (1 - t)` with `gamma0` the SINR threshold at which
    /// the median-distance conditional coverage is one half.
    MedianScaled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Relative tolerance of the outer SINR-threshold integral.
    pub rel_tol: f64,
    /// Absolute tolerance of probability-scale integrals.
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub radial_rel_tol: f64,
    pub coverage_rel_tol: f64,
    /// Area-coordinate cutoff for the serving-distance integral.
    pub area_cutoff: f64,
    pub gamma_transform: GammaTransform,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-5,
            abs_tol: 1e-12,
            max_subdivisions: 300,
            radial_rel_tol: 1e-7,
            coverage_rel_tol: 1e-6,
            area_cutoff: 60.0,
            gamma_transform: GammaTransform::MedianScaled,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        for (f, v) in [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("radial_rel_tol", self.radial_rel_tol),
            ("coverage_rel_tol", self.coverage_rel_tol),
            ("area_cutoff", self.area_cutoff),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(f, "must be positive"));
            }
        }
        if self.max_subdivisions == 0 {
            return Err(Error::invalid("max_subdivisions", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TierFading {
    ShadowedRician,
    Nakagami,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TierStart {
    /// Same tier as the server: interferers lie beyond the serving distance.
    Serving,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceTier {
    pub label: &'static str,
    /// Planar density on the equivalent ring or disk.
    pub density: f64,
    pub start: TierStart,
    pub end: f64,
    /// Effective gain times transmit power.
    pub gain_power: f64,
    pub alpha: f64,
    pub fading: TierFading,
    pub terrestrial: bool,
    /// Inner radius used by mean-interference forms.
    pub mean_inner: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServingLink {
    pub density: f64,
    pub bounds: CapBounds,
    pub gain_power: f64,
    pub alpha: f64,
}

pub(crate) fn path_loss(w: f64, alpha: f64) -> f64 {
    if alpha == 2.0 {
        1.0 / (w * w)
    } else if alpha == 4.0 {
        let q = w * w;
        1.0 / (q * q)
    } else {
        w.powf(-alpha)
    }
}

pub fn serving_link(config: &ScenarioConfig) -> Result<ServingLink> {
    let g = &config.geometry;
    let (kind, tx, rx) = if config.sharing.is_uplink() {
        (NodeKind::SatUser, NodeKind::SatUser, NodeKind::Satellite)
    } else {
        (NodeKind::Satellite, NodeKind::Satellite, NodeKind::SatUser)
    };
    let bounds = config.serving_bounds()?;
    let gain = effective_gain(&config.gains, tx, rx, true, BsLevel::NotApplicable)?;
    Ok(ServingLink {
        density: config.serving_density() * g.radius_of(kind) / config.observer_radius(),
        bounds,
        gain_power: gain * config.serving_power(),
        alpha: config.alpha_s,
    })
}

/// Interfering tiers of a sharing configuration, BS tiers split by lobe.
pub fn interference_tiers(config: &ScenarioConfig) -> Result<Vec<InterferenceTier>> {
    use NodeKind::*;
    let g = &config.geometry;
    let gains = &config.gains;
    let d = &config.densities;
    let p = &config.powers;
    let mut tiers = Vec::new();
    let na = BsLevel::NotApplicable;
    match config.sharing {
        SharingConfig::UlDlTerr | SharingConfig::UlUlTerr => {
            let us = cap_bounds_ul(g, SatUser)?;
            tiers.push(InterferenceTier {
                label: "satellite users",
                density: d.lambda_us * g.r_us / g.r_s,
                start: TierStart::Serving,
                end: us.r_max,
                gain_power: effective_gain(gains, SatUser, Satellite, false, na)? * p.p_us,
                alpha: config.alpha_s,
                fading: TierFading::ShadowedRician,
                terrestrial: false,
                mean_inner: us.r_min,
            });
            if config.sharing == SharingConfig::UlDlTerr {
                let b = cap_bounds_ul(g, BaseStation)?;
                // Nearer BSs see the satellite at higher elevation.
                let clamp = |r: f64| {
                    if r.is_nan() {
                        b.r_max
                    } else {
                        r.clamp(b.r_min, b.r_max)
                    }
                };
                let r_psi2 = clamp(distance_at_elevation(g.r_s, g.r_b, g.psi2_th));
                let r_psi1 = clamp(distance_at_elevation(g.r_s, g.r_b, g.psi1_th));
                let segments = [
                    (
                        "base stations (low side lobe)",
                        b.r_min,
                        r_psi2,
                        BsLevel::Low,
                    ),
                    (
                        "base stations (high side lobe)",
                        r_psi2,
                        r_psi1,
                        BsLevel::High,
                    ),
                    ("base stations (main lobe)", r_psi1, b.r_max, BsLevel::Main),
                ];
                for (label, lo, hi, level) in segments {
                    if hi > lo {
                        tiers.push(InterferenceTier {
                            label,
                            density: d.lambda_b * g.r_b / g.r_s,
                            start: TierStart::Fixed(lo),
                            end: hi,
                            gain_power: effective_gain(
                                gains,
                                BaseStation,
                                Satellite,
                                false,
                                level,
                            )? * p.p_b,
                            alpha: config.alpha_s,
                            fading: TierFading::ShadowedRician,
                            terrestrial: true,
                            mean_inner: lo,
                        });
                    }
                }
            } else {
                let ut = cap_bounds_ul(g, TerrUser)?;
                tiers.push(InterferenceTier {
                    label: "terrestrial users",
                    density: d.lambda_ut * g.r_ut / g.r_s,
                    start: TierStart::Fixed(ut.r_min),
                    end: ut.r_max,
                    gain_power: effective_gain(gains, TerrUser, Satellite, false, na)? * p.p_ut,
                    alpha: config.alpha_s,
                    fading: TierFading::ShadowedRician,
                    terrestrial: true,
                    mean_inner: ut.r_min,
                });
            }
        }
        SharingConfig::DlDlTerr | SharingConfig::DlUlTerr => {
            let s = cap_bounds_dl(g, Satellite)?;
            tiers.push(InterferenceTier {
                label: "satellites",
                density: d.lambda_s * g.r_s / g.r_us,
                start: TierStart::Serving,
                end: s.r_max,
                gain_power: effective_gain(gains, Satellite, SatUser, false, na)? * p.p_s,
                alpha: config.alpha_s,
                fading: TierFading::ShadowedRician,
                terrestrial: false,
                mean_inner: s.r_min,
            });
            if config.sharing == SharingConfig::DlDlTerr {
                let b = cap_bounds_dl(g, BaseStation)?;
                tiers.push(InterferenceTier {
                    label: "base stations",
                    density: d.lambda_b * g.r_b / g.r_us,
                    start: TierStart::Fixed(b.r_min),
                    end: b.r_max,
                    gain_power: effective_gain(gains, BaseStation, SatUser, false, BsLevel::High)?
                        * p.p_b,
                    alpha: config.alpha_t,
                    fading: TierFading::Nakagami,
                    terrestrial: true,
                    mean_inner: b.r_min,
                });
            } else {
                tiers.push(InterferenceTier {
                    label: "terrestrial users",
                    density: d.lambda_ut,
                    start: TierStart::Fixed(0.0),
                    end: g.r_max_ut_us,
                    gain_power: effective_gain(gains, TerrUser, SatUser, false, na)? * p.p_ut,
                    alpha: config.alpha_t,
                    fading: TierFading::Nakagami,
                    terrestrial: true,
                    mean_inner: g.eps_ut,
                });
            }
        }
    }
    Ok(tiers)
}

/// Analytic evaluator bound to one scenario.
#[derive(Debug, Clone)]
pub struct AnalyticModel {
    serving: ServingLink,
    tiers: Vec<InterferenceTier>,
    noise: f64,
    sr: ShadowedRicianParams,
    nakagami: NakagamiParams,
    qc: QuadratureConfig,
}

impl AnalyticModel {
    pub fn new(config: &ScenarioConfig, qc: QuadratureConfig) -> Result<Self> {
        config.validate()?;
        qc.validate()?;
        Ok(AnalyticModel {
            serving: serving_link(config)?,
            tiers: interference_tiers(config)?,
            noise: config.noise_power,
            sr: config.sr.clone(),
            nakagami: config.nakagami,
            qc,
        })
    }

    pub fn serving(&self) -> &ServingLink {
        &self.serving
    }

    pub fn tiers(&self) -> &[InterferenceTier] {
        &self.tiers
    }

    pub fn noise_power(&self) -> f64 {
        self.noise
    }

    pub fn shadowed_rician(&self) -> &ShadowedRicianParams {
        &self.sr
    }

    pub fn quadrature(&self) -> &QuadratureConfig {
        &self.qc
    }

    pub fn nonempty_probability(&self) -> f64 {
        nonempty_probability(self.serving.density, &self.serving.bounds)
    }

    fn check_distance(&self, r: f64) -> Result<()> {
        let b = &self.serving.bounds;
        if !(r >= b.r_min && r <= b.r_max) {
            return Err(Error::Domain(format!(
                "serving distance {r} m outside [{}, {}] m",
                b.r_min, b.r_max
            )));
        }
        Ok(())
    }

    fn tier_range(&self, tier: &InterferenceTier, r: f64) -> (f64, f64) {
        let lo = match tier.start {
            TierStart::Serving => r,
            TierStart::Fixed(lo) => lo,
        };
        (lo, tier.end)
    }

    /// `x^j M^(j)(x)` for `j >= 1`, `1 - M(x)` for `j = 0`.
    fn kernel(&self, fading: TierFading, x: f64, j: u32) -> f64 {
        match (fading, j) {
            (TierFading::ShadowedRician, 0) => self.sr.one_minus_laplace(x),
            (TierFading::Nakagami, 0) => self.nakagami.one_minus_laplace(x),
            (TierFading::ShadowedRician, j) => self.sr.scaled_laplace_derivative(x, j),
            (TierFading::Nakagami, j) => self.nakagami.scaled_laplace_derivative(x, j),
        }
    }

    /// `E[H^j]` of a tier's fading.
    pub fn fading_moment(&self, fading: TierFading, j: u32) -> f64 {
        match fading {
            TierFading::ShadowedRician => {
                let kappa = self.sr.kappa();
                self.sr
                    .weights()
                    .iter()
                    .enumerate()
                    .map(|(z, &w)| w * pochhammer(z as f64 + 1.0, j) / kappa.powi(j as i32))
                    .sum()
            }
            TierFading::Nakagami => {
                let m = f64::from(self.nakagami.m_t());
                pochhammer(m, j) / m.powi(j as i32)
            }
        }
    }

    /// `2 pi lambda int kernel_j(s G P w^-alpha) w dw` over the tier's range.
    fn tier_term(&self, tier: &InterferenceTier, r: f64, s: f64, j: u32) -> Result<f64> {
        let (lo, hi) = self.tier_range(tier, r);
        if !(tier.density > 0.0) || hi <= lo || s == 0.0 {
            return Ok(0.0);
        }
        let c = s * tier.gain_power;
        let alpha = tier.alpha;
        let mut bps = if lo <= 0.0 || hi > 8.0 * lo {
            geometric_breakpoints(lo, hi, 1e-8, 4.0)
        } else {
            Vec::new()
        };
        let w_star = c.powf(1.0 / alpha);
        if w_star > lo && w_star < hi {
            bps.push(w_star);
        }
        let opts = QuadOptions {
            rel_tol: self.qc.radial_rel_tol,
            abs_tol: 0.0,
            max_subdivisions: self.qc.max_subdivisions,
        };
        let res = integrate(
            |w| {
                if w <= 0.0 {
                    return 0.0;
                }
                self.kernel(tier.fading, c * path_loss(w, alpha), j) * w
            },
            lo,
            hi,
            &bps,
            &opts,
        )
        .map_err(|e| Error::from(e).in_integral(tier.label))?;
        Ok(2.0 * PI * tier.density * res.value)
    }

    /// `ln L(s)` of interference plus noise at serving distance `r`.
    pub fn log_laplace(&self, r: f64, s: f64) -> Result<f64> {
        self.check_distance(r)?;
        if !(s >= 0.0) {
            return Err(Error::invalid("s", "Laplace argument must be nonnegative"));
        }
        let mut g = -s * self.noise;
        for t in &self.tiers {
            g -= self.tier_term(t, r, s, 0)?;
        }
        Ok(g)
    }

    pub fn laplace(&self, r: f64, s: f64) -> Result<f64> {
        Ok(self.log_laplace(r, s)?.exp())
    }

    /// `h_j = s^j g^(j)(s)` for `j = 1..=n`.
    pub fn scaled_exponent_derivatives(&self, r: f64, s: f64, n: u32) -> Result<Vec<f64>> {
        self.check_distance(r)?;
        (1..=n)
            .map(|j| {
                let mut h = if j == 1 { -s * self.noise } else { 0.0 };
                for t in &self.tiers {
                    h += self.tier_term(t, r, s, j)?;
                }
                Ok(h)
            })
            .collect()
    }

    /// `d^v L / ds^v` at `(r, s)`.
    pub fn laplace_derivative(&self, r: f64, s: f64, v: u32) -> Result<f64> {
        let l = self.laplace(r, s)?;
        if v == 0 {
            return Ok(l);
        }
        if s == 0.0 {
            return self.laplace_derivative_at_zero(r, v);
        }
        let h = self.scaled_exponent_derivatives(r, s, v)?;
        let y = complete_bell(&h);
        Ok(l * y[v as usize] / s.powi(v as i32))
    }

    /// Derivatives at `s = 0` from the cumulants of interference plus noise.
    fn laplace_derivative_at_zero(&self, r: f64, v: u32) -> Result<f64> {
        let g: Vec<f64> = (1..=v)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                let mut acc = if j == 1 { -self.noise } else { 0.0 };
                for t in &self.tiers {
                    let (lo, hi) = self.tier_range(t, r);
                    if t.density > 0.0 && hi > lo {
                        let p = 1.0 - f64::from(j) * t.alpha;
                        acc += sign
                            * 2.0
                            * PI
                            * t.density
                            * t.gain_power.powi(j as i32)
                            * self.fading_moment(t.fading, j)
                            * power_integral(lo, hi, p);
                    }
                }
                acc
            })
            .collect();
        Ok(complete_bell(&g)[v as usize])
    }

    /// Central finite-difference estimate of `d^v L / ds^v` with step
    /// `rel_step * s`.
    pub fn laplace_derivative_fd(&self, r: f64, s: f64, v: u32, rel_step: f64) -> Result<f64> {
        if v == 0 {
            return self.laplace(r, s);
        }
        let h = rel_step * s;
        if !(h > 0.0) {
            return Err(Error::invalid("s", "finite differences need s > 0"));
        }
        let mut acc = 0.0;
        for k in 0..=v {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let x = s + (f64::from(v) / 2.0 - f64::from(k)) * h;
            acc += sign * crate::special::binomial(v, k) * self.laplace(r, x)?;
        }
        Ok(acc / h.powi(v as i32))
    }

    /// `P[SINR >= gamma]` given serving distance `r`.
    pub fn conditional_coverage(&self, r: f64, gamma: f64) -> Result<f64> {
        self.check_distance(r)?;
        if !(gamma >= 0.0) {
            return Err(Error::invalid("gamma", "must be nonnegative"));
        }
        if gamma == 0.0 {
            return Ok(1.0);
        }
        if gamma.is_infinite() {
            return Ok(0.0);
        }
        let kappa = self.sr.kappa();
        let s = kappa * gamma / (self.serving.gain_power * path_loss(r, self.serving.alpha));
        let l = self.laplace(r, s)?;
        let weights = self.sr.weights();
        let n = weights.len() as u32 - 1;
        if n == 0 || l == 0.0 {
            return Ok((l * weights.iter().sum::<f64>()).clamp(0.0, 1.0));
        }
        let y = complete_bell(&self.scaled_exponent_derivatives(r, s, n)?);
        let mut inner = 0.0;
        let mut acc = 0.0;
        for (z, &w) in weights.iter().enumerate() {
            let sign = if z % 2 == 0 { 1.0 } else { -1.0 };
            inner += sign * y[z] / factorial(z as u32);
            acc += w * inner;
        }
        Ok((l * acc).clamp(0.0, 1.0))
    }

    fn area_breakpoints(extent: f64) -> Vec<f64> {
        [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0]
            .into_iter()
            .filter(|&u| u < extent)
            .collect()
    }

    /// `int_0^U f(r(u)) e^-u du`, i.e. `P[nonempty] E[f(r) | nonempty]`.
    pub(crate) fn serving_expectation<F>(&self, mut f: F, label: &str) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let lam = self.serving.density;
        let b = &self.serving.bounds;
        if !(lam > 0.0) || !(b.r_max > b.r_min) {
            return Ok(0.0);
        }
        let extent = area_extent(lam, b, self.qc.area_cutoff);
        let opts = QuadOptions {
            rel_tol: self.qc.coverage_rel_tol,
            abs_tol: self.qc.abs_tol,
            max_subdivisions: self.qc.max_subdivisions,
        };
        let res = crate::quadrature::try_integrate(
            |u: f64| -> Result<f64> { Ok(f(distance_at_area(lam, b, u))? * (-u).exp()) },
            0.0,
            extent,
            &Self::area_breakpoints(extent),
            &opts,
        )
        .map_err(|e: Error| e.in_integral(label))?;
        Ok(res.value)
    }

    /// Unconditional `P[SINR >= gamma]`.
    pub fn coverage(&self, gamma: f64) -> Result<f64> {
        if gamma == 0.0 {
            return Ok(self.nonempty_probability());
        }
        let v =
            self.serving_expectation(|r| self.conditional_coverage(r, gamma), "serving distance")?;
        Ok(v.clamp(0.0, 1.0))
    }

    /// Threshold at which the median-distance conditional coverage is 1/2.
    pub fn coverage_scale(&self) -> Result<f64> {
        let lam = self.serving.density;
        let b = &self.serving.bounds;
        let total = lam * b.ring_area();
        let u_med = -((1.0 + (-total).exp()) / 2.0).ln();
        let r = distance_at_area(lam, b, u_med).clamp(b.r_min, b.r_max);
        let (mut lo, mut hi) = (-12.0f64, 12.0f64);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if self.conditional_coverage(r, 10f64.powf(mid))? > 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(10f64.powf(0.5 * (lo + hi)))
    }

    /// `E[log2(1 + SINR)]` with unserved realizations counted as zero.
    pub fn ergodic_se(&self) -> Result<f64> {
        if self.nonempty_probability() == 0.0 {
            return Ok(0.0);
        }
        let gamma0 = match self.qc.gamma_transform {
            GammaTransform::Unit => 1.0,
            GammaTransform::MedianScaled => self.coverage_scale()?,
        };
        let bps: Vec<f64> = [1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0, 1e3, 1e4]
            .into_iter()
            .map(|k| k / (1.0 + k))
            .collect();
        let opts = QuadOptions {
            rel_tol: self.qc.rel_tol,
            abs_tol: self.qc.abs_tol,
            max_subdivisions: self.qc.max_subdivisions,
        };
        let res = crate::quadrature::try_integrate(
            |t: f64| -> Result<f64> {
                let one_minus = 1.0 - t;
                let gamma = gamma0 * t / one_minus;
                let cov = self.coverage(gamma)?;
                Ok(cov / (1.0 + gamma) * gamma0 / (one_minus * one_minus))
            },
            0.0,
            1.0,
            &bps,
            &opts,
        )
        .map_err(|e: Error| e.in_integral("SINR threshold"))?;
        Ok(res.value / LN_2)
    }
}

/// `int_lo^hi w^p dw`.
pub(crate) fn power_integral(lo: f64, hi: f64, p: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if p == -1.0 {
        if lo <= 0.0 {
            return f64::INFINITY;
        }
        return (hi / lo).ln();
    }
    if lo <= 0.0 && p < -1.0 {
        return f64::INFINITY;
    }
    let q = p + 1.0;
    (hi.powf(q) - lo.powf(q)) / q
}
