//! Shadowed-Rician (satellite) and Nakagami-m (terrestrial) power fading.
//!
//! For an integer shadowing parameter `m_s` the Shadowed-Rician power PDF is
//! the finite series `f_H(x) = sum_z zeta(z) x^z exp(-(beta - c) x)`, i.e. a
//! mixture of `Gamma(z + 1, rate = beta - c)` laws with weights
//! `zeta(z) Gamma(z + 1) / (beta - c)^(z + 1)`. The weights are nonnegative and
//! sum to one, which is what every sampler, CCDF and Laplace transform here
//! builds on.
//!
//! Note on the coverage expansion: the CCDF weights use `Gamma(z + 1)`. The
//! printed ergodic-rate expression carries `Gamma(z)`, which is undefined at
//! `z = 0`; integrating the power PDF gives `Gamma(z + 1)`, and the weights then
//! satisfy the normalization identity checked in [`ShadowedRicianParams::new`].

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::special::{digamma_int, factorial, hyp1f1, pochhammer};

/// Relative tolerance on `sum_z w_z = 1` enforced at construction.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Expectation and derivatives of `exp(-x H)` for a power-fading law `H`.
pub trait PowerFading {
    /// `E[exp(-x H)]`.
    fn laplace(&self, x: f64) -> f64;

    /// `1 - E[exp(-x H)]`, accurate for small `x`.
    fn one_minus_laplace(&self, x: f64) -> f64;

    /// `x^k d^k/dx^k E[exp(-x H)] = (-x)^k E[H^k exp(-x H)]`.
    fn scaled_laplace_derivative(&self, x: f64, k: u32) -> f64;

    fn mean(&self) -> f64;

    /// `E[ln H]`.
    fn log_mean(&self) -> f64;

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShadowedRicianParams {
    m_s: u32,
    b: f64,
    omega: f64,
    beta: f64,
    c_sr: f64,
    zeta: Vec<f64>,
    weights: Vec<f64>,
}

impl ShadowedRicianParams {
    pub fn new(m_s: u32, b: f64, omega: f64) -> Result<Self> {
        if m_s == 0 {
            return Err(Error::invalid("m_s", "must be a positive integer"));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::invalid("b", "half scatter power must be positive"));
        }
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(Error::invalid("omega", "LOS power must be nonnegative"));
        }
        let m = f64::from(m_s);
        let two_b = 2.0 * b;
        let beta = 1.0 / two_b;
        let c_sr = omega / (two_b * (two_b * m + omega));
        let lead = (two_b * m / (two_b * m + omega)).powf(m);
        let zeta: Vec<f64> = (0..m_s)
            .map(|z| {
                let sign = if z % 2 == 0 { 1.0 } else { -1.0 };
                lead * beta * sign * pochhammer(1.0 - m, z) * c_sr.powi(z as i32)
                    / factorial(z).powi(2)
            })
            .collect();
        let kappa = beta - c_sr;
        let weights: Vec<f64> = zeta
            .iter()
            .enumerate()
            .map(|(z, &zt)| zt * factorial(z as u32) / kappa.powi(z as i32 + 1))
            .collect();

        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::invalid(
                "m_s/b/omega",
                format!("series weights sum to {total}, not 1"),
            ));
        }

        Ok(Self {
            m_s,
            b,
            omega,
            beta,
            c_sr,
            zeta,
            weights,
        })
    }

    /// Table I / figure parameter set `[m, b, Omega] = [1, 0.063, 8.97e-4]`.
    pub fn table_one() -> Self {
        Self::new(1, 0.063, 8.97e-4).expect("reference parameters are valid")
    }

    pub fn m_s(&self) -> u32 {
        self.m_s
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn c_sr(&self) -> f64 {
        self.c_sr
    }

    /// `beta - c`, the common exponential rate of the series.
    pub fn kappa(&self) -> f64 {
        self.beta - self.c_sr
    }

    pub fn zeta(&self) -> &[f64] {
        &self.zeta
    }

    /// Mixture weights `zeta(z) Gamma(z + 1) / (beta - c)^(z + 1)`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Sum of the mixture weights; equals one up to rounding.
    pub fn normalization(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// PDF of the channel amplitude `sqrt(H)`.
    pub fn amplitude_pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let m = f64::from(self.m_s);
        let two_b = 2.0 * self.b;
        let x2 = x * x;
        // The density is below f64 range long before the series would overflow.
        if self.kappa() * x2 > 740.0 {
            return 0.0;
        }
        let lead = (two_b * m / (two_b * m + self.omega)).powf(m);
        let arg = self.omega * x2 / (two_b * (two_b * m + self.omega));
        lead * (x / self.b) * (-x2 / two_b).exp() * hyp1f1(m, 1.0, arg)
    }

    /// PDF of the power `H`.
    pub fn power_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let kappa = self.kappa();
        let poly: f64 = self
            .zeta
            .iter()
            .enumerate()
            .map(|(z, &zt)| zt * x.powi(z as i32))
            .sum();
        poly * (-kappa * x).exp()
    }

    /// `P[H >= t]`.
    pub fn power_ccdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        let kt = self.kappa() * t;
        let decay = (-kt).exp();
        let mut partial = 0.0;
        let mut term = 1.0;
        let mut acc = 0.0;
        for (z, &w) in self.weights.iter().enumerate() {
            if z > 0 {
                term *= kt / z as f64;
            }
            partial += term;
            acc += w * partial;
        }
        (acc * decay).clamp(0.0, 1.0)
    }
}

impl PowerFading for ShadowedRicianParams {
    fn laplace(&self, x: f64) -> f64 {
        let ratio = self.kappa() / (self.kappa() + x);
        self.weights
            .iter()
            .enumerate()
            .map(|(z, &w)| w * ratio.powi(z as i32 + 1))
            .sum()
    }

    fn one_minus_laplace(&self, x: f64) -> f64 {
        let l = (x / self.kappa()).ln_1p();
        self.weights
            .iter()
            .enumerate()
            .map(|(z, &w)| -w * (-(z as f64 + 1.0) * l).exp_m1())
            .sum()
    }

    fn scaled_laplace_derivative(&self, x: f64, k: u32) -> f64 {
        let kappa = self.kappa();
        let ratio = kappa / (kappa + x);
        let frac = x / (kappa + x);
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let s: f64 = self
            .weights
            .iter()
            .enumerate()
            .map(|(z, &w)| {
                w * pochhammer(z as f64 + 1.0, k) * ratio.powi(z as i32 + 1) * frac.powi(k as i32)
            })
            .sum();
        sign * s
    }

    fn mean(&self) -> f64 {
        let kappa = self.kappa();
        self.weights
            .iter()
            .enumerate()
            .map(|(z, &w)| w * (z as f64 + 1.0) / kappa)
            .sum()
    }

    fn log_mean(&self) -> f64 {
        let ln_kappa = self.kappa().ln();
        self.weights
            .iter()
            .enumerate()
            .map(|(z, &w)| w * (digamma_int(z as u32 + 1) - ln_kappa))
            .sum()
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut shape = self.weights.len();
        if shape > 1 {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            for (z, &w) in self.weights.iter().enumerate() {
                acc += w;
                if u < acc {
                    shape = z + 1;
                    break;
                }
            }
        }
        let sum: f64 = (0..shape)
            .map(|_| {
                let e: f64 = Exp1.sample(rng);
                e
            })
            .sum::<f64>();
        sum / self.kappa()
    }
}

/// Nakagami-m fading with unit mean power; `H ~ Gamma(m_t, 1/m_t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NakagamiParams {
    m_t: u32,
}

impl NakagamiParams {
    pub fn new(m_t: u32) -> Result<Self> {
        if m_t == 0 {
            return Err(Error::invalid("m_t", "must be a positive integer"));
        }
        Ok(Self { m_t })
    }

    pub fn m_t(&self) -> u32 {
        self.m_t
    }

    /// PDF of the amplitude `sqrt(H)`.
    pub fn amplitude_pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let m = f64::from(self.m_t);
        2.0 * m.powf(m) / factorial(self.m_t - 1) * x.powf(2.0 * m - 1.0) * (-m * x * x).exp()
    }

    pub fn power_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let m = f64::from(self.m_t);
        m.powf(m) * x.powf(m - 1.0) * (-m * x).exp() / factorial(self.m_t - 1)
    }

    pub fn power_ccdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        let mt = f64::from(self.m_t) * t;
        let mut term = 1.0;
        let mut acc = 1.0;
        for k in 1..self.m_t {
            term *= mt / f64::from(k);
            acc += term;
        }
        (acc * (-mt).exp()).clamp(0.0, 1.0)
    }
}

/// `(1 + arg / m_t)^(-m_t)`, the Laplace transform of Nakagami power at `arg`.
pub fn nakagami_laplace_factor(p: &NakagamiParams, arg: f64) -> f64 {
    let m = f64::from(p.m_t);
    (-m * (arg / m).ln_1p()).exp()
}

impl PowerFading for NakagamiParams {
    fn laplace(&self, x: f64) -> f64 {
        nakagami_laplace_factor(self, x)
    }

    fn one_minus_laplace(&self, x: f64) -> f64 {
        let m = f64::from(self.m_t);
        -(-m * (x / m).ln_1p()).exp_m1()
    }

    fn scaled_laplace_derivative(&self, x: f64, k: u32) -> f64 {
        let m = f64::from(self.m_t);
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * pochhammer(m, k) * nakagami_laplace_factor(self, x) * (x / (m + x)).powi(k as i32)
    }

    fn mean(&self) -> f64 {
        1.0
    }

    fn log_mean(&self) -> f64 {
        digamma_int(self.m_t) - f64::from(self.m_t).ln()
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let sum: f64 = (0..self.m_t)
            .map(|_| {
                let e: f64 = Exp1.sample(rng);
                e
            })
            .sum::<f64>();
        sum / f64::from(self.m_t)
    }
}

/// Sample Shadowed-Rician power.
pub fn sample_sr_power<R: Rng + ?Sized>(p: &ShadowedRicianParams, rng: &mut R) -> f64 {
    p.sample(rng)
}

/// Sample Nakagami-m power.
pub fn sample_nakagami_power<R: Rng + ?Sized>(p: &NakagamiParams, rng: &mut R) -> f64 {
    p.sample(rng)
}
