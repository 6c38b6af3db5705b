//! Scenario description consumed by the analytic and simulation engines.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::antenna::{psi1_visibility_limit, GainProfile};
use crate::error::{Error, Result};
use crate::fading::{NakagamiParams, ShadowedRicianParams, NORMALIZATION_TOL};
use crate::geometry::{cap_bounds_dl, cap_bounds_ul, NetworkGeometry, NodeKind};

/// Which satellite link direction shares spectrum with which terrestrial one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SharingConfig {
    /// Satellite UL with terrestrial DL (BSs interfere).
    UlDlTerr,
    /// Satellite UL with terrestrial UL (terrestrial users interfere).
    UlUlTerr,
    /// Satellite DL with terrestrial DL.
    DlDlTerr,
    /// Satellite DL with terrestrial UL.
    DlUlTerr,
}

impl SharingConfig {
    pub const ALL: [SharingConfig; 4] = [
        SharingConfig::UlDlTerr,
        SharingConfig::UlUlTerr,
        SharingConfig::DlDlTerr,
        SharingConfig::DlUlTerr,
    ];

    pub fn is_uplink(self) -> bool {
        matches!(self, SharingConfig::UlDlTerr | SharingConfig::UlUlTerr)
    }

    pub fn direction(self) -> Direction {
        if self.is_uplink() {
            Direction::Ul
        } else {
            Direction::Dl
        }
    }

    /// Does the terrestrial tier consist of base stations?
    pub fn terrestrial_is_bs(self) -> bool {
        matches!(self, SharingConfig::UlDlTerr | SharingConfig::DlDlTerr)
    }

    pub fn label(self) -> &'static str {
        match self {
            SharingConfig::UlDlTerr => "ul-sat/dl-terr",
            SharingConfig::UlUlTerr => "ul-sat/ul-terr",
            SharingConfig::DlDlTerr => "dl-sat/dl-terr",
            SharingConfig::DlUlTerr => "dl-sat/ul-terr",
        }
    }

    pub fn for_direction(dir: Direction) -> [SharingConfig; 2] {
        match dir {
            Direction::Ul => [SharingConfig::UlDlTerr, SharingConfig::UlUlTerr],
            Direction::Dl => [SharingConfig::DlDlTerr, SharingConfig::DlUlTerr],
        }
    }
}

impl fmt::Display for SharingConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SharingConfig {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SharingConfig::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| Error::Config(format!("unknown sharing configuration `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Ul,
    Dl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UserClass {
    Vsat,
    Handheld,
}

impl UserClass {
    pub fn name(self) -> &'static str {
        match self {
            UserClass::Vsat => "vsat",
            UserClass::Handheld => "handheld",
        }
    }
}

impl FromStr for UserClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vsat" => Ok(UserClass::Vsat),
            "handheld" => Ok(UserClass::Handheld),
            _ => Err(Error::Config(format!("unknown user class `{s}`"))),
        }
    }
}

/// Node densities per square meter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Densities {
    pub lambda_s: f64,
    pub lambda_us: f64,
    pub lambda_b: f64,
    pub lambda_ut: f64,
}

/// Transmit powers in watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Powers {
    pub p_s: f64,
    pub p_us: f64,
    pub p_b: f64,
    pub p_ut: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub sharing: SharingConfig,
    pub user_class: UserClass,
    pub densities: Densities,
    pub powers: Powers,
    pub alpha_s: f64,
    pub alpha_t: f64,
    /// Noise power in watts.
    pub noise_power: f64,
    pub geometry: NetworkGeometry,
    pub gains: GainProfile,
    pub sr: ShadowedRicianParams,
    pub nakagami: NakagamiParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    fn error(field: &str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            field: field.to_string(),
            message: message.into(),
        }
    }
}

impl From<Error> for Diagnostic {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { field, reason } => Diagnostic {
                severity: Severity::Error,
                field,
                message: reason,
            },
            Error::Domain(msg) => Diagnostic::error("geometry", msg),
            other => Diagnostic::error("config", other.to_string()),
        }
    }
}

impl ScenarioConfig {
    /// Return a copy with `lambda_ut = ratio * lambda_b`.
    pub fn with_density_ratio(&self, ratio: f64) -> Self {
        let mut c = self.clone();
        c.densities.lambda_ut = ratio * c.densities.lambda_b;
        c
    }

    pub fn with_sharing(&self, sharing: SharingConfig) -> Self {
        let mut c = self.clone();
        c.sharing = sharing;
        c
    }

    /// Every invariant violation and assumption warning.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let d = &self.densities;
        for (f, v) in [
            ("lambda_s", d.lambda_s),
            ("lambda_us", d.lambda_us),
            ("lambda_b", d.lambda_b),
            ("lambda_ut", d.lambda_ut),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                out.push(Diagnostic::error(
                    f,
                    "density must be nonnegative and finite",
                ));
            }
        }
        let p = &self.powers;
        for (f, v) in [
            ("p_s", p.p_s),
            ("p_us", p.p_us),
            ("p_b", p.p_b),
            ("p_ut", p.p_ut),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                out.push(Diagnostic::error(f, "power must be positive and finite"));
            }
        }
        if !(self.alpha_s >= 2.0 && self.alpha_s.is_finite()) {
            out.push(Diagnostic::error(
                "alpha_s",
                "path-loss exponent must be >= 2",
            ));
        }
        if !(self.alpha_t >= 2.0 && self.alpha_t.is_finite()) {
            out.push(Diagnostic::error(
                "alpha_t",
                "path-loss exponent must be >= 2",
            ));
        }
        if !(self.noise_power >= 0.0 && self.noise_power.is_finite()) {
            out.push(Diagnostic::error("noise_power", "must be nonnegative"));
        }
        if let Err(e) = self.gains.validate() {
            out.push(e.into());
        }
        if let Err(e) = self.geometry.validate() {
            out.push(e.into());
        }
        let norm = self.sr.normalization();
        if (norm - 1.0).abs() > NORMALIZATION_TOL {
            out.push(Diagnostic::error(
                "fading",
                format!("Shadowed-Rician weights sum to {norm}, not 1"),
            ));
        }
        let limit = psi1_visibility_limit(self.geometry.theta_s);
        if self.geometry.psi1_th >= limit {
            out.push(Diagnostic {
                severity: Severity::Warning,
                field: "psi1_th".into(),
                message: format!(
                    "psi1_th = {:.2} deg is not below acos(sin theta_s) = {:.2} deg; visible satellites may fall in the BS main lobe",
                    self.geometry.psi1_th.to_degrees(),
                    limit.to_degrees()
                ),
            });
        }
        out
    }

    /// First error-level diagnostic as an `Error`.
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        match self
            .diagnostics()
            .into_iter()
            .find(|d| d.severity == Severity::Error)
        {
            Some(d) => Err(Error::InvalidParameter {
                field: d.field,
                reason: d.message,
            }),
            None => Ok(()),
        }
    }

    /// Kind and cap of the serving tier.
    pub fn serving_kind(&self) -> NodeKind {
        if self.sharing.is_uplink() {
            NodeKind::SatUser
        } else {
            NodeKind::Satellite
        }
    }

    pub fn serving_density(&self) -> f64 {
        if self.sharing.is_uplink() {
            self.densities.lambda_us
        } else {
            self.densities.lambda_s
        }
    }

    pub fn serving_power(&self) -> f64 {
        if self.sharing.is_uplink() {
            self.powers.p_us
        } else {
            self.powers.p_s
        }
    }

    /// Radius of the observer sphere.
    pub fn observer_radius(&self) -> f64 {
        if self.sharing.is_uplink() {
            self.geometry.r_s
        } else {
            self.geometry.r_us
        }
    }

    pub fn serving_bounds(&self) -> Result<crate::geometry::CapBounds> {
        if self.sharing.is_uplink() {
            cap_bounds_ul(&self.geometry, NodeKind::SatUser)
        } else {
            cap_bounds_dl(&self.geometry, NodeKind::Satellite)
        }
    }
}
