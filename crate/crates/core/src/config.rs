//! TOML scenario files and the shipped presets.
//!
//! Powers and gains are given in dBm / dBi, lengths in the unit named by each
//! key, angles in degrees and densities per square kilometre. Conversion to
//! the SI units used by the engines happens in [`ScenarioFile::scenario`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::antenna::{dbm_to_watts, GainProfile};
use crate::error::{Error, Result};
use crate::fading::{NakagamiParams, ShadowedRicianParams};
use crate::geometry::NetworkGeometry;
use crate::scenario::{
    Densities, Diagnostic, Direction, Powers, ScenarioConfig, Severity, SharingConfig, UserClass,
};

const PER_KM2: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub user_class: UserClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SatelliteSection {
    pub earth_radius_km: f64,
    pub altitude_km: f64,
    pub user_height_m: f64,
    pub theta_s_deg: f64,
    pub theta_us_deg: f64,
    pub carrier_ghz: f64,
    pub bandwidth_mhz: f64,
    pub noise_density_dbm_hz: f64,
    pub p_s_dbm: f64,
    pub p_us_dbm: f64,
    pub g_s_main_dbi: f64,
    pub g_s_side_dbi: f64,
    pub g_us_main_dbi: f64,
    pub g_us_side_dbi: f64,
    pub alpha_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerrestrialSection {
    pub bs_height_m: f64,
    pub ut_height_m: f64,
    pub p_b_dbm: f64,
    pub p_ut_dbm: f64,
    pub g_b_main_dbi: f64,
    pub g_bh_side_dbi: f64,
    pub g_bl_side_dbi: f64,
    pub g_ut_main_dbi: f64,
    pub g_ut_side_dbi: f64,
    pub psi1_deg: f64,
    pub psi2_deg: f64,
    pub alpha_t: f64,
    pub r_max_ut_us_m: f64,
    pub eps_ut_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingSection {
    pub m_s: u32,
    pub b: f64,
    pub omega: f64,
    pub m_t: u32,
}

/// Densities per km^2. BS density is set per satellite link direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySection {
    pub lambda_us: f64,
    pub lambda_s: f64,
    pub lambda_b_ul: f64,
    pub lambda_b_dl: f64,
    /// `lambda_ut / lambda_b` outside sweeps.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub ratio_log10_lo: f64,
    pub ratio_log10_hi: f64,
    pub points: usize,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenario: ScenarioSection,
    pub satellite: SatelliteSection,
    pub terrestrial: TerrestrialSection,
    pub fading: FadingSection,
    pub densities: DensitySection,
    pub sweep: SweepSection,
}

pub const VSAT_PRESET: &str = include_str!("../presets/vsat.toml");
pub const HANDHELD_PRESET: &str = include_str!("../presets/handheld.toml");

pub fn preset_source(class: UserClass) -> &'static str {
    match class {
        UserClass::Vsat => VSAT_PRESET,
        UserClass::Handheld => HANDHELD_PRESET,
    }
}

pub fn preset(class: UserClass) -> ScenarioFile {
    ScenarioFile::parse(preset_source(class)).expect("shipped presets parse")
}

impl ScenarioFile {
    /// Parse TOML; errors carry the line and the offending key.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario files serialize")
    }

    pub fn geometry(&self) -> NetworkGeometry {
        let s = &self.satellite;
        let t = &self.terrestrial;
        let r_e = s.earth_radius_km * 1e3;
        NetworkGeometry {
            r_s: r_e + s.altitude_km * 1e3,
            r_us: r_e + s.user_height_m,
            r_b: r_e + t.bs_height_m,
            r_ut: r_e + t.ut_height_m,
            theta_s: s.theta_s_deg.to_radians(),
            theta_us: s.theta_us_deg.to_radians(),
            psi1_th: t.psi1_deg.to_radians(),
            psi2_th: t.psi2_deg.to_radians(),
            r_max_ut_us: t.r_max_ut_us_m,
            eps_ut: t.eps_ut_m,
        }
    }

    pub fn gains(&self) -> GainProfile {
        let s = &self.satellite;
        let t = &self.terrestrial;
        GainProfile::from_dbi(
            (s.g_s_main_dbi, s.g_s_side_dbi),
            (s.g_us_main_dbi, s.g_us_side_dbi),
            t.g_b_main_dbi,
            t.g_bh_side_dbi,
            t.g_bl_side_dbi,
            (t.g_ut_main_dbi, t.g_ut_side_dbi),
            s.carrier_ghz * 1e9,
        )
    }

    pub fn noise_power(&self) -> f64 {
        dbm_to_watts(self.satellite.noise_density_dbm_hz) * self.satellite.bandwidth_mhz * 1e6
    }

    pub fn lambda_b(&self, direction: Direction) -> f64 {
        match direction {
            Direction::Ul => self.densities.lambda_b_ul,
            Direction::Dl => self.densities.lambda_b_dl,
        }
    }

    /// Scenario for `sharing` at the file's density ratio.
    pub fn scenario(&self, sharing: SharingConfig) -> Result<ScenarioConfig> {
        let sr = ShadowedRicianParams::new(self.fading.m_s, self.fading.b, self.fading.omega)?;
        let nakagami = NakagamiParams::new(self.fading.m_t)?;
        let d = &self.densities;
        let lambda_b = self.lambda_b(sharing.direction());
        Ok(ScenarioConfig {
            sharing,
            user_class: self.scenario.user_class,
            densities: Densities {
                lambda_s: d.lambda_s * PER_KM2,
                lambda_us: d.lambda_us * PER_KM2,
                lambda_b: lambda_b * PER_KM2,
                lambda_ut: d.ratio * lambda_b * PER_KM2,
            },
            powers: Powers {
                p_s: dbm_to_watts(self.satellite.p_s_dbm),
                p_us: dbm_to_watts(self.satellite.p_us_dbm),
                p_b: dbm_to_watts(self.terrestrial.p_b_dbm),
                p_ut: dbm_to_watts(self.terrestrial.p_ut_dbm),
            },
            alpha_s: self.satellite.alpha_s,
            alpha_t: self.terrestrial.alpha_t,
            noise_power: self.noise_power(),
            geometry: self.geometry(),
            gains: self.gains(),
            sr,
            nakagami,
        })
    }

    /// Ratio grid `10^lo .. 10^hi`, `points` log-spaced values.
    pub fn ratio_grid(&self) -> Result<Vec<f64>> {
        log_grid(
            self.sweep.ratio_log10_lo,
            self.sweep.ratio_log10_hi,
            self.sweep.points,
        )
    }

    /// All diagnostics over the four sharing configurations, deduplicated.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        let mut out: Vec<Diagnostic> = Vec::new();
        let mut push = |d: Diagnostic| {
            if !out.contains(&d) {
                out.push(d);
            }
        };
        for (field, v) in [
            ("densities.lambda_us", self.densities.lambda_us),
            ("densities.lambda_s", self.densities.lambda_s),
            ("densities.lambda_b_ul", self.densities.lambda_b_ul),
            ("densities.lambda_b_dl", self.densities.lambda_b_dl),
            ("densities.ratio", self.densities.ratio),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                push(Diagnostic {
                    severity: Severity::Error,
                    field: field.into(),
                    message: "density must be nonnegative and finite".into(),
                });
            }
        }
        if let Err(e) = self.ratio_grid() {
            push(e.into());
        }
        for sharing in SharingConfig::ALL {
            match self.scenario(sharing) {
                Ok(cfg) => {
                    for d in cfg.diagnostics() {
                        if !d.field.starts_with("lambda_") {
                            push(d);
                        }
                    }
                }
                Err(e) => push(e.into()),
            }
        }
        out
    }
}

pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(Error::invalid("sweep.points", "grid must be nonempty"));
    }
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::invalid("sweep.ratio_log10_lo", "need lo <= hi"));
    }
    if points == 1 {
        return Ok(vec![10f64.powf(lo)]);
    }
    let step = (hi - lo) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| 10f64.powf(lo + step * i as f64))
        .collect())
}
