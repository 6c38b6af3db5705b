//! Sectored antenna gains and effective link gains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::NodeKind;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// Main/side-lobe gains per node kind, all linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainProfile {
    pub s_main: f64,
    pub s_side: f64,
    pub us_main: f64,
    pub us_side: f64,
    pub b_main: f64,
    pub bh_side: f64,
    pub bl_side: f64,
    pub ut_main: f64,
    pub ut_side: f64,
    pub carrier_hz: f64,
    pub speed_of_light: f64,
}

/// Which BS lobe faces the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BsLevel {
    Main,
    High,
    Low,
    NotApplicable,
}

impl GainProfile {
    /// Build from dBi values.
    #[allow(clippy::too_many_arguments)]
    pub fn from_dbi(
        s: (f64, f64),
        us: (f64, f64),
        b_main: f64,
        bh_side: f64,
        bl_side: f64,
        ut: (f64, f64),
        carrier_hz: f64,
    ) -> Self {
        GainProfile {
            s_main: db_to_linear(s.0),
            s_side: db_to_linear(s.1),
            us_main: db_to_linear(us.0),
            us_side: db_to_linear(us.1),
            b_main: db_to_linear(b_main),
            bh_side: db_to_linear(bh_side),
            bl_side: db_to_linear(bl_side),
            ut_main: db_to_linear(ut.0),
            ut_side: db_to_linear(ut.1),
            carrier_hz,
            speed_of_light: SPEED_OF_LIGHT,
        }
    }

    /// `(c / 4 pi f_c)^2`.
    pub fn free_space_factor(&self) -> f64 {
        let k = self.speed_of_light / (4.0 * std::f64::consts::PI * self.carrier_hz);
        k * k
    }

    pub fn validate(&self) -> Result<()> {
        let pairs = [
            ("s", self.s_main, self.s_side),
            ("us", self.us_main, self.us_side),
            ("b", self.b_main, self.bh_side),
            ("ut", self.ut_main, self.ut_side),
        ];
        for (kind, main, side) in pairs {
            if !(side > 0.0 && side.is_finite() && main.is_finite()) {
                return Err(Error::invalid(
                    format!("g_{kind}_side"),
                    "gain must be positive and finite",
                ));
            }
            if main < side {
                return Err(Error::invalid(
                    format!("g_{kind}_main"),
                    "main-lobe gain must not be below the side lobe",
                ));
            }
        }
        if !(self.bl_side > 0.0 && self.bl_side <= self.bh_side) {
            return Err(Error::invalid(
                "g_bl_side",
                "need 0 < G_bL_side <= G_bH_side",
            ));
        }
        if !(self.carrier_hz > 0.0 && self.speed_of_light > 0.0) {
            return Err(Error::invalid("carrier_hz", "must be positive"));
        }
        Ok(())
    }

    fn bs_gain(&self, level: BsLevel) -> Option<f64> {
        match level {
            BsLevel::Main => Some(self.b_main),
            BsLevel::High => Some(self.bh_side),
            BsLevel::Low => Some(self.bl_side),
            BsLevel::NotApplicable => None,
        }
    }
}

/// Linear gain product of the link `tx -> rx` times the free-space factor.
///
/// Only the serving link may be `aligned`. BS to satellite links need an
/// explicit lobe; BS to satellite-user links always use the high side lobe.
pub fn effective_gain(
    profile: &GainProfile,
    tx: NodeKind,
    rx: NodeKind,
    aligned: bool,
    bs_level: BsLevel,
) -> Result<f64> {
    use NodeKind::*;
    let bad = |why: &str| Error::InvalidLink(format!("{} -> {}: {why}", tx.symbol(), rx.symbol()));
    if tx != BaseStation && bs_level != BsLevel::NotApplicable {
        return Err(bad("BS lobe given for a non-BS transmitter"));
    }
    let g = match (tx, rx) {
        (SatUser, Satellite) if aligned => profile.us_main * profile.s_main,
        (Satellite, SatUser) if aligned => profile.s_main * profile.us_main,
        (_, _) if aligned => return Err(bad("only serving links can be aligned")),
        (SatUser, Satellite) | (Satellite, SatUser) => profile.us_side * profile.s_side,
        (BaseStation, Satellite) => {
            profile
                .bs_gain(bs_level)
                .ok_or_else(|| bad("BS lobe required"))?
                * profile.s_side
        }
        (TerrUser, Satellite) => profile.ut_side * profile.s_side,
        (BaseStation, SatUser) => match bs_level {
            BsLevel::High | BsLevel::NotApplicable => profile.bh_side * profile.us_side,
            _ => return Err(bad("BS to satellite-user links use the high side lobe")),
        },
        (TerrUser, SatUser) => profile.ut_side * profile.us_side,
        _ => return Err(bad("not a modelled link")),
    };
    Ok(g * profile.free_space_factor())
}

/// Elevation thresholds of the BS pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsThresholds {
    pub psi1: f64,
    pub psi2: f64,
}

/// Lobe seen at elevation `psi`: main up to `psi1`, high side up to `psi2`,
/// low side above.
pub fn bs_level_by_elevation(psi: f64, thresholds: BsThresholds) -> BsLevel {
    if psi <= thresholds.psi1 {
        BsLevel::Main
    } else if psi <= thresholds.psi2 {
        BsLevel::High
    } else {
        BsLevel::Low
    }
}

pub fn bs_gain_by_elevation(profile: &GainProfile, psi: f64, thresholds: BsThresholds) -> f64 {
    match bs_level_by_elevation(psi, thresholds) {
        BsLevel::Main => profile.b_main,
        BsLevel::High => profile.bh_side,
        _ => profile.bl_side,
    }
}

/// Elevation below which `psi1_th` keeps every visible satellite in the BS
/// side lobes, `acos(sin theta_s)`.
pub fn psi1_visibility_limit(theta_s: f64) -> f64 {
    theta_s.sin().clamp(-1.0, 1.0).acos()
}
