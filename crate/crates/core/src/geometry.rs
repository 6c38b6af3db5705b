//! Spherical-cap geometry for concentric node spheres.
//!
//! UL quantities are seen from the typical satellite at `(0, 0, R_s)`, DL
//! quantities from the typical satellite user at `(0, 0, R_us)`. A cap on a
//! sphere of radius `R_o` is described by the distance range
//! `[r_min, r_max]` to the observer; uniform points on the cap map to a
//! homogeneous planar ring `[r_min, r_max]` with density `lambda R_o / R_obs`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Satellite,
    SatUser,
    BaseStation,
    TerrUser,
}

impl NodeKind {
    pub fn symbol(self) -> &'static str {
        match self {
            NodeKind::Satellite => "s",
            NodeKind::SatUser => "u_s",
            NodeKind::BaseStation => "b",
            NodeKind::TerrUser => "u_t",
        }
    }
}

/// Radii (m) and angles (rad) of the layered network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkGeometry {
    pub r_s: f64,
    pub r_us: f64,
    pub r_b: f64,
    pub r_ut: f64,
    /// Satellite visibility half-angle measured from nadir.
    pub theta_s: f64,
    /// Minimum elevation of the typical satellite user.
    pub theta_us: f64,
    /// BS main-lobe / high-side-lobe elevation threshold.
    pub psi1_th: f64,
    /// BS high / low side-lobe elevation threshold.
    pub psi2_th: f64,
    /// Radius of the terrestrial-user disk around the typical satellite user.
    pub r_max_ut_us: f64,
    /// Inner exclusion radius of that disk, used for mean-interference forms.
    pub eps_ut: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapBounds {
    pub r_min: f64,
    pub r_max: f64,
    /// `r_max - r_min`, evaluated without cancellation.
    pub width: f64,
    pub area: f64,
}

impl CapBounds {
    pub fn contains(&self, r: f64) -> bool {
        r >= self.r_min && r <= self.r_max
    }

    /// Area of the equivalent planar ring, `pi (r_max^2 - r_min^2)`.
    pub fn ring_area(&self) -> f64 {
        PI * self.width * (2.0 * self.r_min + self.width)
    }
}

/// Cap of a sphere of radius `radius` around the `+z` pole, `height` deep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalCap {
    pub radius: f64,
    pub height: f64,
}

impl SphericalCap {
    pub fn area(&self) -> f64 {
        2.0 * PI * self.radius * self.height
    }
}

impl NetworkGeometry {
    pub fn radius_of(&self, kind: NodeKind) -> f64 {
        match kind {
            NodeKind::Satellite => self.r_s,
            NodeKind::SatUser => self.r_us,
            NodeKind::BaseStation => self.r_b,
            NodeKind::TerrUser => self.r_ut,
        }
    }

    /// Check every invariant and return the first violation.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("r_s", self.r_s),
            ("r_us", self.r_us),
            ("r_b", self.r_b),
            ("r_ut", self.r_ut),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, "radius must be positive and finite"));
            }
        }
        if !(self.r_s > self.r_b && self.r_b >= self.r_ut) {
            return Err(Error::invalid("r_b", "need r_s > r_b >= r_ut"));
        }
        if !(self.r_s > self.r_us) {
            return Err(Error::invalid("r_us", "need r_s > r_us"));
        }
        if !(0.0..PI / 2.0).contains(&self.theta_s) {
            return Err(Error::invalid("theta_s", "must lie in [0, 90) degrees"));
        }
        if !(0.0..PI / 2.0).contains(&self.theta_us) {
            return Err(Error::invalid("theta_us", "must lie in [0, 90) degrees"));
        }
        if !(self.psi1_th >= 0.0 && self.psi1_th < self.psi2_th && self.psi2_th <= PI / 2.0) {
            return Err(Error::invalid(
                "psi2_th",
                "need 0 <= psi1_th < psi2_th <= 90 degrees",
            ));
        }
        if !(self.r_max_ut_us >= 0.0 && self.r_max_ut_us.is_finite()) {
            return Err(Error::invalid("r_max_ut_us", "must be nonnegative"));
        }
        if !(self.eps_ut >= 0.0 && self.eps_ut < self.r_max_ut_us.max(f64::MIN_POSITIVE)) {
            return Err(Error::invalid("eps_ut", "need 0 <= eps_ut < r_max_ut_us"));
        }
        for kind in [NodeKind::SatUser, NodeKind::BaseStation, NodeKind::TerrUser] {
            cap_bounds_ul(self, kind)?;
        }
        for kind in [NodeKind::Satellite, NodeKind::BaseStation] {
            cap_bounds_dl(self, kind)?;
        }
        Ok(())
    }
}

/// Cap of `target` nodes visible from the typical satellite.
pub fn cap_bounds_ul(geom: &NetworkGeometry, target: NodeKind) -> Result<CapBounds> {
    if target == NodeKind::Satellite {
        return Err(Error::invalid(
            "target",
            "UL caps exist for b, u_s and u_t only",
        ));
    }
    let r_o = geom.radius_of(target);
    let r_s = geom.r_s;
    let (sin_t, cos_t) = geom.theta_s.sin_cos();
    let grazing = r_s * sin_t;
    // (R_o - R_s sin)(R_o + R_s sin) = R_o^2 - R_s^2 sin^2
    let disc = (r_o - grazing) * (r_o + grazing);
    if disc < 0.0 {
        return Err(Error::Domain(format!(
            "visibility cone of half-angle {:.3} deg misses the {} sphere (R_o = {r_o} m < R_s sin theta_s = {grazing} m)",
            geom.theta_s.to_degrees(),
            target.symbol()
        )));
    }
    let r_min = r_s - r_o;
    // r_max - r_min expanded so that small apertures lose no digits.
    let root = disc.sqrt();
    let half = (0.5 * geom.theta_s).sin();
    let width =
        r_min * (2.0 * r_s * half * half + grazing * grazing / (r_o + root)) / (r_s * cos_t + root);
    let r_max = r_min + width;
    let rho = r_max * sin_t;
    let height = rho * rho / (r_o + ((r_o - rho) * (r_o + rho)).sqrt());
    Ok(CapBounds {
        r_min,
        r_max,
        width,
        area: 2.0 * PI * r_o * height,
    })
}

/// Cap of `target` nodes above the typical satellite user's elevation mask.
pub fn cap_bounds_dl(geom: &NetworkGeometry, target: NodeKind) -> Result<CapBounds> {
    if !matches!(target, NodeKind::Satellite | NodeKind::BaseStation) {
        return Err(Error::invalid("target", "DL caps exist for s and b only"));
    }
    let r_o = geom.radius_of(target);
    let r_us = geom.r_us;
    if r_o <= r_us {
        return Err(Error::Domain(format!(
            "{} sphere (R = {r_o} m) is not above the satellite-user sphere (R = {r_us} m)",
            target.symbol()
        )));
    }
    let (sin_t, cos_t) = geom.theta_us.sin_cos();
    let r_min = r_o - r_us;
    let q = r_us * sin_t;
    let radial = (r_o - r_us) * (r_o + r_us);
    let root = (radial + q * q).sqrt();
    let c2 = cos_t * cos_t;
    let width =
        (r_min * r_us * c2 * (r_us / (r_o + root) + 1.0 / (1.0 + sin_t)) / (root + q)).max(0.0);
    let r_max = r_min + width;
    let height = (r_o - r_us - r_max * sin_t).max(0.0);
    Ok(CapBounds {
        r_min,
        r_max,
        width,
        area: 2.0 * PI * r_o * height,
    })
}

/// Area of the planar terrestrial-user disk around the typical satellite user.
pub fn ut_disk_area(geom: &NetworkGeometry) -> f64 {
    PI * geom.r_max_ut_us * geom.r_max_ut_us
}

/// Density of the planar ring equivalent to a cap on a sphere of radius `r_o`
/// seen from an observer at radius `r_obs`.
pub fn ring_density(lambda_o: f64, r_o: f64, r_obs: f64) -> f64 {
    lambda_o * r_o / r_obs
}

/// Distance between a node on the sphere `r_node` and a point on the outer
/// sphere `r_outer` seen from the node at elevation `elevation`.
pub fn distance_at_elevation(r_outer: f64, r_node: f64, elevation: f64) -> f64 {
    let (sin_e, cos_e) = elevation.sin_cos();
    let rc = r_node * cos_e;
    ((r_outer - rc) * (r_outer + rc)).sqrt() - r_node * sin_e
}

/// Elevation of a point on the outer sphere seen from a node on `r_node`,
/// given their distance.
pub fn elevation_at_distance(r_outer: f64, r_node: f64, distance: f64) -> f64 {
    let s =
        ((r_outer - r_node) * (r_outer + r_node) - distance * distance) / (2.0 * r_node * distance);
    s.clamp(-1.0, 1.0).asin()
}

/// Distance from the typical satellite at which a BS sees it at `psi2_th`.
pub fn bs_sidelobe_boundary_radius(geom: &NetworkGeometry) -> Result<f64> {
    if !(geom.psi2_th > 0.0 && geom.psi2_th <= PI / 2.0) {
        return Err(Error::invalid("psi2_th", "must lie in (0, 90] degrees"));
    }
    let bounds = cap_bounds_ul(geom, NodeKind::BaseStation)?;
    let r = distance_at_elevation(geom.r_s, geom.r_b, geom.psi2_th);
    let slack = 1e-9 * bounds.r_max;
    if r < bounds.r_min - slack || r > bounds.r_max + slack {
        return Err(Error::Domain(format!(
            "psi2_th boundary at {r} m lies outside the BS cap [{}, {}] m",
            bounds.r_min, bounds.r_max
        )));
    }
    Ok(r.clamp(bounds.r_min, bounds.r_max))
}

/// UL cap of `target` nodes as a sampling region.
pub fn ul_cap(geom: &NetworkGeometry, target: NodeKind) -> Result<SphericalCap> {
    let b = cap_bounds_ul(geom, target)?;
    let r_o = geom.radius_of(target);
    Ok(SphericalCap {
        radius: r_o,
        height: b.area / (2.0 * PI * r_o),
    })
}

/// DL cap of `target` nodes as a sampling region.
pub fn dl_cap(geom: &NetworkGeometry, target: NodeKind) -> Result<SphericalCap> {
    let b = cap_bounds_dl(geom, target)?;
    let r_o = geom.radius_of(target);
    Ok(SphericalCap {
        radius: r_o,
        height: b.area / (2.0 * PI * r_o),
    })
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if !(mean > 0.0) {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive finite Poisson mean");
    dist.sample(rng) as usize
}

/// Homogeneous PPP of intensity `density` on `cap`. The axial depth below the
/// pole is uniform on `[0, height]` (Archimedes), azimuth uniform.
pub fn sample_cap_points<R: Rng + ?Sized>(
    cap: &SphericalCap,
    density: f64,
    rng: &mut R,
) -> Vec<[f64; 3]> {
    let n = poisson_count(density * cap.area(), rng);
    (0..n)
        .map(|_| {
            let h = cap.height * rng.gen::<f64>();
            let phi = 2.0 * PI * rng.gen::<f64>();
            let rho = (h * (2.0 * cap.radius - h)).max(0.0).sqrt();
            [rho * phi.cos(), rho * phi.sin(), cap.radius - h]
        })
        .collect()
}

/// Homogeneous planar PPP on the annulus `[inner, outer]` centred at the origin.
pub fn sample_disk_points<R: Rng + ?Sized>(
    inner: f64,
    outer: f64,
    density: f64,
    rng: &mut R,
) -> Vec<[f64; 2]> {
    let n = poisson_count(density * PI * (outer * outer - inner * inner), rng);
    (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            let rho = (inner * inner + u * (outer * outer - inner * inner)).sqrt();
            let phi = 2.0 * PI * rng.gen::<f64>();
            [rho * phi.cos(), rho * phi.sin()]
        })
        .collect()
}

/// Distance from a sampled cap point to the on-axis observer at radius
/// `r_obs`, computed from the depth below the pole to avoid cancellation.
pub fn distance_to_axis_point(p: &[f64; 3], cap_radius: f64, r_obs: f64) -> f64 {
    let rho2 = p[0] * p[0] + p[1] * p[1];
    let depth = cap_radius - p[2];
    let dz = (r_obs - cap_radius) + depth;
    (rho2 + dz * dz).sqrt()
}
