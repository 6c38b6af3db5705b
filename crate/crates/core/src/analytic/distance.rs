//! Nearest-node distance law on a planar ring `[r_min, r_max]` of density
//! `lambda_ring`, conditioned on the ring holding at least one node.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::CapBounds;

/// `1 - exp(-lambda pi (r_max^2 - r_min^2))`.
pub fn nonempty_probability(lambda_ring: f64, bounds: &CapBounds) -> f64 {
    if !(lambda_ring > 0.0) {
        return 0.0;
    }
    -(-lambda_ring * bounds.ring_area()).exp_m1()
}

fn check_domain(bounds: &CapBounds, r: f64) -> Result<()> {
    if r.is_nan() || !bounds.contains(r) {
        return Err(Error::Domain(format!(
            "distance {r} m outside [{}, {}] m",
            bounds.r_min, bounds.r_max
        )));
    }
    Ok(())
}

/// PDF of the nearest distance given a nonempty ring.
pub fn nearest_distance_pdf(lambda_ring: f64, bounds: &CapBounds, r: f64) -> Result<f64> {
    check_domain(bounds, r)?;
    let total = bounds.ring_area();
    if !(total > 0.0) {
        return Err(Error::Domain("degenerate ring has no density".into()));
    }
    if !(lambda_ring > 0.0) {
        // vanishing-density limit: uniform in area
        return Ok(2.0 * PI * r / total);
    }
    let inner = PI * (r - bounds.r_min) * (r + bounds.r_min);
    let norm = -(-lambda_ring * total).exp_m1();
    Ok(2.0 * PI * lambda_ring * r * (-lambda_ring * inner).exp() / norm)
}

/// CDF of the nearest distance given a nonempty ring.
pub fn nearest_distance_cdf(lambda_ring: f64, bounds: &CapBounds, r: f64) -> Result<f64> {
    check_domain(bounds, r)?;
    let total = bounds.ring_area();
    let inner = PI * (r - bounds.r_min) * (r + bounds.r_min);
    if !(lambda_ring > 0.0) {
        return Ok(if total > 0.0 { inner / total } else { 1.0 });
    }
    let num = -(-lambda_ring * inner).exp_m1();
    let den = -(-lambda_ring * total).exp_m1();
    Ok((num / den).clamp(0.0, 1.0))
}

/// Distance at area coordinate `u = lambda pi (r^2 - r_min^2)`.
pub(crate) fn distance_at_area(lambda_ring: f64, bounds: &CapBounds, u: f64) -> f64 {
    let r2 = bounds.r_min * bounds.r_min + u / (lambda_ring * PI);
    r2.sqrt().min(bounds.r_max)
}

/// Largest area coordinate worth integrating (`exp(-u)` negligible beyond).
pub(crate) fn area_extent(lambda_ring: f64, bounds: &CapBounds, cutoff: f64) -> f64 {
    (lambda_ring * bounds.ring_area()).min(cutoff)
}
