mod common;

use std::f64::consts::PI;

use leoshare_core::analytic::{
    coverage_probability, density_ratio_threshold, ergodic_se, laplace_derivative,
    laplace_interference, mean_interference, nearest_distance_pdf, se_lower_bound,
    se_lower_bound_parts, AnalyticModel, QuadratureConfig, TierFading, TierStart,
};
use leoshare_core::antenna::db_to_linear;
use leoshare_core::config::preset;
use leoshare_core::geometry::{cap_bounds_ul, NodeKind};
use leoshare_core::scenario::{Direction, ScenarioConfig, SharingConfig, UserClass};
use leoshare_core::Error;

use common::{handheld, scenario, simpson};

fn model(cfg: &ScenarioConfig) -> AnalyticModel {
    AnalyticModel::new(cfg, QuadratureConfig::default()).unwrap()
}

/// `int_a^b (1 - 1 / (1 + x w^-alpha)) w dw` in closed form.
fn exponential_tier(alpha: f64, x: f64, a: f64, b: f64) -> f64 {
    if alpha == 2.0 {
        0.5 * x * ((b * b + x) / (a * a + x)).ln()
    } else if alpha == 4.0 {
        let q = x.sqrt();
        0.5 * q * ((b * b / q).atan() - (a * a / q).atan())
    } else {
        panic!("no closed form for alpha = {alpha}")
    }
}

/// Log Laplace transform when every link has exponential power fading,
/// written from the tier list without touching the model's quadrature.
fn closed_log_laplace(m: &AnalyticModel, cfg: &ScenarioConfig, r: f64, s: f64) -> f64 {
    let kappa_sr = cfg.sr.beta() - cfg.sr.c_sr();
    let mut g = -s * m.noise_power();
    for t in m.tiers() {
        let lo = match t.start {
            TierStart::Serving => r,
            TierStart::Fixed(lo) => lo,
        };
        if t.end <= lo || t.density == 0.0 {
            continue;
        }
        let kappa = match t.fading {
            TierFading::ShadowedRician => kappa_sr,
            TierFading::Nakagami => 1.0,
        };
        g -= 2.0 * PI * t.density * exponential_tier(t.alpha, s * t.gain_power / kappa, lo, t.end);
    }
    g
}

fn closed_coverage(m: &AnalyticModel, cfg: &ScenarioConfig, gamma: f64) -> f64 {
    let sv = m.serving();
    let kappa = cfg.sr.beta() - cfg.sr.c_sr();
    let total = sv.density * PI * (sv.bounds.r_max.powi(2) - sv.bounds.r_min.powi(2));
    let upper = total.min(60.0);
    simpson(
        |u| {
            let r = (sv.bounds.r_min.powi(2) + u / (sv.density * PI)).sqrt();
            let s = kappa * gamma * r.powf(sv.alpha) / sv.gain_power;
            (-u + closed_log_laplace(m, cfg, r, s)).exp()
        },
        0.0,
        upper,
        400_000,
    )
}

fn serving_radii(m: &AnalyticModel) -> Vec<f64> {
    let b = m.serving().bounds;
    [0.0, 0.01, 0.1, 0.4, 0.9]
        .iter()
        .map(|f| b.r_min + f * (b.r_max - b.r_min))
        .collect()
}

/// `s` at which the serving signal at `r` equals one unit.
fn unit_s(m: &AnalyticModel, r: f64) -> f64 {
    let sv = m.serving();
    r.powf(sv.alpha) / sv.gain_power
}

#[test]
fn laplace_is_one_at_zero_argument() {
    for sharing in SharingConfig::ALL {
        let mut cfg = handheld(sharing, 100.0);
        for noise in [0.0, cfg.noise_power] {
            cfg.noise_power = noise;
            let m = model(&cfg);
            for r in serving_radii(&m) {
                assert_eq!(laplace_interference(&cfg, r, 0.0).unwrap(), 1.0);
            }
        }
    }
}

#[test]
fn no_interferers_and_no_noise_gives_one() {
    for sharing in SharingConfig::ALL {
        let mut cfg = handheld(sharing, 0.0);
        cfg.noise_power = 0.0;
        cfg.densities.lambda_b = 0.0;
        cfg.densities.lambda_ut = 0.0;
        if sharing.is_uplink() {
            cfg.densities.lambda_us = 0.0;
        } else {
            cfg.densities.lambda_s = 0.0;
        }
        let m = model(&cfg);
        for r in serving_radii(&m) {
            for s in [1e-3, 1.0, 1e10, 1e30] {
                assert_eq!(m.laplace(r, s).unwrap(), 1.0);
            }
        }
    }
}

#[test]
fn laplace_matches_closed_form_for_exponential_fading() {
    for sharing in SharingConfig::ALL {
        let cfg = handheld(sharing, 100.0);
        let m = model(&cfg);
        for r in serving_radii(&m) {
            for k in [0.01, 1.0, 100.0] {
                let s = k * unit_s(&m, r);
                let got = m.log_laplace(r, s).unwrap();
                let want = closed_log_laplace(&m, &cfg, r, s);
                assert!(
                    (got - want).abs() <= 1e-7 * want.abs().max(1e-300),
                    "{sharing} r {r} k {k}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn rayleigh_pipeline_matches_independent_coverage() {
    let mut file = preset(UserClass::Handheld);
    file.fading.omega = 0.0;
    for sharing in SharingConfig::ALL {
        let cfg = file.scenario(sharing).unwrap().with_density_ratio(100.0);
        let m = model(&cfg);
        let scale = m.coverage_scale().unwrap();
        for k in [0.1, 1.0, 10.0] {
            let got = m.coverage(k * scale).unwrap();
            let want = closed_coverage(&m, &cfg, k * scale);
            assert!(
                (got - want).abs() <= 1e-6 * want,
                "{sharing} gamma {}: {got} vs {want}",
                k * scale
            );
        }
    }
}

#[test]
fn first_derivative_matches_central_difference() {
    let mut points = 0;
    for sharing in [SharingConfig::UlDlTerr, SharingConfig::DlUlTerr] {
        let cfg = handheld(sharing, 100.0);
        let m = model(&cfg);
        for r in serving_radii(&m) {
            for k in [0.1, 3.0] {
                let s = k * unit_s(&m, r);
                let h = s * 1e-5;
                let fd = (laplace_interference(&cfg, r, s + h).unwrap()
                    - laplace_interference(&cfg, r, s - h).unwrap())
                    / (2.0 * h);
                let d = laplace_derivative(&cfg, r, s, 1).unwrap();
                assert!(d <= 0.0);
                assert!(
                    (d - fd).abs() <= 1e-4 * fd.abs(),
                    "{sharing} r {r} s {s}: {d} vs {fd}"
                );
                points += 1;
            }
        }
    }
    assert!(points >= 10);
    let cfg = handheld(SharingConfig::UlUlTerr, 10.0);
    let r = model(&cfg).serving().bounds.r_min;
    assert_eq!(
        laplace_derivative(&cfg, r, 2.0, 0).unwrap(),
        laplace_interference(&cfg, r, 2.0).unwrap()
    );
}

#[test]
fn laplace_decreases_in_argument() {
    for sharing in SharingConfig::ALL {
        let mut cfg = handheld(sharing, 100.0);
        cfg.noise_power = 0.0;
        let m = model(&cfg);
        let r = serving_radii(&m)[2];
        let base = unit_s(&m, r);
        let mut prev = 1.0;
        for e in -4..=2 {
            let l = m.laplace(r, base * 10f64.powi(e)).unwrap();
            assert!(l > 0.0 && l <= prev, "{sharing}: {l} after {prev}");
            prev = l;
        }
    }
}

#[test]
fn coverage_monotone_in_threshold_density_and_gain() {
    for sharing in SharingConfig::ALL {
        let lo = handheld(sharing, 10.0);
        let hi = handheld(sharing, 100.0);
        let mut strong = lo.clone();
        strong.gains.s_main *= 2.0;
        let m_lo = model(&lo);
        let m_hi = model(&hi);
        let m_strong = model(&strong);
        let scale = m_lo.coverage_scale().unwrap();
        let mut prev = 1.0;
        for e in [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
            let g = scale * 10f64.powf(e);
            let c = m_lo.coverage(g).unwrap();
            assert!(c <= prev + 1e-12);
            assert!(
                m_hi.coverage(g).unwrap() <= c + 1e-9,
                "{sharing} denser at {g}"
            );
            assert!(
                m_strong.coverage(g).unwrap() >= c - 1e-9,
                "{sharing} stronger at {g}"
            );
            prev = c;
        }
    }
}

#[test]
fn coverage_limits() {
    for sharing in SharingConfig::ALL {
        let cfg = handheld(sharing, 100.0);
        let m = model(&cfg);
        let pne = m.nonempty_probability();
        assert!((coverage_probability(&cfg, 1e-15).unwrap() - pne).abs() < 1e-6);
        assert!(coverage_probability(&cfg, 1e15).unwrap() < 1e-9);
    }
}

#[test]
fn no_satellite_users_means_zero_uplink_se() {
    let mut cfg = handheld(SharingConfig::UlUlTerr, 10.0);
    cfg.densities.lambda_us = 0.0;
    assert_eq!(ergodic_se(&cfg).unwrap(), 0.0);
}

#[test]
fn se_is_unchanged_in_kilometres() {
    for sharing in [SharingConfig::UlDlTerr, SharingConfig::UlUlTerr] {
        let cfg = handheld(sharing, 100.0);
        let mut km = cfg.clone();
        let g = &mut km.geometry;
        for r in [
            &mut g.r_s,
            &mut g.r_us,
            &mut g.r_b,
            &mut g.r_ut,
            &mut g.r_max_ut_us,
            &mut g.eps_ut,
        ] {
            *r *= 1e-3;
        }
        let d = &mut km.densities;
        for l in [
            &mut d.lambda_s,
            &mut d.lambda_us,
            &mut d.lambda_b,
            &mut d.lambda_ut,
        ] {
            *l *= 1e6;
        }
        // (c / 4 pi f)^2 carries m^2.
        km.gains.speed_of_light *= 1e-3;
        let a = ergodic_se(&cfg).unwrap();
        let b = ergodic_se(&km).unwrap();
        assert!((a - b).abs() <= 1e-6 * a, "{sharing}: {a} m vs {b} km");
    }
}

#[test]
fn pdf_integrates_to_one_for_vsat_uplink() {
    let cfg = scenario(UserClass::Vsat, SharingConfig::UlUlTerr, 1.0);
    let sv = *model(&cfg).serving();
    let total = simpson(
        |r| nearest_distance_pdf(sv.density, &sv.bounds, r).unwrap(),
        sv.bounds.r_min,
        sv.bounds.r_max,
        2_000_000,
    );
    assert!((total - 1.0).abs() < 1e-8, "{total}");
}

fn dbm(x: f64) -> f64 {
    db_to_linear(x - 30.0)
}

#[test]
fn uplink_threshold_matches_direct_evaluation() {
    let file = preset(UserClass::Handheld);
    let geom = file.geometry();
    let (t, s) = (&file.terrestrial, &file.satellite);
    let ln_span = |a: f64, b: f64| (b / a).ln();
    let bs = cap_bounds_ul(&geom, NodeKind::BaseStation).unwrap();
    let ut = cap_bounds_ul(&geom, NodeKind::TerrUser).unwrap();
    // Distance to a satellite seen at psi2 from a BS, from the triangle
    // d^2 + 2 R_b d sin psi - (R_s^2 - R_b^2) = 0.
    let (rb, rs) = (geom.r_b, geom.r_s);
    let sp = t.psi2_deg.to_radians().sin();
    let r_psi = -rb * sp + (rb * rb * sp * sp + rs * rs - rb * rb).sqrt();
    let per_bs = dbm(t.p_b_dbm)
        * rb
        * (db_to_linear(t.g_bl_side_dbi) * ln_span(bs.r_min, r_psi)
            + db_to_linear(t.g_bh_side_dbi) * ln_span(r_psi, bs.r_max));
    let per_ut =
        dbm(t.p_ut_dbm) * geom.r_ut * db_to_linear(t.g_ut_side_dbi) * ln_span(ut.r_min, ut.r_max);
    let want = per_bs / per_ut;
    let cfg = file.scenario(SharingConfig::UlDlTerr).unwrap();
    let got = density_ratio_threshold(&cfg, Direction::Ul).unwrap();
    assert!((got - want).abs() < 1e-9 * want, "{got} vs {want}");
    assert!(s.alpha_s == 2.0);
}

#[test]
fn downlink_threshold_matches_direct_evaluation() {
    let file = preset(UserClass::Handheld);
    let geom = file.geometry();
    let t = &file.terrestrial;
    let (rb, rus) = (geom.r_b, geom.r_us);
    let r_min_b = rb - rus;
    let r_max_b = ((rb - rus) * (rb + rus)).sqrt();
    let eps = geom.eps_ut;
    let outer = geom.r_max_ut_us;
    let want = dbm(t.p_b_dbm) * rb * db_to_linear(t.g_bh_side_dbi)
        / (dbm(t.p_ut_dbm) * rus * db_to_linear(t.g_ut_side_dbi))
        * (r_min_b.powi(-2) - r_max_b.powi(-2))
        / (eps.powi(-2) - outer.powi(-2));
    let cfg = file.scenario(SharingConfig::DlDlTerr).unwrap();
    let got = density_ratio_threshold(&cfg, Direction::Dl).unwrap();
    assert!((got - want).abs() < 1e-9 * want, "{got} vs {want}");
}

#[test]
fn symmetric_uplink_configuration_has_unit_threshold() {
    let mut cfg = handheld(SharingConfig::UlDlTerr, 1.0);
    cfg.geometry.r_ut = cfg.geometry.r_b;
    cfg.powers.p_b = cfg.powers.p_ut;
    let g = cfg.gains.ut_side;
    cfg.gains.b_main = g;
    cfg.gains.bh_side = g;
    cfg.gains.bl_side = g;
    let t = density_ratio_threshold(&cfg, Direction::Ul).unwrap();
    assert!((t - 1.0).abs() < 1e-12, "{t}");
}

#[test]
fn threshold_requires_closed_form_exponents() {
    let mut cfg = handheld(SharingConfig::UlDlTerr, 1.0);
    cfg.alpha_s = 2.5;
    assert!(matches!(
        density_ratio_threshold(&cfg, Direction::Ul),
        Err(Error::Unsupported(_))
    ));
    let mut cfg = handheld(SharingConfig::DlDlTerr, 1.0);
    cfg.alpha_t = 3.5;
    assert!(matches!(
        density_ratio_threshold(&cfg, Direction::Dl),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn mean_interference_is_linear_in_density() {
    for sharing in SharingConfig::ALL {
        let mut cfg = handheld(sharing, 50.0);
        let base = mean_interference(&cfg).unwrap();
        assert!(base > 0.0);
        cfg.densities.lambda_b *= 2.0;
        cfg.densities.lambda_ut *= 2.0;
        let doubled = mean_interference(&cfg).unwrap();
        assert!((doubled - 2.0 * base).abs() <= 1e-14 * doubled, "{sharing}");
        cfg.densities.lambda_b = 0.0;
        cfg.densities.lambda_ut = 0.0;
        assert_eq!(mean_interference(&cfg).unwrap(), 0.0);
    }
}

#[test]
fn noise_limited_bound_uses_log_moments() {
    let mut cfg = handheld(SharingConfig::UlUlTerr, 0.0);
    cfg.densities.lambda_ut = 0.0;
    let parts = se_lower_bound_parts(&cfg).unwrap();
    let sv = *model(&cfg).serving();
    let kappa = cfg.sr.beta() - cfg.sr.c_sr();
    // E[ln H] for exponential power is -gamma_E - ln kappa.
    let euler = 0.577_215_664_901_532_9;
    let ln_r = simpson(
        |r| r.ln() * nearest_distance_pdf(sv.density, &sv.bounds, r).unwrap(),
        sv.bounds.r_min,
        sv.bounds.r_max,
        400_000,
    );
    let want = sv.gain_power.ln() - euler - kappa.ln() - 2.0 * ln_r;
    assert!(
        (parts.log_signal_mean - want).abs() < 1e-6,
        "{} vs {want}",
        parts.log_signal_mean
    );
    assert!(parts.value <= ergodic_se(&cfg).unwrap());
}

#[test]
fn bound_ordering_flips_at_threshold() {
    for class in [UserClass::Handheld, UserClass::Vsat] {
        for dir in [Direction::Ul, Direction::Dl] {
            let [bs_mode, ut_mode] = SharingConfig::for_direction(dir);
            let base = scenario(class, bs_mode, 1.0);
            let thr = density_ratio_threshold(&base, dir).unwrap();
            let lb = |mode: SharingConfig, ratio: f64| {
                se_lower_bound(&scenario(class, mode, ratio)).unwrap()
            };
            assert!(
                lb(ut_mode, 0.9 * thr) > lb(bs_mode, 0.9 * thr),
                "{class:?} {dir:?} below"
            );
            assert!(
                lb(ut_mode, 1.1 * thr) < lb(bs_mode, 1.1 * thr),
                "{class:?} {dir:?} above"
            );
        }
    }
}
