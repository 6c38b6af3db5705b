#![allow(dead_code)]

use leoshare_core::config::preset;
use leoshare_core::geometry::NetworkGeometry;
use leoshare_core::scenario::{ScenarioConfig, SharingConfig, UserClass};

/// Asymptotic Kolmogorov-Smirnov critical value at level 0.01.
pub fn ks_critical(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

/// One-sample KS statistic of `samples` against `cdf`.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

pub fn scenario(class: UserClass, sharing: SharingConfig, ratio: f64) -> ScenarioConfig {
    preset(class)
        .scenario(sharing)
        .expect("preset scenario")
        .with_density_ratio(ratio)
}

pub fn handheld(sharing: SharingConfig, ratio: f64) -> ScenarioConfig {
    scenario(UserClass::Handheld, sharing, ratio)
}

pub fn reference_geometry() -> NetworkGeometry {
    preset(UserClass::Handheld).geometry()
}

/// Mean and standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}
