//! Small special-function helpers for integer-parameter fading models.

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `n!` as a float. Exact up to `n = 22`.
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * f64::from(k))
}

/// Rising factorial `(x)_n = x (x+1) ... (x+n-1)`.
pub fn pochhammer(x: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (x + f64::from(k)))
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Digamma at a positive integer: `psi(n) = -gamma + sum_{k<n} 1/k`.
pub fn digamma_int(n: u32) -> f64 {
    assert!(n >= 1, "digamma_int needs n >= 1");
    (1..n).fold(-EULER_GAMMA, |acc, k| acc + 1.0 / f64::from(k))
}

/// Kummer's confluent hypergeometric function `1F1(a; b; x)` by its defining
/// power series. Intended for `x >= 0` and `a, b > 0`, where every term is
/// positive and the series has no cancellation.
pub fn hyp1f1(a: f64, b: f64, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        term *= (a + k) * x / ((b + k) * (k + 1.0));
        sum += term;
        k += 1.0;
        if term.abs() <= f64::EPSILON * sum.abs() && k > x {
            break;
        }
        if k > 10_000.0 || !sum.is_finite() {
            break;
        }
    }
    sum
}

/// Complete Bell polynomial `Y_n(h_1, ..., h_n)` for every `n <= h.len()`.
///
/// `h[k]` holds `h_{k+1}`. Uses `Y_{n+1} = sum_i C(n, i) h_{i+1} Y_{n-i}`.
pub fn complete_bell(h: &[f64]) -> Vec<f64> {
    let mut y = Vec::with_capacity(h.len() + 1);
    y.push(1.0);
    for n in 0..h.len() {
        let next = (0..=n)
            .map(|i| binomial(n as u32, i as u32) * h[i] * y[n - i])
            .sum();
        y.push(next);
    }
    y
}
