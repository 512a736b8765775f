//! Kolmogorov–Smirnov distances and moment summaries.

use libm::erf;

use crate::engine::FractalSpec;
use crate::error::{Error, Result};
use crate::scalar::Real;

use super::paths::{DigitCursor, PathSample};

/// `sup_x |F_n(x) - F(x)|` for a continuous reference CDF `F`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i + 1) as f64 / n - f).max(f - i as f64 / n)
    })
}

pub fn uniform_cdf(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// CDF of `N(0, variance)`.
pub fn normal_cdf(x: f64, variance: f64) -> f64 {
    0.5 * (1.0 + erf(x / (2.0 * variance).sqrt()))
}

pub fn ks_uniform(samples: &[f64]) -> f64 {
    ks_distance(samples, uniform_cdf)
}

pub fn ks_normal(samples: &[f64], variance: f64) -> f64 {
    ks_distance(samples, |x| normal_cdf(x, variance))
}

/// KS distance between the empirical law of `b^-k R_k`, `k = 1..n`, and the
/// uniform law on `[0, 1]`.
pub fn equidistribution_stat<T: Real>(path: &PathSample<T>, b: u64) -> Result<f64> {
    if path.digits.len() < 100 {
        return Err(Error::Range(format!("path length {} below 100", path.digits.len())));
    }
    let mut cursor = DigitCursor::<T>::new(b);
    let pts: Vec<f64> = path
        .digits
        .iter()
        .map(|&d| {
            cursor.advance(u64::from(d));
            cursor.position().as_f64()
        })
        .collect();
    Ok(ks_uniform(&pts))
}

/// Sample mean and unbiased sample variance.
pub fn mean_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var)
}

/// Variance of the limiting normal law of `Z_n / √n` for the spec's family.
pub fn limiting_variance<T: Real>(spec: &FractalSpec<T>) -> f64 {
    crate::theory::family_sigma2(spec).as_f64()
}
