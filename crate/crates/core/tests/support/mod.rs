//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Direct linear-space evaluation of `p · (p / max(q, floor))^alpha`,
/// normalized.
pub fn contrast_oracle(p: &[f64], q: &[f64], alpha: f64, floor: f64) -> Vec<f64> {
    let w: Vec<f64> = p
        .iter()
        .zip(q)
        .map(|(&pk, &qk)| pk * (pk / qk.max(floor)).powf(alpha))
        .collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

/// Normalized Gaussian mixture with one component per sample, evaluated at
/// the centers of `count` equal bins on `[lower, upper]`.
pub fn kde_oracle(samples: &[f64], lower: f64, upper: f64, count: usize, b: f64) -> Vec<f64> {
    let width = (upper - lower) / count as f64;
    let dens: Vec<f64> = (0..count)
        .map(|k| {
            let x = lower + (k as f64 + 0.5) * width;
            samples
                .iter()
                .map(|s| (-0.5 * ((x - s) / b).powi(2)).exp() / (b * (2.0 * PI).sqrt()))
                .sum::<f64>()
        })
        .collect();
    let total: f64 = dens.iter().sum();
    dens.iter().map(|d| d / total).collect()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn sample_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}
