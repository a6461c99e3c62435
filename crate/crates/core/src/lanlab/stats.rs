//! Sample statistics used by the verification reports.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{CirError, Result};

fn sorted(samples: &[f64]) -> Vec<f64> {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// `sup_x |F_n(x) - F(x)|` for a continuous reference CDF.
pub fn ks_statistic_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(CirError::EmptySample);
    }
    let s = sorted(samples);
    let n = s.len() as f64;
    Ok(s.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    }))
}

/// `sup_x |F_n(x) - G_m(x)|`, evaluated after consuming all ties at each
/// point of the merged sample.
pub fn ks_statistic_two_sample(s1: &[f64], s2: &[f64]) -> Result<f64> {
    if s1.is_empty() || s2.is_empty() {
        return Err(CirError::EmptySample);
    }
    let (a, b) = (sorted(s1), sorted(s2));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0_f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    // After one sample is exhausted the gap only shrinks towards zero, except
    // for the value reached right at exhaustion, already recorded above.
    Ok(d)
}

/// Asymptotic 1% critical value `c sqrt((n + m) / (n m))`.
pub fn ks_two_sample_threshold(constant: f64, n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    constant * ((n + m) / (n * m)).sqrt()
}

/// Mean and standard error of `exp(samples)`, shifted by the maximum so
/// large log-ratios do not overflow before rescaling.
pub fn unit_mean_statistic(loglr_samples: &[f64]) -> Result<(f64, f64)> {
    if loglr_samples.is_empty() {
        return Err(CirError::EmptySample);
    }
    let shift = loglr_samples
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = loglr_samples.iter().map(|&s| (s - shift).exp()).collect();
    let (mean, var) = mean_and_variance(&w);
    let scale = shift.exp();
    let se = (var / w.len() as f64).sqrt();
    Ok((mean * scale, se * scale))
}

/// Sample mean and unbiased variance (zero for a single observation).
pub fn mean_and_variance(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (n - 1.0))
}

/// Large-sample standard error of the sample variance, from the fourth
/// central moment.
pub fn variance_standard_error(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mean, var) = mean_and_variance(x);
    let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    ((m4 - var * var).max(0.0) / n).sqrt()
}

/// CDF of `N(mean, sd^2)`; a point mass at `mean` when `sd == 0`.
pub fn normal_cdf(mean: f64, sd: f64) -> impl Fn(f64) -> f64 {
    let dist = (sd > 0.0).then(|| Normal::new(mean, sd).expect("finite normal parameters"));
    move |x| match &dist {
        Some(d) => d.cdf(x),
        None => {
            if x >= mean {
                1.0
            } else {
                0.0
            }
        }
    }
}
