//! Small descriptive-statistics helpers shared by the estimators.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fmath;

/// Fails on an empty sample or the first non-finite entry.
pub fn check_sample(sample: &[f64]) -> Result<()> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    match sample.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(Error::NonFiniteInput(i)),
        None => Ok(()),
    }
}

pub fn mean(sample: &[f64]) -> f64 {
    sample.iter().sum::<f64>() / sample.len() as f64
}

/// Population (divide-by-N) variance about the sample mean.
pub fn variance_pop(sample: &[f64]) -> f64 {
    let m = mean(sample);
    sample.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / sample.len() as f64
}

/// Unbiased (divide-by-(N-1)) standard deviation; zero for N < 2.
pub fn sd(sample: &[f64]) -> f64 {
    let n = sample.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(sample);
    let ss: f64 = sample.iter().map(|x| (x - m) * (x - m)).sum();
    fmath::sqrt(ss / (n - 1) as f64)
}

pub fn sorted(sample: &[f64]) -> Vec<f64> {
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Median of already sorted data.
pub fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

pub fn median(sample: &[f64]) -> f64 {
    median_sorted(&sorted(sample))
}

/// Linear-interpolation quantile (Hyndman-Fan type 7) of sorted data.
pub fn quantile_sorted(sorted: &[f64], prob: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * prob.clamp(0.0, 1.0);
    let lo = fmath::floor(h) as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Raw median absolute deviation about the median (no consistency factor).
pub fn mad(sample: &[f64]) -> f64 {
    let med = median(sample);
    let dev: Vec<f64> = sample.iter().map(|x| (x - med).abs()).collect();
    median(&dev)
}

pub fn iqr(sample: &[f64]) -> f64 {
    let s = sorted(sample);
    quantile_sorted(&s, 0.75) - quantile_sorted(&s, 0.25)
}

/// Scale used for the zero floor and smoothing: MAD when positive, else 1.
pub fn robust_scale(sample: &[f64]) -> f64 {
    let m = mad(sample);
    if m > 0.0 {
        m
    } else {
        1.0
    }
}

/// Sample skewness and excess kurtosis from population central moments.
pub fn shape_cumulants(sample: &[f64]) -> (f64, f64) {
    let n = sample.len() as f64;
    let m = mean(sample);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in sample {
        let d = x - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    (m3 / fmath::powf(m2, 1.5), m4 / (m2 * m2) - 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_summaries() {
        let x = [1.0, 2.0, 3.0, 4.0, 100.0];
        assert_eq!(mean(&x), 22.0);
        assert_eq!(median(&x), 3.0);
        assert_eq!(mad(&x), 1.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(quantile_sorted(&[0.0, 10.0], 0.25), 2.5);
    }

    #[test]
    fn rejects_bad_samples() {
        assert_eq!(check_sample(&[]), Err(Error::EmptySample));
        assert_eq!(check_sample(&[1.0, f64::NAN]), Err(Error::NonFiniteInput(1)));
        assert_eq!(check_sample(&[f64::INFINITY]), Err(Error::NonFiniteInput(0)));
    }

    #[test]
    fn robust_scale_falls_back_to_one() {
        assert_eq!(robust_scale(&[2.0, 2.0, 2.0]), 1.0);
    }
}
