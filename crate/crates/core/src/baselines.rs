//! Scalar robust location baselines.

use core::fmt;
use core::str::FromStr;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fmath;
use crate::stats;

pub const DEFAULT_TRIM: f64 = 0.1;
pub const HUBER_C: f64 = 1.345;
pub const HUBER_MAX_ITERS: usize = 200;
/// Consistency factor turning MAD into a Gaussian standard deviation.
pub const MAD_TO_SD: f64 = 1.4826;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineId {
    Mean,
    Median,
    Trimmed10,
    Winsorized10,
    Huber,
    MedianOfMeans,
}

impl BaselineId {
    pub const ALL: [BaselineId; 6] = [
        BaselineId::Mean,
        BaselineId::Median,
        BaselineId::Trimmed10,
        BaselineId::Winsorized10,
        BaselineId::Huber,
        BaselineId::MedianOfMeans,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BaselineId::Mean => "mean",
            BaselineId::Median => "median",
            BaselineId::Trimmed10 => "trimmed10",
            BaselineId::Winsorized10 => "winsorized10",
            BaselineId::Huber => "huber",
            BaselineId::MedianOfMeans => "median_of_means",
        }
    }
}

impl fmt::Display for BaselineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BaselineId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaselineId::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or(Error::InvalidArgument("unknown baseline"))
    }
}

fn trim_count(n: usize, fraction: f64) -> Result<usize> {
    if !(0.0..0.5).contains(&fraction) {
        return Err(Error::InvalidArgument("fraction must lie in [0, 0.5)"));
    }
    let g = fmath::floor(fraction * n as f64) as usize;
    if 2 * g >= n {
        return Err(Error::InvalidArgument("all values trimmed"));
    }
    Ok(g)
}

/// Mean after dropping the `floor(f N)` smallest and largest values.
pub fn trimmed_mean(sample: &[f64], fraction: f64) -> Result<f64> {
    stats::check_sample(sample)?;
    let g = trim_count(sample.len(), fraction)?;
    if g == 0 {
        return Ok(stats::mean(sample));
    }
    let s = stats::sorted(sample);
    Ok(stats::mean(&s[g..s.len() - g]))
}

/// Mean after clamping the `floor(f N)` extremes on each side to the nearest
/// retained order statistic.
pub fn winsorized_mean(sample: &[f64], fraction: f64) -> Result<f64> {
    stats::check_sample(sample)?;
    let g = trim_count(sample.len(), fraction)?;
    if g == 0 {
        return Ok(stats::mean(sample));
    }
    let mut s = stats::sorted(sample);
    let n = s.len();
    let (lo, hi) = (s[g], s[n - 1 - g]);
    for v in &mut s[..g] {
        *v = lo;
    }
    for v in &mut s[n - g..] {
        *v = hi;
    }
    Ok(stats::mean(&s))
}

/// Huber M-estimate by iterative reweighting from the median, with the scale
/// fixed at `1.4826 MAD`.
pub fn huber_location(sample: &[f64], tuning_c: f64, max_iters: usize) -> Result<f64> {
    stats::check_sample(sample)?;
    if !(tuning_c > 0.0) {
        return Err(Error::InvalidArgument("tuning constant must be positive"));
    }
    let s = stats::sorted(sample);
    let med = stats::median_sorted(&s);
    let scale = MAD_TO_SD * stats::mad(sample);
    if scale == 0.0 {
        return Ok(med);
    }
    let cut = tuning_c * scale;
    let mut mu = med;
    for _ in 0..max_iters {
        let (mut sw, mut swx) = (0.0, 0.0);
        for &x in sample {
            let r = (x - mu).abs();
            let w = if r <= cut { 1.0 } else { cut / r };
            sw += w;
            swx += w * (x - mu);
        }
        let step = swx / sw;
        mu += step;
        if step.abs() < 1e-9 * scale {
            break;
        }
    }
    Ok(mu)
}

/// Median of the means of `blocks` contiguous groups taken in input order;
/// the first `N mod blocks` groups get one extra element.
pub fn median_of_means(sample: &[f64], blocks: usize) -> Result<f64> {
    stats::check_sample(sample)?;
    let n = sample.len();
    if blocks < 1 || blocks > n {
        return Err(Error::InvalidArgument("blocks must lie in [1, N]"));
    }
    let (base, extra) = (n / blocks, n % blocks);
    let mut means = Vec::with_capacity(blocks);
    let mut start = 0;
    for b in 0..blocks {
        let len = base + usize::from(b < extra);
        means.push(stats::mean(&sample[start..start + len]));
        start += len;
    }
    Ok(stats::median(&means))
}

/// `ceil(sqrt(N))`.
pub fn default_mom_blocks(n: usize) -> usize {
    (fmath::ceil(fmath::sqrt(n as f64)) as usize).clamp(1, n.max(1))
}

/// Runs a baseline with its default tuning.
pub fn run_baseline(id: BaselineId, sample: &[f64]) -> Result<f64> {
    stats::check_sample(sample)?;
    match id {
        BaselineId::Mean => Ok(stats::mean(sample)),
        BaselineId::Median => Ok(stats::median(sample)),
        BaselineId::Trimmed10 => trimmed_mean(sample, DEFAULT_TRIM),
        BaselineId::Winsorized10 => winsorized_mean(sample, DEFAULT_TRIM),
        BaselineId::Huber => huber_location(sample, HUBER_C, HUBER_MAX_ITERS),
        BaselineId::MedianOfMeans => median_of_means(sample, default_mom_blocks(sample.len())),
    }
}
