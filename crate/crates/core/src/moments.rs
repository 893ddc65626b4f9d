//! Fractional absolute and signed moments
//! `nu_q = E|xi|^q`, `sigma_q = E[sign(xi) |xi|^q]`, empirical and theoretical.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::distributions::{DistributionSpec, Family};
use crate::error::{Error, Result};
use crate::fmath;
use crate::quadrature::{self, QuadOptions};
use crate::stats;

/// The five moments that feed the `S = 2` correlant system, at exponent `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalMomentSet {
    pub p: f64,
    /// Second central moment.
    pub c2: f64,
    /// `nu_{p-1}`.
    pub nu_pm1: f64,
    /// `nu_{p+1}`.
    pub nu_pp1: f64,
    /// `nu_{2p}`.
    pub nu_2p: f64,
    /// Signed moment `sigma_p`.
    pub sigma_p: f64,
    /// `nu_p`, when it was computed alongside.
    pub nu_p: Option<f64>,
}

impl FractionalMomentSet {
    pub fn is_finite(&self) -> bool {
        [self.p, self.c2, self.nu_pm1, self.nu_pp1, self.nu_2p, self.sigma_p]
            .iter()
            .all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimatorConfig {
    /// Upper-tail fraction of `|xi|` winsorized before powering, in `[0, 0.25]`.
    pub winsor_fraction: f64,
    /// Clamp on `|xi|` for negative exponents.
    pub zero_floor: f64,
}

impl Default for MomentEstimatorConfig {
    fn default() -> Self {
        Self {
            winsor_fraction: 0.0,
            zero_floor: crate::basis::DEFAULT_ZERO_FLOOR,
        }
    }
}

impl MomentEstimatorConfig {
    pub fn new(winsor_fraction: f64, zero_floor: f64) -> Result<Self> {
        if !(0.0..=0.25).contains(&winsor_fraction) {
            return Err(Error::InvalidArgument("winsor fraction must lie in [0, 0.25]"));
        }
        if !(zero_floor > 0.0) {
            return Err(Error::InvalidArgument("zero floor must be positive"));
        }
        Ok(Self {
            winsor_fraction,
            zero_floor,
        })
    }

    /// Configuration for plug-in calibration: 1% winsorizing.
    pub fn plugin() -> Self {
        Self {
            winsor_fraction: 0.01,
            ..Self::default()
        }
    }
}

/// Sample moments of `x - center` at exponent `p`.
pub fn empirical_moments(
    sample: &[f64],
    center: f64,
    p: f64,
    cfg: &MomentEstimatorConfig,
) -> Result<FractionalMomentSet> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(p > 0.0) {
        return Err(Error::InvalidArgument("exponent p must be positive"));
    }
    let cap = if cfg.winsor_fraction > 0.0 {
        let abs: Vec<f64> = sample.iter().map(|x| (x - center).abs()).collect();
        let sorted = stats::sorted(&abs);
        stats::quantile_sorted(&sorted, 1.0 - cfg.winsor_fraction)
    } else {
        f64::INFINITY
    };

    let floor_pow = fmath::powf(cfg.zero_floor, p - 1.0);
    let negative = p < 1.0;
    let (mut c2, mut nm1, mut np, mut np1, mut n2p, mut sp) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for &x in sample {
        let xi = x - center;
        let a = xi.abs().min(cap);
        let ap = fmath::powf(a, p);
        c2 += a * a;
        np += ap;
        np1 += ap * a;
        n2p += ap * ap;
        if xi > 0.0 {
            sp += ap;
        } else if xi < 0.0 {
            sp -= ap;
        }
        nm1 += if negative {
            if a >= cfg.zero_floor {
                ap / a
            } else {
                floor_pow
            }
        } else if a > 0.0 {
            ap / a
        } else if p == 1.0 {
            1.0
        } else {
            0.0
        };
    }
    let n = sample.len() as f64;
    Ok(FractionalMomentSet {
        p,
        c2: c2 / n,
        nu_pm1: nm1 / n,
        nu_pp1: np1 / n,
        nu_2p: n2p / n,
        sigma_p: sp / n,
        nu_p: Some(np / n),
    })
}

fn non_finite(spec: &DistributionSpec, order: f64) -> Error {
    Error::NonFiniteMoment {
        family: spec.name(),
        order,
    }
}

/// `E|X - center|^q` for a distribution spec. Closed forms where they exist,
/// quadrature otherwise; errors when the moment diverges.
pub fn theoretical_absolute_moment(spec: &DistributionSpec, q: f64) -> Result<f64> {
    if !(q > -1.0) {
        return Err(non_finite(spec, q));
    }
    let sd = spec.variance().map(fmath::sqrt);
    let lg = fmath::ln_gamma;
    match spec.family() {
        Family::Cauchy => {
            if q >= 1.0 {
                return Err(non_finite(spec, q));
            }
            Ok(1.0 / fmath::cos(PI * q / 2.0))
        }
        Family::Gaussian => {
            let s = sd.unwrap();
            Ok(fmath::powf(s, q) * fmath::exp((q / 2.0) * core::f64::consts::LN_2 + lg((q + 1.0) / 2.0))
                / fmath::sqrt(PI))
        }
        Family::Laplace => {
            let b = sd.unwrap() / core::f64::consts::SQRT_2;
            Ok(fmath::powf(b, q) * fmath::gamma(q + 1.0))
        }
        Family::GeneralizedGaussian { beta } => {
            // natural scale s with density proportional to exp(-|x/s|^beta)
            let natural_sd = fmath::exp(0.5 * (lg(3.0 / beta) - lg(1.0 / beta)));
            let s = sd.unwrap() / natural_sd;
            Ok(fmath::powf(s, q) * fmath::exp(lg((q + 1.0) / beta) - lg(1.0 / beta)))
        }
        Family::Uniform => {
            let h = sd.unwrap() * fmath::sqrt(3.0);
            Ok(fmath::powf(h, q) / (q + 1.0))
        }
        Family::Arcsine => {
            let h = sd.unwrap() * core::f64::consts::SQRT_2;
            Ok(fmath::powf(h, q) * fmath::exp(lg((q + 1.0) / 2.0) - lg(q / 2.0 + 1.0)) / fmath::sqrt(PI))
        }
        Family::Triangular => {
            let h = sd.unwrap() * fmath::sqrt(6.0);
            Ok(fmath::powf(h, q) * 2.0 / ((q + 1.0) * (q + 2.0)))
        }
        Family::Beta { .. } => quadrature_absolute_moment(spec, q),
    }
}

/// `E[sign(X - center) |X - center|^q]`; exactly zero for symmetric specs.
pub fn theoretical_signed_moment(spec: &DistributionSpec, q: f64) -> Result<f64> {
    if spec.is_symmetric() {
        if matches!(spec.family(), Family::Cauchy) && q >= 1.0 {
            return Err(non_finite(spec, q));
        }
        return Ok(0.0);
    }
    let opts = QuadOptions::default();
    let pdf = |x: f64| spec.pdf(x);
    quadrature::signed_moment_unchecked(&pdf, q, spec.support(), spec.center(), &opts)
}

/// Quadrature of `E|X - center|^q` directly against the density.
pub fn quadrature_absolute_moment(spec: &DistributionSpec, q: f64) -> Result<f64> {
    if matches!(spec.family(), Family::Cauchy) && q >= 1.0 {
        return Err(non_finite(spec, q));
    }
    let opts = QuadOptions::default();
    let pdf = |x: f64| spec.pdf(x);
    quadrature::absolute_moment_unchecked(&pdf, q, spec.support(), spec.center(), &opts)
}

/// The moment set of a distribution at exponent `p`, about its centre.
pub fn theoretical_moments(spec: &DistributionSpec, p: f64) -> Result<FractionalMomentSet> {
    if !(p > 0.0) {
        return Err(Error::InvalidArgument("exponent p must be positive"));
    }
    if !spec.has_finite_variance() {
        return Err(non_finite(spec, 2.0));
    }
    let c2 = spec.variance().expect("finite variance checked");
    let m = FractionalMomentSet {
        p,
        c2,
        nu_pm1: theoretical_absolute_moment(spec, p - 1.0)?,
        nu_pp1: theoretical_absolute_moment(spec, p + 1.0)?,
        nu_2p: theoretical_absolute_moment(spec, 2.0 * p)?,
        sigma_p: theoretical_signed_moment(spec, p)?,
        nu_p: Some(theoretical_absolute_moment(spec, p)?),
    };
    if !m.is_finite() {
        return Err(non_finite(spec, 2.0 * p));
    }
    Ok(m)
}
