//! The transition-polynomial basis: exponent map `p_i(alpha)`, the
//! sign-preserving fractional powers `phi_i(xi) = sign(xi) |xi|^{p_i}` and
//! their derivatives with respect to the location parameter.
//!
//! `phi_1` is always the identity. At `alpha = 1/2` every exponent equals 1 and
//! the family collapses onto that single linear function.

use crate::error::{Error, Result};
use crate::fmath;

/// Half-width of the band around `alpha = 1/2` in which the full estimator
/// gives up and returns the sample mean.
pub const ESTIMATOR_DEGENERACY_BAND: f64 = 0.01;

/// Half-width of the band excluded from theoretical `g2` sweeps.
pub const SWEEP_DEGENERACY_BAND: f64 = 0.05;

/// Default clamp applied to `|xi|` before raising it to a negative power.
pub const DEFAULT_ZERO_FLOOR: f64 = 1e-12;

/// Control parameter `alpha` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaParam {
    value: f64,
    degeneracy_band: f64,
}

impl AlphaParam {
    /// `alpha` with the estimator band (`0.01`).
    pub fn new(value: f64) -> Result<Self> {
        Self::with_band(value, ESTIMATOR_DEGENERACY_BAND)
    }

    pub fn with_band(value: f64, degeneracy_band: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidArgument("alpha must lie in [0, 1]"));
        }
        if !(degeneracy_band > 0.0) {
            return Err(Error::InvalidArgument("degeneracy band must be positive"));
        }
        Ok(Self {
            value,
            degeneracy_band,
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn degeneracy_band(&self) -> f64 {
        self.degeneracy_band
    }

    /// True inside the open band `|alpha - 1/2| < band`.
    pub fn is_degenerate(&self) -> bool {
        (self.value - 0.5).abs() < self.degeneracy_band
    }

    /// Exponent of the second basis function, the only one the `S = 2`
    /// estimator uses.
    pub fn p2(&self) -> f64 {
        exponent(BasisIndex::SECOND, *self)
    }
}

/// Index `i >= 1` of a basis member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct BasisIndex(u32);

impl BasisIndex {
    pub const LINEAR: BasisIndex = BasisIndex(1);
    pub const SECOND: BasisIndex = BasisIndex(2);

    pub fn new(i: u32) -> Result<Self> {
        if i == 0 {
            return Err(Error::InvalidArgument("basis index starts at 1"));
        }
        Ok(Self(i))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// Near-zero regularisation of the fractional powers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingConfig {
    /// `|xi|` is replaced by `sqrt(xi^2 + epsilon^2)` for exponents below 1.
    /// Zero disables smoothing.
    pub epsilon: f64,
    /// Lower clamp on `|xi|` before a negative power is taken.
    pub zero_floor: f64,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.0,
            zero_floor: DEFAULT_ZERO_FLOOR,
        }
    }
}

impl SmoothingConfig {
    pub fn new(epsilon: f64, zero_floor: f64) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(Error::InvalidArgument("epsilon must be non-negative"));
        }
        if !(zero_floor > 0.0) {
            return Err(Error::InvalidArgument("zero floor must be positive"));
        }
        Ok(Self {
            epsilon,
            zero_floor,
        })
    }

    /// Floor scaled to the data; smoothing switched on (at `1e-6 * scale`)
    /// when at least two residuals are exactly zero.
    pub fn for_residuals(residuals: &[f64], scale: f64) -> Self {
        let zeros = residuals.iter().filter(|&&r| r == 0.0).count();
        Self {
            epsilon: if zeros >= 2 { 1e-6 * scale } else { 0.0 },
            zero_floor: DEFAULT_ZERO_FLOOR * scale,
        }
    }
}

/// `p_i(alpha) = 1/i + (4 - i - 3/i) alpha + (2i - 4 + 2/i) alpha^2`, and 1 for `i = 1`.
pub fn exponent(i: BasisIndex, alpha: AlphaParam) -> f64 {
    exponent_at(i.get(), alpha.value())
}

/// Same map with raw arguments; accepts `alpha` outside `[0, 1]` so the
/// collision roots (one of which is negative) can be checked.
pub fn exponent_at(i: u32, alpha: f64) -> f64 {
    if i == 1 {
        return 1.0;
    }
    let i = i as f64;
    let inv = 1.0 / i;
    inv + (4.0 - i - 3.0 * inv) * alpha + (2.0 * i - 4.0 + 2.0 * inv) * alpha * alpha
}

/// Roots of `p_i(alpha) = p_j(alpha)`: `1/2` and `-1/(ij - 1)`.
pub fn collision_roots(i: u32, j: u32) -> Result<(f64, f64)> {
    if i == 0 || j == 0 {
        return Err(Error::InvalidArgument("basis indices start at 1"));
    }
    if i == j {
        return Err(Error::InvalidArgument("collision roots need distinct indices"));
    }
    let ij = (i as f64) * (j as f64);
    let second = -1.0 / (ij - 1.0);
    debug_assert!(second < 0.0);
    Ok((0.5, second))
}

#[inline]
fn smoothed_abs(xi: f64, p: f64, cfg: &SmoothingConfig) -> f64 {
    if cfg.epsilon > 0.0 && p < 1.0 {
        fmath::sqrt(xi * xi + cfg.epsilon * cfg.epsilon)
    } else {
        xi.abs()
    }
}

#[inline]
fn sign(xi: f64) -> f64 {
    if xi > 0.0 {
        1.0
    } else if xi < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Signed power `sign(xi) |xi|^p` with the smoothing rule applied for `p < 1`.
pub fn signed_power(xi: f64, p: f64, cfg: &SmoothingConfig) -> f64 {
    sign(xi) * fmath::powf(smoothed_abs(xi, p, cfg), p)
}

/// `phi_i(xi; alpha)`. Odd in `xi`; exactly `xi` at `alpha = 1/2`.
pub fn basis_value(i: BasisIndex, alpha: AlphaParam, xi: f64, cfg: &SmoothingConfig) -> f64 {
    if i == BasisIndex::LINEAR || alpha.value() == 0.5 {
        return xi;
    }
    signed_power(xi, exponent(i, alpha), cfg)
}

/// `d phi_i / d theta` for `xi = x - theta`: `-1` for `i = 1`, otherwise
/// `-p |xi|^{p-1}` with `|xi|` clamped below at `cfg.zero_floor` (or smoothed
/// when `cfg.epsilon > 0` and `p < 1`). Even in `xi`.
pub fn basis_location_derivative(
    i: BasisIndex,
    alpha: AlphaParam,
    xi: f64,
    cfg: &SmoothingConfig,
) -> f64 {
    if i == BasisIndex::LINEAR || alpha.value() == 0.5 {
        return -1.0;
    }
    let p = exponent(i, alpha);
    let a = smoothed_abs(xi, p, cfg).max(cfg.zero_floor);
    -p * fmath::powf(a, p - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(v: f64) -> AlphaParam {
        AlphaParam::new(v).unwrap()
    }

    fn idx(i: u32) -> BasisIndex {
        BasisIndex::new(i).unwrap()
    }

    #[test]
    fn exponent_examples() {
        assert_eq!(exponent(idx(2), a(0.0)), 0.5);
        assert_eq!(exponent(idx(2), a(0.5)), 1.0);
        assert_eq!(exponent(idx(2), a(1.0)), 2.0);
        assert!((exponent(idx(3), a(0.0)) - 1.0 / 3.0).abs() < 1e-15);
        assert!((exponent(idx(5), a(1.0)) - 5.0).abs() < 1e-12);
        assert!((exponent(idx(2), a(0.3)) - 0.74).abs() < 1e-15);
        assert_eq!(exponent(idx(1), a(0.9)), 1.0);
    }

    #[test]
    fn exponent_is_positive_for_low_indices() {
        // p_6 already dips below zero near alpha = 0.15
        assert!(exponent_at(6, 0.15) < 0.0);
        for i in 1..=5 {
            for k in 0..=1000 {
                let al = k as f64 / 1000.0;
                assert!(exponent_at(i, al) > 0.0, "i={i} alpha={al}");
            }
        }
    }

    #[test]
    fn collision_root_examples() {
        assert_eq!(collision_roots(2, 3).unwrap(), (0.5, -0.2));
        let (r1, r2) = collision_roots(2, 5).unwrap();
        assert_eq!(r1, 0.5);
        assert!((r2 + 1.0 / 9.0).abs() < 1e-15);
        let (r1, r2) = collision_roots(3, 4).unwrap();
        for r in [r1, r2] {
            assert!((exponent_at(3, r) - exponent_at(4, r)).abs() < 1e-12);
        }
        assert!(collision_roots(2, 2).is_err());
        assert!(collision_roots(0, 2).is_err());
    }

    #[test]
    fn basis_value_examples() {
        let cfg = SmoothingConfig::default();
        assert_eq!(basis_value(idx(2), a(1.0), -4.0, &cfg), -16.0);
        assert_eq!(basis_value(idx(2), a(0.5), 7.3, &cfg), 7.3);
        assert_eq!(basis_value(idx(2), a(0.0), 0.25, &cfg), 0.5);
        assert_eq!(basis_value(idx(1), a(0.1), -3.5, &cfg), -3.5);
        assert_eq!(basis_value(idx(3), a(0.2), 0.0, &cfg), 0.0);
    }

    #[test]
    fn smoothing_only_below_unit_exponent() {
        let cfg = SmoothingConfig::new(0.1, 1e-12).unwrap();
        let v = basis_value(idx(2), a(0.0), 0.0, &cfg);
        assert_eq!(v, 0.0);
        let v = basis_value(idx(2), a(0.0), 0.3, &cfg);
        assert!((v - libm::pow(0.1_f64, 0.25)).abs() < 1e-15);
        // p = 2 is left alone.
        assert_eq!(basis_value(idx(2), a(1.0), 0.3, &cfg), 0.3 * 0.3);
    }

    #[test]
    fn derivative_examples() {
        let cfg = SmoothingConfig::default();
        assert!((basis_location_derivative(idx(2), a(1.0), 3.0, &cfg) + 6.0).abs() < 1e-14);
        assert!((basis_location_derivative(idx(2), a(0.0), 4.0, &cfg) + 0.25).abs() < 1e-15);
        let d0 = basis_location_derivative(idx(2), a(0.0), 0.0, &cfg);
        assert!(d0.is_finite());
        assert!((d0 + 0.5 * libm::pow(1e-12, -0.5)).abs() < 1e-3);
        assert_eq!(basis_location_derivative(idx(1), a(0.0), 2.0, &cfg), -1.0);
    }

    #[test]
    fn alpha_validation_and_band() {
        assert!(AlphaParam::new(-0.01).is_err());
        assert!(AlphaParam::new(1.01).is_err());
        assert!(AlphaParam::new(f64::NAN).is_err());
        assert!(AlphaParam::with_band(0.3, 0.0).is_err());
        assert!(a(0.505).is_degenerate());
        assert!(!a(0.52).is_degenerate());
        assert!(AlphaParam::with_band(0.53, SWEEP_DEGENERACY_BAND)
            .unwrap()
            .is_degenerate());
    }

    #[test]
    fn smoothing_auto_enable() {
        let cfg = SmoothingConfig::for_residuals(&[0.0, 1.0, 0.0], 2.0);
        assert_eq!(cfg.epsilon, 2e-6);
        assert_eq!(cfg.zero_floor, 2e-12);
        let cfg = SmoothingConfig::for_residuals(&[0.0, 1.0, 3.0], 2.0);
        assert_eq!(cfg.epsilon, 0.0);
    }
}
