//! The `S = 2` correlant system and the variance-reduction coefficient
//! `g2(alpha) = Var[PATP] / Var[OLS]`.
//!
//! With `p = p_2(alpha)` the centred correlant matrix and right-hand side are
//!
//! ```text
//! F2 = [[c2,      nu_{p+1}          ],
//!       [nu_{p+1}, nu_{2p} - sigma_p^2]],      b = (1, p nu_{p-1})
//! ```
//!
//! and `g2 = 1 / (c2 b' F2^{-1} b)`, which expands to
//! `[c2 F22 - nu_{p+1}^2] / (c2 [F22 - 2p nu_{p+1} nu_{p-1} + p^2 c2 nu_{p-1}^2])`.

use alloc::vec::Vec;

use crate::basis::{exponent_at, SWEEP_DEGENERACY_BAND};
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::fmath;
use crate::moments::{theoretical_moments, FractionalMomentSet};

/// Singularity guards for the 2x2 solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemThresholds {
    /// Bound on `|det| / (F11 F22)`, i.e. on `1 - rho^2` of the two basis functions.
    pub det_threshold: f64,
    /// Bound on the eigenvalue ratio.
    pub cond_cap: f64,
}

impl Default for SystemThresholds {
    fn default() -> Self {
        Self {
            det_threshold: 1e-14,
            cond_cap: 1e10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelantSystem {
    pub f11: f64,
    pub f12: f64,
    pub f22: f64,
    pub b1: f64,
    pub b2: f64,
    /// Optimal weights `F2^{-1} b`; NaN until solved.
    pub h1: f64,
    pub h2: f64,
    pub det: f64,
    pub cond: f64,
}

impl CorrelantSystem {
    /// Matrix, right-hand side, determinant and condition number, unsolved.
    pub fn assemble(m: &FractionalMomentSet) -> Self {
        let f11 = m.c2;
        let f12 = m.nu_pp1;
        let f22 = m.nu_2p - m.sigma_p * m.sigma_p;
        let det = f11 * f22 - f12 * f12;
        let tr = f11 + f22;
        let disc = fmath::sqrt((f11 - f22) * (f11 - f22) + 4.0 * f12 * f12);
        let lmax = 0.5 * (tr + disc);
        // det / lmax avoids cancellation in tr - disc.
        let lmin = if lmax != 0.0 { det / lmax } else { 0.0 };
        let cond = if lmin != 0.0 {
            (lmax / lmin).abs()
        } else {
            f64::INFINITY
        };
        Self {
            f11,
            f12,
            f22,
            b1: 1.0,
            b2: m.p * m.nu_pm1,
            h1: f64::NAN,
            h2: f64::NAN,
            det,
            cond,
        }
    }

    /// `|det|` relative to the product of the diagonal.
    pub fn relative_det(&self) -> f64 {
        let d = self.f11 * self.f22;
        if d > 0.0 {
            self.det.abs() / d
        } else {
            0.0
        }
    }

    /// Near-singular, ill-conditioned or not positive definite.
    pub fn is_singular(&self, t: &SystemThresholds) -> bool {
        !(self.det > 0.0) || !(self.relative_det() >= t.det_threshold) || !(self.cond <= t.cond_cap)
    }

    fn solve(mut self) -> Self {
        self.h1 = (self.f22 * self.b1 - self.f12 * self.b2) / self.det;
        self.h2 = (self.f11 * self.b2 - self.f12 * self.b1) / self.det;
        self
    }

    /// `b' F2^{-1} b` from the solved weights.
    pub fn quadratic_form(&self) -> f64 {
        self.b1 * self.h1 + self.b2 * self.h2
    }
}

/// Builds and solves the system, failing when it is singular or
/// ill-conditioned under `thresholds`.
pub fn build_correlant_system(m: &FractionalMomentSet, thresholds: &SystemThresholds) -> Result<CorrelantSystem> {
    if !m.is_finite() {
        return Err(Error::InvalidArgument("moment set has a non-finite field"));
    }
    let sys = CorrelantSystem::assemble(m);
    if sys.is_singular(thresholds) {
        return Err(Error::SingularSystem {
            det: sys.det,
            cond: sys.cond,
        });
    }
    Ok(sys.solve())
}

/// Closed-form `g2` from a moment set.
///
/// Returns [`Error::DegenerateRatio`] for the `0/0` at `p = 1` and
/// [`Error::NonPositiveDenominator`] when the quadratic form is not positive.
pub fn g2_closed_form(m: &FractionalMomentSet) -> Result<f64> {
    if !m.is_finite() {
        return Err(Error::InvalidArgument("moment set has a non-finite field"));
    }
    let p = m.p;
    let f22 = m.nu_2p - m.sigma_p * m.sigma_p;
    let num = m.c2 * f22 - m.nu_pp1 * m.nu_pp1;
    let den = m.c2 * (f22 - 2.0 * p * m.nu_pp1 * m.nu_pm1 + p * p * m.c2 * m.nu_pm1 * m.nu_pm1);
    let scale = (m.c2 * f22).abs().max(f64::MIN_POSITIVE);
    if num.abs() < 1e-14 * scale && den.abs() < 1e-14 * scale {
        return Err(Error::DegenerateRatio);
    }
    if !(den > 0.0) {
        return Err(Error::NonPositiveDenominator(den));
    }
    Ok(num / den)
}

/// `g2` through the solved system, `1 / (c2 b' F2^{-1} b)`.
pub fn g2_from_system(c2: f64, sys: &CorrelantSystem) -> f64 {
    1.0 / (c2 * sys.quadratic_form())
}

/// Classical power-basis coefficient `1 - gamma3^2 / (2 + gamma4)`.
pub fn g2_classical(gamma3: f64, gamma4: f64) -> Result<f64> {
    if !(gamma4 > -2.0) {
        return Err(Error::InvalidArgument("excess kurtosis must exceed -2"));
    }
    Ok(1.0 - gamma3 * gamma3 / (2.0 + gamma4))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2Point {
    pub alpha: f64,
    pub g2: f64,
    /// The ratio was `0/0`; `g2` is reported as its limit 1.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct G2Curve {
    pub points: Vec<G2Point>,
    pub argmin_alpha: f64,
    pub argmin_g2: f64,
    /// Open interval around 1/2 left out of the grid.
    pub excluded_band: (f64, f64),
    /// Argmin sits on the grid point next to the excluded band.
    pub band_sensitive: bool,
    /// Every evaluated point has the same `g2` (to 1e-6): there is no preferred `alpha`.
    pub flat: bool,
}

/// `alpha` grid `{0, step, ..., 1}` minus `|alpha - 1/2| < band`.
pub fn alpha_grid(step: f64, band: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 0.25) {
        return Err(Error::InvalidArgument("grid step must lie in (0, 0.25]"));
    }
    if !(band >= 0.0) {
        return Err(Error::InvalidArgument("band must be non-negative"));
    }
    let n = fmath::floor(1.0 / step + 1e-9) as usize;
    let mut grid: Vec<f64> = (0..=n)
        .map(|k| fmath::round(k as f64 * step * 1e12) / 1e12)
        .collect();
    if *grid.last().unwrap() < 1.0 - 1e-12 {
        grid.push(1.0);
    }
    grid.retain(|a| (a - 0.5).abs() >= band - 1e-9);
    Ok(grid)
}

/// Evaluates `g2` at one `alpha`, mapping the `0/0` case to its limit.
pub fn g2_point(spec: &DistributionSpec, alpha: f64) -> Result<G2Point> {
    let p = exponent_at(2, alpha);
    let m = theoretical_moments(spec, p)?;
    match g2_closed_form(&m) {
        Ok(g2) => Ok(G2Point {
            alpha,
            g2,
            degenerate: false,
        }),
        Err(Error::DegenerateRatio) => Ok(G2Point {
            alpha,
            g2: 1.0,
            degenerate: true,
        }),
        Err(e) => Err(e),
    }
}

/// Argmin and flags over an already evaluated set of points.
pub fn summarize_curve(points: Vec<G2Point>, step: f64, band: f64) -> Result<G2Curve> {
    let best = points
        .iter()
        .filter(|p| !p.degenerate)
        .min_by(|a, b| a.g2.total_cmp(&b.g2))
        .copied()
        .ok_or(Error::AllGridDegenerate)?;
    let max = points.iter().map(|p| p.g2).fold(f64::NEG_INFINITY, f64::max);
    let band_sensitive = band > 0.0 && ((best.alpha - 0.5).abs() - band) < step - 1e-9;
    Ok(G2Curve {
        flat: max - best.g2 < 1e-6,
        points,
        argmin_alpha: best.alpha,
        argmin_g2: best.g2,
        excluded_band: (0.5 - band, 0.5 + band),
        band_sensitive,
    })
}

/// Theoretical `g2` curve of `spec` on the sweep grid.
pub fn g2_sweep(spec: &DistributionSpec, grid_step: f64, band: f64) -> Result<G2Curve> {
    let grid = alpha_grid(grid_step, band)?;
    let points = grid
        .into_iter()
        .map(|a| g2_point(spec, a))
        .collect::<Result<Vec<_>>>()?;
    summarize_curve(points, grid_step, band)
}

/// Sweep with the default exclusion band.
pub fn g2_sweep_default(spec: &DistributionSpec, grid_step: f64) -> Result<G2Curve> {
    g2_sweep(spec, grid_step, SWEEP_DEGENERACY_BAND)
}
