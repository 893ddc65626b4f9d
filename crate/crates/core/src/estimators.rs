//! Location estimators built on the transition-polynomial basis.
//!
//! * [`estimate_full`] solves the `S = 2` normal equations `F2 h = b` at the
//!   current centre and takes a Newton step on the weighted score, for at
//!   most `max_outer_iters` rounds (one-step Newey linearisation).
//! * [`estimate_proxy`] is the scalar M-estimator with
//!   `psi(xi) = sign(xi) |xi|^{p_2(alpha)}`, solved by bracketing.
//! * [`estimate_ols`] is the sample mean.
//!
//! Fallback order: inside the degeneracy band the full estimator returns the
//! mean; a singular or ill-conditioned `F2`, or a zero score slope, hands
//! over to the proxy.

use core::fmt;

use crate::basis::{signed_power, AlphaParam, SmoothingConfig, ESTIMATOR_DEGENERACY_BAND};
use crate::efficiency::{CorrelantSystem, SystemThresholds};
use crate::error::{Error, Result};
use crate::fmath;
use crate::moments::{empirical_moments, MomentEstimatorConfig};
use crate::solver::{self, NewtonConfig};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Outer normal-equation rounds `K`.
    pub max_outer_iters: usize,
    /// Relative step tolerance.
    pub tol: f64,
    pub cond_cap: f64,
    pub det_threshold: f64,
    /// Newton steps are clipped to this many sample standard deviations.
    pub step_clip_sd: f64,
    /// Newton damping for the first five iterations.
    pub damping: f64,
    pub degeneracy_band: f64,
    /// Initial proxy bracket is `median +- bracket_expansion * MAD`.
    pub bracket_expansion: f64,
    pub max_bracket_doublings: usize,
    pub max_inner_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_outer_iters: 3,
            tol: 1e-8,
            cond_cap: 1e10,
            det_threshold: 1e-14,
            step_clip_sd: 3.0,
            damping: 0.5,
            degeneracy_band: ESTIMATOR_DEGENERACY_BAND,
            bracket_expansion: 10.0,
            max_bracket_doublings: 60,
            max_inner_iters: 200,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_outer_iters < 1 {
            return Err(Error::InvalidArgument("max_outer_iters must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("tol must be positive"));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidArgument("damping must lie in (0, 1]"));
        }
        if !(self.bracket_expansion > 1.0) {
            return Err(Error::InvalidArgument("bracket expansion must exceed 1"));
        }
        Ok(())
    }

    fn thresholds(&self) -> SystemThresholds {
        SystemThresholds {
            det_threshold: self.det_threshold,
            cond_cap: self.cond_cap,
        }
    }

    fn newton(&self) -> NewtonConfig {
        NewtonConfig {
            damping: self.damping,
            tol: self.tol,
            max_iters: self.max_inner_iters,
            ..NewtonConfig::default()
        }
    }
}

/// Which path produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Full,
    Proxy,
    OlsFallback,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Full => "full",
            Method::Proxy => "proxy",
            Method::OlsFallback => "ols_fallback",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateResult {
    pub theta_hat: f64,
    pub method: Method,
    pub outer_iters: usize,
    pub final_step: f64,
    /// Condition number of the last assembled `F2` (NaN if none was built).
    pub cond_last: f64,
    pub det_last: f64,
    pub converged: bool,
}

impl EstimateResult {
    fn ols(theta_hat: f64) -> Self {
        Self {
            theta_hat,
            method: Method::OlsFallback,
            outer_iters: 0,
            final_step: 0.0,
            cond_last: f64::NAN,
            det_last: f64::NAN,
            converged: true,
        }
    }
}

/// Sample mean.
pub fn estimate_ols(sample: &[f64]) -> Result<EstimateResult> {
    stats::check_sample(sample)?;
    Ok(EstimateResult::ols(stats::mean(sample)))
}

/// Proxy score `sum_n sign(x_n - mu) |x_n - mu|^p`, decreasing in `mu`.
pub fn proxy_score(sample: &[f64], mu: f64, p: f64, cfg: &SmoothingConfig) -> f64 {
    sample.iter().map(|&x| signed_power(x - mu, p, cfg)).sum()
}

/// Derivative of [`proxy_score`] in `mu`: `-p sum_n |x_n - mu|^{p-1}` (floored).
pub fn proxy_slope(sample: &[f64], mu: f64, p: f64, cfg: &SmoothingConfig) -> f64 {
    let smooth = cfg.epsilon > 0.0 && p < 1.0;
    -p * sample
        .iter()
        .map(|&x| {
            let xi = x - mu;
            let a = if smooth {
                fmath::sqrt(xi * xi + cfg.epsilon * cfg.epsilon)
            } else {
                xi.abs()
            };
            fmath::powf(a.max(cfg.zero_floor), p - 1.0)
        })
        .sum::<f64>()
}

fn smoothing_about(sample: &[f64], center: f64) -> SmoothingConfig {
    let scale = stats::robust_scale(sample);
    let zeros = sample.iter().filter(|&&x| x == center).count();
    let mut cfg = SmoothingConfig::for_residuals(&[], scale);
    if zeros >= 2 {
        cfg.epsilon = 1e-6 * scale;
    }
    cfg
}

/// Scalar signed-power M-estimator, solved by Brent on an expanding bracket
/// around the median.
pub fn estimate_proxy(sample: &[f64], alpha: AlphaParam, cfg: &SolverConfig) -> Result<EstimateResult> {
    stats::check_sample(sample)?;
    cfg.validate()?;
    let p = alpha.p2();
    proxy_solve(sample, p, cfg, None)
}

fn proxy_solve(sample: &[f64], p: f64, cfg: &SolverConfig, carry: Option<(f64, f64)>) -> Result<EstimateResult> {
    let (cond_last, det_last) = carry.unwrap_or((f64::NAN, f64::NAN));
    let done = |theta_hat: f64, iters: usize, converged: bool| EstimateResult {
        theta_hat,
        method: Method::Proxy,
        outer_iters: iters,
        final_step: 0.0,
        cond_last,
        det_last,
        converged,
    };
    if p == 1.0 {
        return Ok(done(stats::mean(sample), 0, true));
    }
    let med = stats::median(sample);
    let mad = stats::mad(sample);
    let smoothing = smoothing_about(sample, med);
    let score = |mu: f64| proxy_score(sample, mu, p, &smoothing);
    if score(med) == 0.0 {
        return Ok(done(med, 0, true));
    }
    let spread = stats::sorted(sample);
    let range = spread[spread.len() - 1] - spread[0];
    let base = if mad > 0.0 { mad } else { range.max(f64::MIN_POSITIVE) };
    let (lo, hi) = solver::expand_bracket(score, med, cfg.bracket_expansion * base, cfg.max_bracket_doublings)?;
    let xtol = 1e-12 * med.abs().max(base).max(1.0);
    let out = solver::brent(score, lo, hi, xtol, cfg.max_inner_iters)?;
    Ok(done(out.root, out.iterations, out.converged))
}

/// The proxy M-estimator solved by damped Newton from the sample mean,
/// dropping back to bracketing if Newton fails.
pub fn estimate_proxy_newton(sample: &[f64], alpha: AlphaParam, cfg: &SolverConfig) -> Result<EstimateResult> {
    stats::check_sample(sample)?;
    cfg.validate()?;
    let p = alpha.p2();
    let start = stats::mean(sample);
    let smoothing = smoothing_about(sample, start);
    let mut ncfg = cfg.newton();
    ncfg.tol = cfg.tol * 1e-4;
    match solver::damped_newton_scalar(
        |mu| proxy_score(sample, mu, p, &smoothing),
        |mu| proxy_slope(sample, mu, p, &smoothing),
        start,
        &ncfg,
    ) {
        Ok(out) => Ok(EstimateResult {
            theta_hat: out.root,
            method: Method::Proxy,
            outer_iters: out.iterations,
            final_step: 0.0,
            cond_last: f64::NAN,
            det_last: f64::NAN,
            converged: out.converged,
        }),
        Err(_) => proxy_solve(sample, p, cfg, None),
    }
}

/// Full `F2^{-1} b` estimator.
pub fn estimate_full(sample: &[f64], alpha: AlphaParam, cfg: &SolverConfig) -> Result<EstimateResult> {
    stats::check_sample(sample)?;
    cfg.validate()?;
    let mean = stats::mean(sample);
    if (alpha.value() - 0.5).abs() < cfg.degeneracy_band {
        return Ok(EstimateResult::ols(mean));
    }
    let p = alpha.p2();
    let sd = stats::sd(sample);
    let spread = if sd.is_finite() { sd } else { stats::iqr(sample) };
    let clip = cfg.step_clip_sd * spread;
    let moment_cfg = MomentEstimatorConfig {
        winsor_fraction: 0.0,
        zero_floor: crate::basis::DEFAULT_ZERO_FLOOR * stats::robust_scale(sample),
    };
    let thresholds = cfg.thresholds();

    let mut mu = mean;
    let mut step = 0.0;
    let mut iters = 0;
    let mut converged = false;
    let (mut cond_last, mut det_last) = (f64::NAN, f64::NAN);
    for k in 1..=cfg.max_outer_iters {
        let m = empirical_moments(sample, mu, p, &moment_cfg)?;
        let sys = CorrelantSystem::assemble(&m);
        cond_last = sys.cond;
        det_last = sys.det;
        if !m.is_finite() || sys.is_singular(&thresholds) {
            return proxy_solve(sample, p, cfg, Some((cond_last, det_last)));
        }
        let sys = crate::efficiency::build_correlant_system(&m, &thresholds)?;
        let xi_bar = mean - mu;
        let z = sys.h1 * xi_bar + sys.h2 * m.sigma_p;
        let zp = -sys.h1 - p * sys.h2 * m.nu_pm1;
        if zp == 0.0 || !zp.is_finite() || !z.is_finite() {
            return proxy_solve(sample, p, cfg, Some((cond_last, det_last)));
        }
        step = (-z / zp).clamp(-clip, clip);
        mu += step;
        iters = k;
        if step.abs() < cfg.tol * mu.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    Ok(EstimateResult {
        theta_hat: mu,
        method: Method::Full,
        outer_iters: iters,
        final_step: step,
        cond_last,
        det_last,
        converged,
    })
}
