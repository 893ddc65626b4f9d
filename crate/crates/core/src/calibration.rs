//! Choosing `alpha*`.
//!
//! * Oracle: argmin of the theoretical `g2` sweep.
//! * Plug-in: argmin of the empirical `g2` built from winsorized fractional
//!   moments at the OLS centre, with a bootstrap spread of the argmin.
//! * Grid search: argmin over the grid of the bootstrap variance of the full
//!   estimator.
//! * Table lookup: nearest `(gamma3, gamma4)` row of a user-supplied table.
//!
//! [`entropy_diagnostic`] supplies the KDE entropy coefficient used by the
//! extended scheme.

use alloc::vec::Vec;

use rand::Rng;

use crate::basis::{exponent_at, AlphaParam};
use crate::distributions::DistributionSpec;
use crate::efficiency::{alpha_grid, g2_closed_form, g2_sweep};
use crate::error::{Error, Result};
use crate::estimators::{estimate_full, SolverConfig};
use crate::fmath;
use crate::moments::{empirical_moments, MomentEstimatorConfig};
use crate::rng;
use crate::stats;

/// Ambiguity threshold on the bootstrap standard deviation of `alpha*`.
pub const TAU_ALPHA: f64 = 0.1;
pub const MIN_PLUGIN_N: usize = 30;
pub const MIN_ENTROPY_N: usize = 100;
pub const MIN_BOOTSTRAP: usize = 100;
/// Grid points whose bootstrap variance is within this factor of the minimum
/// form the grid-search sensitivity interval.
pub const GRID_VARIANCE_SLACK: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    Oracle,
    Plugin,
    GridMc,
    TableLookup,
}

impl Criterion {
    pub fn as_str(&self) -> &'static str {
        match self {
            Criterion::Oracle => "oracle",
            Criterion::Plugin => "plugin",
            Criterion::GridMc => "grid_mc",
            Criterion::TableLookup => "table_lookup_stub",
        }
    }
}

/// One evaluated grid point. `value` is `g2` (oracle, plug-in) or a bootstrap
/// variance (grid search).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub alpha: f64,
    pub value: f64,
    /// Excluded from the argmin (0/0 ratio, non-positive form, inside the band).
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult {
    pub alpha_star: f64,
    pub criterion: Criterion,
    pub curve: Vec<CurvePoint>,
    pub sensitivity_interval: (f64, f64),
    pub ambiguous: bool,
    /// `alpha*` sits on the grid point next to the excluded band.
    pub band_sensitive: bool,
    /// Bootstrap standard deviation of `alpha*` when one was computed.
    pub alpha_spread: Option<f64>,
    pub entropy: Option<EntropyDiagnostic>,
}

impl CalibrationResult {
    pub fn min_value(&self) -> f64 {
        self.curve
            .iter()
            .find(|p| p.alpha == self.alpha_star)
            .map_or(f64::NAN, |p| p.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    Epanechnikov,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyDiagnostic {
    pub h_hat: f64,
    pub k_hat: f64,
    /// `None` when the sample excess kurtosis is not above -3.
    pub kappa_hat: Option<f64>,
    pub bandwidth: f64,
    pub kernel: Kernel,
}

fn argmin(curve: &[CurvePoint]) -> Result<CurvePoint> {
    curve
        .iter()
        .filter(|p| !p.degenerate)
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .copied()
        .ok_or(Error::AllGridDegenerate)
}

fn near_band(alpha: f64, step: f64, band: f64) -> bool {
    band > 0.0 && ((alpha - 0.5).abs() - band) < step - 1e-9
}

/// Range of non-degenerate grid `alpha` whose value is within `slack` of the
/// minimum (multiplicative when `relative`).
fn level_set(curve: &[CurvePoint], min: f64, slack: f64, relative: bool) -> (f64, f64) {
    let limit = if relative { min * slack } else { min + slack };
    curve
        .iter()
        .filter(|p| !p.degenerate && p.value <= limit)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.alpha), hi.max(p.alpha))
        })
}

/// Argmin of the theoretical `g2` sweep. A flat curve is marked ambiguous.
pub fn calibrate_oracle(spec: &DistributionSpec, grid_step: f64, band: f64) -> Result<CalibrationResult> {
    let sweep = g2_sweep(spec, grid_step, band)?;
    let curve: Vec<CurvePoint> = sweep
        .points
        .iter()
        .map(|p| CurvePoint {
            alpha: p.alpha,
            value: p.g2,
            degenerate: p.degenerate,
        })
        .collect();
    let interval = level_set(&curve, sweep.argmin_g2, 1e-6, false);
    Ok(CalibrationResult {
        alpha_star: sweep.argmin_alpha,
        criterion: Criterion::Oracle,
        curve,
        sensitivity_interval: interval,
        ambiguous: sweep.flat,
        band_sensitive: sweep.band_sensitive,
        alpha_spread: None,
        entropy: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PluginConfig {
    pub grid_step: f64,
    pub band: f64,
    pub moments: MomentEstimatorConfig,
    /// Bootstrap resamples for the sensitivity interval; 0 skips the bootstrap.
    pub bootstrap_b: usize,
    pub seed: u64,
}

impl Default for PluginConfig {
    fn default() -> Self {
        Self {
            grid_step: 0.05,
            band: crate::basis::SWEEP_DEGENERACY_BAND,
            moments: MomentEstimatorConfig::plugin(),
            bootstrap_b: 200,
            seed: 0,
        }
    }
}

/// Empirical `g2` of `residuals` (already centred) on `grid`.
pub fn empirical_g2_curve(residuals: &[f64], grid: &[f64], cfg: &MomentEstimatorConfig) -> Vec<CurvePoint> {
    grid.iter()
        .map(|&alpha| {
            let p = exponent_at(2, alpha);
            let value = empirical_moments(residuals, 0.0, p, cfg).and_then(|m| g2_closed_form(&m));
            match value {
                Ok(v) if v.is_finite() => CurvePoint {
                    alpha,
                    value: v,
                    degenerate: false,
                },
                _ => CurvePoint {
                    alpha,
                    value: f64::NAN,
                    degenerate: true,
                },
            }
        })
        .collect()
}

/// Plug-in minimisation of the empirical `g2`. Samples of 100 or more also
/// carry the entropy diagnostic.
pub fn calibrate_plugin(sample: &[f64], cfg: &PluginConfig) -> Result<CalibrationResult> {
    stats::check_sample(sample)?;
    if sample.len() < MIN_PLUGIN_N {
        return Err(Error::SmallSample {
            got: sample.len(),
            min: MIN_PLUGIN_N,
        });
    }
    let grid = alpha_grid(cfg.grid_step, cfg.band)?;
    let center = stats::mean(sample);
    let residuals: Vec<f64> = sample.iter().map(|x| x - center).collect();
    let curve = empirical_g2_curve(&residuals, &grid, &cfg.moments);
    let best = argmin(&curve)?;

    let mut interval = (best.alpha, best.alpha);
    let mut spread = None;
    if cfg.bootstrap_b > 0 {
        let n = residuals.len();
        let mut stars = Vec::with_capacity(cfg.bootstrap_b);
        let mut resample = alloc::vec![0.0; n];
        for b in 0..cfg.bootstrap_b {
            let mut r = rng::substream(cfg.seed, b as u64);
            for slot in resample.iter_mut() {
                *slot = residuals[r.random_range(0..n)];
            }
            let c = stats::mean(&resample);
            for v in resample.iter_mut() {
                *v -= c;
            }
            if let Ok(p) = argmin(&empirical_g2_curve(&resample, &grid, &cfg.moments)) {
                stars.push(p.alpha);
            }
        }
        if stars.len() >= 2 {
            let s = stats::sorted(&stars);
            let lo = stats::quantile_sorted(&s, 0.05).min(best.alpha);
            let hi = stats::quantile_sorted(&s, 0.95).max(best.alpha);
            interval = (lo, hi);
            spread = Some(stats::sd(&stars));
        }
    }
    let band_sensitive = near_band(best.alpha, cfg.grid_step, cfg.band);
    let entropy = if sample.len() >= MIN_ENTROPY_N {
        entropy_diagnostic(&residuals).ok()
    } else {
        None
    };
    Ok(CalibrationResult {
        alpha_star: best.alpha,
        criterion: Criterion::Plugin,
        curve,
        sensitivity_interval: interval,
        ambiguous: spread.is_some_and(|s| s > TAU_ALPHA),
        band_sensitive,
        alpha_spread: spread,
        entropy,
    })
}

/// Grid search over `alpha` minimising the bootstrap variance of the full
/// estimator. Resamples are shared across grid points.
pub fn calibrate_grid_mc(
    sample: &[f64],
    grid: &[f64],
    bootstrap_b: usize,
    seed: u64,
    solver: &SolverConfig,
) -> Result<CalibrationResult> {
    stats::check_sample(sample)?;
    if bootstrap_b < MIN_BOOTSTRAP {
        return Err(Error::InvalidArgument("grid search needs at least 100 bootstrap resamples"));
    }
    if grid.is_empty() {
        return Err(Error::InvalidArgument("alpha grid is empty"));
    }
    let alphas = grid
        .iter()
        .map(|&a| AlphaParam::with_band(a, solver.degeneracy_band))
        .collect::<Result<Vec<_>>>()?;
    let n = sample.len();
    let resamples: Vec<Vec<f64>> = (0..bootstrap_b)
        .map(|b| {
            let mut r = rng::substream(seed, b as u64);
            (0..n).map(|_| sample[r.random_range(0..n)]).collect()
        })
        .collect();
    let mut curve = Vec::with_capacity(grid.len());
    for alpha in alphas {
        let degenerate = grid.len() > 1 && alpha.is_degenerate();
        let mut estimates = Vec::with_capacity(bootstrap_b);
        for x in &resamples {
            estimates.push(estimate_full(x, alpha, solver)?.theta_hat);
        }
        curve.push(CurvePoint {
            alpha: alpha.value(),
            value: stats::variance_pop(&estimates),
            degenerate,
        });
    }
    let best = argmin(&curve)?;
    let interval = level_set(&curve, best.value, GRID_VARIANCE_SLACK, true);
    Ok(CalibrationResult {
        alpha_star: best.alpha,
        criterion: Criterion::GridMc,
        curve,
        sensitivity_interval: interval,
        ambiguous: interval.1 - interval.0 > 2.0 * TAU_ALPHA,
        band_sensitive: false,
        alpha_spread: None,
        entropy: None,
    })
}

/// KDE plug-in entropy `H = -mean ln f(xi_n)` with an Epanechnikov kernel and
/// Silverman bandwidth, and the derived `k = e^H / (2 sd)`.
pub fn entropy_diagnostic(residuals: &[f64]) -> Result<EntropyDiagnostic> {
    stats::check_sample(residuals)?;
    let n = residuals.len();
    if n < MIN_ENTROPY_N {
        return Err(Error::SmallSample { got: n, min: MIN_ENTROPY_N });
    }
    let sd = stats::sd(residuals);
    if !(sd > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let iqr = stats::iqr(residuals);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    let h = 0.9 * spread * fmath::powf(n as f64, -0.2);
    let s = stats::sorted(residuals);
    let mut lo = 0;
    let mut log_sum = 0.0;
    for i in 0..n {
        while s[i] - s[lo] >= h {
            lo += 1;
        }
        let mut acc = 0.0;
        for &y in &s[lo..] {
            let u = (y - s[i]) / h;
            if u >= 1.0 {
                break;
            }
            acc += 0.75 * (1.0 - u * u);
        }
        log_sum += fmath::ln(acc / (n as f64 * h));
    }
    let h_hat = -log_sum / n as f64;
    let (_, g4) = stats::shape_cumulants(residuals);
    Ok(EntropyDiagnostic {
        h_hat,
        k_hat: fmath::exp(h_hat) / (2.0 * sd),
        kappa_hat: (g4 > -3.0).then(|| 1.0 / fmath::sqrt(g4 + 3.0)),
        bandwidth: h,
        kernel: Kernel::Epanechnikov,
    })
}

/// A point of the `(kappa, k)` plane; `None` marks an undefined coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopographicPoint {
    pub kappa: Option<f64>,
    pub k: Option<f64>,
}

impl TopographicPoint {
    pub fn is_defined(&self) -> bool {
        self.kappa.is_some() && self.k.is_some()
    }
}

/// Theoretical coordinates; both are undefined for infinite variance.
pub fn topographic_coords(spec: &DistributionSpec) -> Result<TopographicPoint> {
    let s = spec.shape_summary()?;
    Ok(TopographicPoint {
        kappa: s.contrexcess,
        k: s.entropy_coeff,
    })
}

/// Empirical coordinates from residuals through the entropy diagnostic.
pub fn topographic_coords_empirical(residuals: &[f64]) -> Result<TopographicPoint> {
    let d = entropy_diagnostic(residuals)?;
    Ok(TopographicPoint {
        kappa: d.kappa_hat,
        k: Some(d.k_hat),
    })
}

/// User-supplied `alpha*(gamma3, gamma4)` rows for nearest-neighbour lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaTable {
    rows: Vec<(f64, f64, f64)>,
}

impl AlphaTable {
    pub fn new(rows: Vec<(f64, f64, f64)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("alpha table is empty"));
        }
        if rows.iter().any(|r| !(r.0.is_finite() && r.1.is_finite() && (0.0..=1.0).contains(&r.2))) {
            return Err(Error::InvalidArgument("alpha table rows need finite cumulants and alpha in [0, 1]"));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[(f64, f64, f64)] {
        &self.rows
    }

    pub fn lookup(&self, gamma3: f64, gamma4: f64) -> f64 {
        let d = |r: &(f64, f64, f64)| (r.0 - gamma3) * (r.0 - gamma3) + (r.1 - gamma4) * (r.1 - gamma4);
        self.rows
            .iter()
            .min_by(|a, b| d(a).total_cmp(&d(b)))
            .map(|r| r.2)
            .unwrap_or(f64::NAN)
    }
}

/// Looks up `alpha*` from the sample cumulants.
pub fn calibrate_table(sample: &[f64], table: &AlphaTable) -> Result<CalibrationResult> {
    stats::check_sample(sample)?;
    if !(stats::sd(sample) > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let (g3, g4) = stats::shape_cumulants(sample);
    let alpha = table.lookup(g3, g4);
    Ok(CalibrationResult {
        alpha_star: alpha,
        criterion: Criterion::TableLookup,
        curve: Vec::new(),
        sensitivity_interval: (alpha, alpha),
        ambiguous: false,
        band_sensitive: false,
        alpha_spread: None,
        entropy: None,
    })
}
