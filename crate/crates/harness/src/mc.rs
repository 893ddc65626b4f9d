//! Monte Carlo cells: every (distribution, N) pair draws `M` samples from
//! per-replicate substreams, and every requested estimator runs on the same
//! samples. Replicates run in parallel; results are gathered in replicate
//! order, so output does not depend on the worker count.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use patp_core::baselines::{run_baseline, BaselineId};
use patp_core::efficiency::g2_point;
use patp_core::estimators::{estimate_full, estimate_ols, estimate_proxy};
use patp_core::{rng, AlphaParam, DistributionSpec, SolverConfig};
use rayon::prelude::*;

use crate::error::{HarnessError, Result};

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "PATP_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    Ols,
    Proxy,
    Full,
    Baseline(BaselineId),
}

impl EstimatorKind {
    pub fn uses_alpha(&self) -> bool {
        matches!(self, EstimatorKind::Proxy | EstimatorKind::Full)
    }

    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Ols => "ols",
            EstimatorKind::Proxy => "proxy",
            EstimatorKind::Full => "full",
            EstimatorKind::Baseline(b) => b.as_str(),
        }
    }

    pub fn baselines() -> Vec<EstimatorKind> {
        BaselineId::ALL.into_iter().map(EstimatorKind::Baseline).collect()
    }

    /// Runs the estimator on one sample.
    pub fn estimate(
        &self,
        spec: &DistributionSpec,
        sample: &[f64],
        alpha: Option<AlphaParam>,
        solver: &SolverConfig,
    ) -> patp_core::Result<f64> {
        let need_alpha = || alpha.ok_or(patp_core::Error::InvalidArgument("estimator needs alpha"));
        match self {
            EstimatorKind::Ols => Ok(estimate_ols(sample)?.theta_hat),
            EstimatorKind::Proxy => Ok(estimate_proxy(sample, need_alpha()?, solver)?.theta_hat),
            EstimatorKind::Full => {
                if !spec.has_finite_variance() {
                    return Err(patp_core::Error::NonFiniteMoment {
                        family: spec.name(),
                        order: 2.0,
                    });
                }
                Ok(estimate_full(sample, need_alpha()?, solver)?.theta_hat)
            }
            EstimatorKind::Baseline(b) => run_baseline(*b, sample),
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ols" => Ok(EstimatorKind::Ols),
            "proxy" => Ok(EstimatorKind::Proxy),
            "full" => Ok(EstimatorKind::Full),
            other => other
                .parse::<BaselineId>()
                .map(EstimatorKind::Baseline)
                .map_err(|_| HarnessError::Design(format!("unknown estimator `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McDesign {
    pub distributions: Vec<DistributionSpec>,
    pub n_values: Vec<usize>,
    pub alpha_values: Vec<f64>,
    pub replicates: usize,
    pub base_seed: u64,
    pub estimators: Vec<EstimatorKind>,
    pub solver: SolverConfig,
}

impl McDesign {
    /// N in {50, 100, 200, 500}, M = 1000, the four ablation alphas and the
    /// four MC distributions.
    pub fn paper_default(base_seed: u64) -> Self {
        Self {
            distributions: vec![
                DistributionSpec::laplace(),
                DistributionSpec::gg(1.5).expect("valid shape"),
                DistributionSpec::gg(4.0).expect("valid shape"),
                DistributionSpec::beta(2.0, 5.0).expect("valid shape"),
            ],
            n_values: vec![50, 100, 200, 500],
            alpha_values: vec![0.05, 0.30, 0.70, 0.95],
            replicates: 1000,
            base_seed,
            estimators: vec![EstimatorKind::Ols, EstimatorKind::Proxy, EstimatorKind::Full],
            solver: SolverConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(HarnessError::Design(m.to_string()));
        if self.replicates < 1 {
            return bad("replicates must be at least 1");
        }
        if self.distributions.is_empty() || self.n_values.is_empty() || self.estimators.is_empty() {
            return bad("distributions, n values and estimators must be non-empty");
        }
        if self.n_values.contains(&0) {
            return bad("sample sizes must be positive");
        }
        if self.estimators.iter().any(EstimatorKind::uses_alpha) && self.alpha_values.is_empty() {
            return bad("alpha-dependent estimators need at least one alpha");
        }
        if let Some(a) = self.alpha_values.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(HarnessError::Design(format!("alpha {a} outside [0, 1]")));
        }
        self.solver.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McRecord {
    pub distribution: String,
    pub n: usize,
    pub alpha: Option<f64>,
    pub estimator: String,
    pub var: f64,
    pub bias: f64,
    pub mse: f64,
    /// `Var(OLS) / Var(estimator)` on the replicates where both succeeded.
    pub are: f64,
    /// `Var(estimator) / Var(OLS)`.
    pub g2_emp: f64,
    pub g2_theo: Option<f64>,
    /// Successful replicates.
    pub replicates: usize,
    /// Seed of the (distribution, N) cell.
    pub seed: u64,
    /// MSE relative to the sample mean.
    pub rel_mse: f64,
    pub failures: usize,
}

pub const MC_HEADER: [&str; 14] = [
    "distribution",
    "n",
    "alpha",
    "estimator",
    "var",
    "bias",
    "mse",
    "are",
    "g2_emp",
    "g2_theo",
    "replicates",
    "seed",
    "rel_mse",
    "failures",
];

/// Stable 64-bit FNV-1a, used to derive cell seeds from labels.
fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Seed of the (distribution, N) cell.
pub fn cell_seed(base_seed: u64, spec: &DistributionSpec, n: usize) -> u64 {
    rng::mix_seed(base_seed, fnv1a(format!("{spec}:{n}").as_bytes()))
}

/// Draws the `M` samples of a cell.
pub fn cell_samples(spec: &DistributionSpec, n: usize, seed: u64, replicates: usize) -> Vec<Vec<f64>> {
    (0..replicates)
        .into_par_iter()
        .map(|r| spec.sample_with(&mut rng::substream(seed, r as u64), n))
        .collect()
}

struct Column {
    kind: EstimatorKind,
    alpha: Option<AlphaParam>,
}

fn columns(design: &McDesign) -> Result<Vec<Column>> {
    let mut out = vec![Column {
        kind: EstimatorKind::Ols,
        alpha: None,
    }];
    for &kind in &design.estimators {
        if kind == EstimatorKind::Ols {
            continue;
        }
        if kind.uses_alpha() {
            for &a in &design.alpha_values {
                let alpha = AlphaParam::with_band(a, design.solver.degeneracy_band)?;
                out.push(Column {
                    kind,
                    alpha: Some(alpha),
                });
            }
        } else {
            out.push(Column { kind, alpha: None });
        }
    }
    Ok(out)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn var_pop(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
}

/// Runs the design with the worker count from `PATP_THREADS`, or rayon's
/// default when unset.
pub fn run_mc(design: &McDesign) -> Result<Vec<McRecord>> {
    let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok());
    run_mc_with_threads(design, threads)
}

pub fn run_mc_with_threads(design: &McDesign, threads: Option<usize>) -> Result<Vec<McRecord>> {
    design.validate()?;
    match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build()?;
            pool.install(|| run_cells(design))
        }
        None => run_cells(design),
    }
}

/// [`run_mc`] with the six baselines as the estimator set.
pub fn run_baseline_mc(design: &McDesign) -> Result<Vec<McRecord>> {
    let mut d = design.clone();
    d.estimators = EstimatorKind::baselines();
    run_mc(&d)
}

fn run_cells(design: &McDesign) -> Result<Vec<McRecord>> {
    let cols = columns(design)?;
    let mut theo: HashMap<(String, u64), Option<f64>> = HashMap::new();
    let mut records = Vec::new();
    for spec in &design.distributions {
        let truth = spec.center();
        for &n in &design.n_values {
            let seed = cell_seed(design.base_seed, spec, n);
            let results: Vec<Vec<Option<f64>>> = (0..design.replicates)
                .into_par_iter()
                .map(|r| {
                    let sample = spec.sample_with(&mut rng::substream(seed, r as u64), n);
                    cols.iter()
                        .map(|c| c.kind.estimate(spec, &sample, c.alpha, &design.solver).ok())
                        .collect()
                })
                .collect();

            let ols_all: Vec<f64> = results.iter().filter_map(|row| row[0]).collect();
            let ols_mse = mean(&ols_all.iter().map(|t| (t - truth) * (t - truth)).collect::<Vec<_>>());
            for (j, col) in cols.iter().enumerate() {
                if j == 0 && !design.estimators.contains(&EstimatorKind::Ols) {
                    continue;
                }
                let (mut est, mut ols) = (Vec::new(), Vec::new());
                for row in &results {
                    if let (Some(e), Some(o)) = (row[j], row[0]) {
                        est.push(e);
                        ols.push(o);
                    }
                }
                let failures = design.replicates - est.len();
                let alpha = col.alpha.map(|a| a.value());
                let g2_theo = alpha.and_then(|a| {
                    *theo
                        .entry((spec.to_string(), a.to_bits()))
                        .or_insert_with(|| g2_point(spec, a).ok().map(|p| p.g2))
                });
                let record = if est.is_empty() {
                    McRecord {
                        distribution: spec.to_string(),
                        n,
                        alpha,
                        estimator: col.kind.name().to_string(),
                        var: f64::NAN,
                        bias: f64::NAN,
                        mse: f64::NAN,
                        are: f64::NAN,
                        g2_emp: f64::NAN,
                        g2_theo,
                        replicates: 0,
                        seed,
                        rel_mse: f64::NAN,
                        failures,
                    }
                } else {
                    let var = var_pop(&est);
                    let bias = mean(&est) - truth;
                    let mse = mean(&est.iter().map(|t| (t - truth) * (t - truth)).collect::<Vec<_>>());
                    let var_ols = var_pop(&ols);
                    McRecord {
                        distribution: spec.to_string(),
                        n,
                        alpha,
                        estimator: col.kind.name().to_string(),
                        var,
                        bias,
                        mse,
                        are: var_ols / var,
                        g2_emp: var / var_ols,
                        g2_theo,
                        replicates: est.len(),
                        seed,
                        rel_mse: mse / ols_mse,
                        failures,
                    }
                };
                records.push(record);
            }
        }
    }
    Ok(records)
}
