//! Per-call wall-clock timings on Laplace samples.

use std::hint::black_box;
use std::time::Instant;

use patp_core::{AlphaParam, DistributionSpec, SolverConfig};

use crate::error::{HarnessError, Result};
use crate::mc::EstimatorKind;

pub const MIN_BATCH: usize = 10;
const BATCHES: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub estimator: String,
    pub n: usize,
    /// Median over batches of the mean per-call time.
    pub per_call_ms: f64,
    pub batch_size: usize,
}

pub fn run_bench(n_values: &[usize], estimators: &[EstimatorKind], alpha: f64, batch: usize) -> Result<Vec<BenchRecord>> {
    if batch < MIN_BATCH {
        return Err(HarnessError::Usage(format!("batch must be at least {MIN_BATCH}")));
    }
    let alpha = AlphaParam::new(alpha)?;
    let solver = SolverConfig::default();
    let spec = DistributionSpec::laplace();
    let mut out = Vec::new();
    for &n in n_values {
        let sample = spec.sample(n, 0x5eed ^ n as u64)?;
        for kind in estimators {
            let a = kind.uses_alpha().then_some(alpha);
            kind.estimate(&spec, &sample, a, &solver)?;
            let mut per_call: Vec<f64> = (0..BATCHES)
                .map(|_| {
                    let t = Instant::now();
                    for _ in 0..batch {
                        let _ = black_box(kind.estimate(&spec, black_box(&sample), a, &solver));
                    }
                    t.elapsed().as_secs_f64() * 1e3 / batch as f64
                })
                .collect();
            per_call.sort_by(f64::total_cmp);
            out.push(BenchRecord {
                estimator: kind.name().to_string(),
                n,
                per_call_ms: per_call[BATCHES / 2].max(f64::MIN_POSITIVE),
                batch_size: batch,
            });
        }
    }
    Ok(out)
}

/// `time(n_hi) / time(n_lo)` for one estimator, if both were benched.
pub fn scaling_ratio(records: &[BenchRecord], estimator: &str, n_lo: usize, n_hi: usize) -> Option<f64> {
    let t = |n| {
        records
            .iter()
            .find(|r| r.estimator == estimator && r.n == n)
            .map(|r| r.per_call_ms)
    };
    Some(t(n_hi)? / t(n_lo)?)
}
