//! File formats: data files, design files, alpha tables and CSV output.

use std::fs;
use std::io::Write;
use std::path::Path;

use patp_core::calibration::{AlphaTable, CalibrationResult, TopographicPoint};
use patp_core::{DistributionSpec, G2Curve, SolverConfig};
use serde::Deserialize;

use crate::bench::BenchRecord;
use crate::error::{HarnessError, Result};
use crate::mc::{EstimatorKind, McDesign, McRecord, MC_HEADER};

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

/// Parses one real per line; `#` starts a comment, blank lines are skipped.
pub fn parse_data(text: &str, path: &Path) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let v: f64 = body.parse().map_err(|_| HarnessError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg: format!("not a number: `{body}`"),
        })?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(HarnessError::Parse {
            path: path.to_path_buf(),
            line: 0,
            msg: "no values".into(),
        });
    }
    Ok(out)
}

pub fn read_data(path: &Path) -> Result<Vec<f64>> {
    parse_data(&read_to_string(path)?, path)
}

/// TOML design file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignFile {
    pub distributions: Vec<String>,
    pub n: Vec<usize>,
    #[serde(default)]
    pub alpha: Vec<f64>,
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    pub estimators: Vec<String>,
}

impl DesignFile {
    pub fn into_design(self) -> Result<McDesign> {
        Ok(McDesign {
            distributions: self
                .distributions
                .iter()
                .map(|d| d.parse::<DistributionSpec>())
                .collect::<patp_core::Result<_>>()?,
            n_values: self.n,
            alpha_values: self.alpha,
            replicates: self.replicates,
            base_seed: self.seed,
            estimators: self
                .estimators
                .iter()
                .map(|e| e.parse::<EstimatorKind>())
                .collect::<Result<_>>()?,
            solver: SolverConfig::default(),
        })
    }
}

pub fn read_design(path: &Path) -> Result<McDesign> {
    let text = read_to_string(path)?;
    let file: DesignFile = toml::from_str(&text).map_err(|e| HarnessError::Parse {
        path: path.to_path_buf(),
        line: 0,
        msg: e.to_string(),
    })?;
    file.into_design()
}

#[derive(Debug, Deserialize)]
struct TableRow {
    gamma3: f64,
    gamma4: f64,
    alpha: f64,
}

/// CSV with header `gamma3,gamma4,alpha`.
pub fn read_alpha_table(path: &Path) -> Result<AlphaTable> {
    let mut rdr = csv::Reader::from_path(path)?;
    let rows = rdr
        .deserialize::<TableRow>()
        .map(|r| r.map(|r| (r.gamma3, r.gamma4, r.alpha)))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(AlphaTable::new(rows)?)
}

/// Shortest round-trip decimal; empty for NaN.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, fmt_f64)
}

pub fn write_mc_csv<W: Write>(out: W, records: &[McRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MC_HEADER)?;
    for r in records {
        w.write_record([
            r.distribution.clone(),
            r.n.to_string(),
            fmt_opt(r.alpha),
            r.estimator.clone(),
            fmt_f64(r.var),
            fmt_f64(r.bias),
            fmt_f64(r.mse),
            fmt_f64(r.are),
            fmt_f64(r.g2_emp),
            fmt_opt(r.g2_theo),
            r.replicates.to_string(),
            r.seed.to_string(),
            fmt_f64(r.rel_mse),
            r.failures.to_string(),
        ])?;
    }
    w.flush().map_err(|e| HarnessError::io("<csv>", e))?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(out: W, curve: &G2Curve) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alpha", "g2", "degenerate_flag"])?;
    for p in &curve.points {
        w.write_record([fmt_f64(p.alpha), fmt_f64(p.g2), u8::from(p.degenerate).to_string()])?;
    }
    w.flush().map_err(|e| HarnessError::io("<csv>", e))?;
    Ok(())
}

/// Grid rows `alpha,criterion_value,flag` followed by one summary row whose
/// flag field carries `key=value` pairs.
pub fn write_calibration_csv<W: Write>(out: W, result: &CalibrationResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alpha", "criterion_value", "flag"])?;
    for p in &result.curve {
        let flag = if p.degenerate {
            "degenerate"
        } else if p.alpha == result.alpha_star {
            "argmin"
        } else {
            ""
        };
        w.write_record([fmt_f64(p.alpha), fmt_f64(p.value), flag.to_string()])?;
    }
    let mut summary = format!(
        "summary;criterion={};lo={};hi={};ambiguous={};band_sensitive={}",
        result.criterion.as_str(),
        fmt_f64(result.sensitivity_interval.0),
        fmt_f64(result.sensitivity_interval.1),
        result.ambiguous,
        result.band_sensitive,
    );
    if let Some(s) = result.alpha_spread {
        summary.push_str(&format!(";alpha_sd={}", fmt_f64(s)));
    }
    if let Some(e) = &result.entropy {
        summary.push_str(&format!(";k_hat={};kappa_hat={}", fmt_f64(e.k_hat), fmt_opt(e.kappa_hat)));
    }
    w.write_record([fmt_f64(result.alpha_star), fmt_f64(result.min_value()), summary])?;
    w.flush().map_err(|e| HarnessError::io("<csv>", e))?;
    Ok(())
}

pub fn write_bench_csv<W: Write>(out: W, records: &[BenchRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["estimator", "n", "per_call_ms", "batch_size", "nondeterministic"])?;
    for r in records {
        w.write_record([
            r.estimator.clone(),
            r.n.to_string(),
            fmt_f64(r.per_call_ms),
            r.batch_size.to_string(),
            "1".to_string(),
        ])?;
    }
    w.flush().map_err(|e| HarnessError::io("<csv>", e))?;
    Ok(())
}

/// Shape table row.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeRow {
    pub distribution: String,
    pub gamma3: Option<f64>,
    pub gamma4: Option<f64>,
    pub point: TopographicPoint,
}

pub fn write_shapes_csv<W: Write>(out: W, rows: &[ShapeRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["distribution", "gamma3", "gamma4", "kappa", "k"])?;
    for r in rows {
        w.write_record([
            r.distribution.clone(),
            fmt_opt(r.gamma3),
            fmt_opt(r.gamma4),
            fmt_opt(r.point.kappa),
            fmt_opt(r.point.k),
        ])?;
    }
    w.flush().map_err(|e| HarnessError::io("<csv>", e))?;
    Ok(())
}

/// Creates `path` and hands a buffered writer to `f`.
pub fn with_file<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut std::io::BufWriter<fs::File>) -> Result<()>,
{
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    let file = fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut buf = std::io::BufWriter::new(file);
    f(&mut buf)?;
    buf.flush().map_err(|e| HarnessError::io(path, e))
}
