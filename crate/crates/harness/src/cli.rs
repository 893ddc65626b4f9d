//! Command-line interface.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use patp_core::calibration::{
    calibrate_grid_mc, calibrate_oracle, calibrate_plugin, calibrate_table, topographic_coords, PluginConfig,
};
use patp_core::efficiency::{alpha_grid, g2_sweep};
use patp_core::estimators::{estimate_full, estimate_ols, estimate_proxy};
use patp_core::{AlphaParam, DistributionSpec, SolverConfig};

use crate::bench::run_bench;
use crate::error::{HarnessError, Result};
use crate::io;
use crate::mc::{run_baseline_mc, run_mc, EstimatorKind, McDesign};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "patp", version, about = "PATP location estimation toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Full,
    Proxy,
    Ols,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    Oracle,
    Plugin,
    Grid,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Theoretical g2(alpha) curve of a distribution.
    Sweep {
        #[arg(long)]
        dist: DistributionSpec,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 0.05)]
        band: f64,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Location estimate of a data file or of a synthetic sample.
    Estimate {
        #[arg(long, alias = "dist-file", conflicts_with = "dist")]
        data: Option<PathBuf>,
        #[arg(long, requires = "n")]
        dist: Option<DistributionSpec>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Full)]
        method: MethodArg,
    },
    /// Monte Carlo design from a TOML file or from flags.
    Mc {
        #[arg(long)]
        design: Option<PathBuf>,
        #[command(flatten)]
        flags: DesignFlags,
        #[arg(long)]
        estimators: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// The six robust baselines on a Monte Carlo design.
    Baselines {
        #[command(flatten)]
        flags: DesignFlags,
        #[arg(long)]
        out: PathBuf,
    },
    /// Choose alpha for a data file (or a distribution, for the oracle).
    Calibrate {
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        dist: Option<DistributionSpec>,
        #[arg(long, value_enum)]
        criterion: CriterionArg,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 0.05)]
        band: f64,
        #[arg(long, default_value_t = 200)]
        bootstrap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV `gamma3,gamma4,alpha` for the table criterion.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-call timings on Laplace samples.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "ols,median,huber,proxy,full")]
        estimators: Vec<String>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 20)]
        batch: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate every CSV of the reproduction set.
    ReproduceAll {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
        /// Replicates per cell.
        #[arg(long, default_value_t = 1000)]
        replicates: usize,
        #[arg(long)]
        skip_bench: bool,
    },
}

#[derive(Debug, clap::Args)]
pub struct DesignFlags {
    #[arg(long, value_delimiter = ',')]
    pub dist: Vec<DistributionSpec>,
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub replicates: usize,
    #[arg(long, default_value_t = 20240601)]
    pub seed: u64,
}

impl DesignFlags {
    fn into_design(self, estimators: Vec<EstimatorKind>) -> McDesign {
        let mut d = McDesign::paper_default(self.seed);
        if !self.dist.is_empty() {
            d.distributions = self.dist;
        }
        if !self.n.is_empty() {
            d.n_values = self.n;
        }
        if !self.alpha.is_empty() {
            d.alpha_values = self.alpha;
        }
        d.replicates = self.replicates;
        d.estimators = estimators;
        d
    }
}

fn parse_estimators(list: &str) -> Result<Vec<EstimatorKind>> {
    list.split(',').map(|s| s.trim().parse()).collect()
}

fn emit<F>(out: Option<&Path>, stdout: &mut dyn Write, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match out {
        Some(p) => io::with_file(p, |w| f(w)),
        None => f(stdout),
    }
}

/// Parses `argv` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    main_with_output(argv, &mut lock)
}

/// [`main_with_args`] with command output sent to `stdout`.
pub fn main_with_output<I, T>(argv: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(HarnessError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

pub fn run(command: Command, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::Sweep { dist, step, band, out } => {
            let curve = g2_sweep(&dist, step, band)?;
            emit(out.as_deref(), stdout, |w| io::write_sweep_csv(w, &curve))?;
            eprintln!(
                "{dist}: argmin alpha={} g2={:.6}{}{}",
                curve.argmin_alpha,
                curve.argmin_g2,
                if curve.flat { " (flat)" } else { "" },
                if curve.band_sensitive { " (band sensitive)" } else { "" },
            );
            Ok(())
        }
        Command::Estimate {
            data,
            dist,
            n,
            seed,
            alpha,
            method,
        } => {
            let sample = match (data, dist) {
                (Some(path), _) => io::read_data(&path)?,
                (None, Some(spec)) => spec.sample(n.unwrap_or(0), seed)?,
                (None, None) => return Err(HarnessError::Usage("estimate needs --data or --dist".into())),
            };
            let alpha = AlphaParam::new(alpha)?;
            let cfg = SolverConfig::default();
            let r = match method {
                MethodArg::Full => estimate_full(&sample, alpha, &cfg)?,
                MethodArg::Proxy => estimate_proxy(&sample, alpha, &cfg)?,
                MethodArg::Ols => estimate_ols(&sample)?,
            };
            let line = format!(
                "{},{},{},{},{},{}",
                r.theta_hat,
                r.method,
                r.outer_iters,
                r.final_step,
                io::fmt_f64(r.cond_last),
                r.converged
            );
            writeln!(stdout, "theta_hat,method,outer_iters,final_step,cond,converged\n{line}")
                .map_err(|e| HarnessError::io("<stdout>", e))
        }
        Command::Mc {
            design,
            flags,
            estimators,
            out,
        } => {
            let design = match design {
                Some(p) => io::read_design(&p)?,
                None => {
                    let est = match estimators {
                        Some(list) => parse_estimators(&list)?,
                        None => vec![EstimatorKind::Ols, EstimatorKind::Proxy, EstimatorKind::Full],
                    };
                    flags.into_design(est)
                }
            };
            let recs = run_mc(&design)?;
            io::with_file(&out.join("mc.csv"), |w| io::write_mc_csv(w, &recs))
        }
        Command::Baselines { flags, out } => {
            let design = flags.into_design(EstimatorKind::baselines());
            let recs = run_baseline_mc(&design)?;
            io::with_file(&out.join("baselines.csv"), |w| io::write_mc_csv(w, &recs))
        }
        Command::Calibrate {
            data,
            dist,
            criterion,
            step,
            band,
            bootstrap,
            seed,
            table,
            out,
        } => {
            let sample = || match &data {
                Some(p) => io::read_data(p),
                None => Err(HarnessError::Usage("this criterion needs --data".into())),
            };
            let result = match criterion {
                CriterionArg::Oracle => {
                    let spec = dist.ok_or_else(|| HarnessError::Usage("oracle calibration needs --dist".into()))?;
                    calibrate_oracle(&spec, step, band)?
                }
                CriterionArg::Plugin => {
                    let cfg = PluginConfig {
                        grid_step: step,
                        band,
                        bootstrap_b: bootstrap,
                        seed,
                        ..PluginConfig::default()
                    };
                    calibrate_plugin(&sample()?, &cfg)?
                }
                CriterionArg::Grid => {
                    let grid = alpha_grid(step, band)?;
                    calibrate_grid_mc(&sample()?, &grid, bootstrap, seed, &SolverConfig::default())?
                }
                CriterionArg::Table => {
                    let path = table.ok_or_else(|| HarnessError::Usage("table calibration needs --table".into()))?;
                    calibrate_table(&sample()?, &io::read_alpha_table(&path)?)?
                }
            };
            emit(out.as_deref(), stdout, |w| io::write_calibration_csv(w, &result))
        }
        Command::Bench {
            n,
            estimators,
            alpha,
            batch,
            out,
        } => {
            let est = estimators.iter().map(|s| s.parse()).collect::<Result<Vec<EstimatorKind>>>()?;
            let recs = run_bench(&n, &est, alpha, batch)?;
            emit(out.as_deref(), stdout, |w| io::write_bench_csv(w, &recs))
        }
        Command::ReproduceAll {
            out,
            seed,
            replicates,
            skip_bench,
        } => reproduce_all(&out, seed, replicates, skip_bench),
    }
}

/// Distributions of the sweep and shape tables.
pub fn canonical_specs() -> Vec<DistributionSpec> {
    let mut v = vec![
        DistributionSpec::gaussian(),
        DistributionSpec::laplace(),
        DistributionSpec::uniform(),
        DistributionSpec::arcsine(),
        DistributionSpec::triangular(),
    ];
    for b in [0.5, 1.5, 4.0] {
        v.push(DistributionSpec::gg(b).expect("valid shape"));
    }
    v.push(DistributionSpec::beta(2.0, 5.0).expect("valid shape"));
    v
}

fn file_label(spec: &DistributionSpec) -> String {
    spec.to_string().replace([':', '.'], "_")
}

/// Writes the sweeps, shape table, oracle calibrations, Monte Carlo and
/// baseline CSVs and, unless skipped, the benchmark into `out`.
pub fn reproduce_all(out: &Path, seed: u64, replicates: usize, skip_bench: bool) -> Result<()> {
    for spec in canonical_specs() {
        let curve = g2_sweep(&spec, 0.05, 0.05)?;
        io::with_file(&out.join(format!("sweep_{}.csv", file_label(&spec))), |w| {
            io::write_sweep_csv(w, &curve)
        })?;
        let cal = calibrate_oracle(&spec, 0.05, 0.05)?;
        io::with_file(&out.join(format!("calibration_{}.csv", file_label(&spec))), |w| {
            io::write_calibration_csv(w, &cal)
        })?;
    }
    eprintln!("sweeps written");

    let mut shapes = Vec::new();
    for spec in canonical_specs().into_iter().chain([DistributionSpec::cauchy()]) {
        let (gamma3, gamma4) = spec.cumulants();
        shapes.push(io::ShapeRow {
            distribution: spec.to_string(),
            gamma3,
            gamma4,
            point: topographic_coords(&spec)?,
        });
    }
    io::with_file(&out.join("shapes.csv"), |w| io::write_shapes_csv(w, &shapes))?;

    let mut design = McDesign::paper_default(seed);
    design.replicates = replicates;
    let recs = run_mc(&design)?;
    io::with_file(&out.join("mc.csv"), |w| io::write_mc_csv(w, &recs))?;
    eprintln!("mc written");

    let recs = run_baseline_mc(&design)?;
    io::with_file(&out.join("baselines.csv"), |w| io::write_mc_csv(w, &recs))?;
    eprintln!("baselines written");

    if !skip_bench {
        let est = [
            EstimatorKind::Ols,
            EstimatorKind::Baseline(patp_core::baselines::BaselineId::Median),
            EstimatorKind::Baseline(patp_core::baselines::BaselineId::Huber),
            EstimatorKind::Proxy,
            EstimatorKind::Full,
        ];
        let recs = run_bench(&[1_000, 10_000, 100_000], &est, 0.05, 10)?;
        io::with_file(&out.join("bench.csv"), |w| io::write_bench_csv(w, &recs))?;
        eprintln!("bench written");
    }
    Ok(())
}
