//! Acceptance suite: one PASS/FAIL line per criterion, then the supplementary
//! calibration and benchmark checks. Exits nonzero if any line fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use patp_core::basis::{basis_value, collision_roots, exponent_at};
use patp_core::baselines::BaselineId;
use patp_core::calibration::{
    calibrate_grid_mc, calibrate_oracle, calibrate_plugin, entropy_diagnostic, topographic_coords, PluginConfig,
};
use patp_core::efficiency::{g2_closed_form, g2_point, g2_sweep, CorrelantSystem};
use patp_core::estimators::{estimate_full, estimate_ols, estimate_proxy, Method};
use patp_core::moments::{empirical_moments, theoretical_moments};
use patp_core::quadrature::quadrature_moment;
use patp_core::{
    rng, AlphaParam, BasisIndex, DistributionSpec, Error, FractionalMomentSet, MomentEstimatorConfig,
    SmoothingConfig, SolverConfig,
};
use patp_harness::bench::{run_bench, scaling_ratio};
use patp_harness::mc::{run_baseline_mc, run_mc_with_threads, EstimatorKind, McDesign, McRecord};

const SEED: u64 = 20240601;
const ABLATION: [f64; 4] = [0.05, 0.30, 0.70, 0.95];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }

    fn all(parts: Vec<Outcome>) -> Self {
        let pass = parts.iter().all(|o| o.pass);
        let detail = parts
            .iter()
            .map(|o| format!("{}{}", if o.pass { "" } else { "!" }, o.detail))
            .collect::<Vec<_>>()
            .join("; ");
        Self { pass, detail }
    }
}

fn within(v: f64, target: f64, tol: f64) -> bool {
    (v - target).abs() <= tol
}

fn mc(design: McDesign) -> Vec<McRecord> {
    run_mc_with_threads(&design, None).expect("design runs")
}

fn design(dist: DistributionSpec, n: &[usize], estimators: Vec<EstimatorKind>) -> McDesign {
    McDesign {
        distributions: vec![dist],
        n_values: n.to_vec(),
        alpha_values: ABLATION.to_vec(),
        estimators,
        ..McDesign::paper_default(SEED)
    }
}

fn exponent_anchors() -> Outcome {
    let mut worst = 0.0f64;
    for i in 2..=12u32 {
        let f = f64::from(i);
        worst = worst
            .max((exponent_at(i, 0.0) - 1.0 / f).abs())
            .max((exponent_at(i, 0.5) - 1.0).abs())
            .max((exponent_at(i, 1.0) - f).abs());
    }
    Outcome::new(worst <= 1e-12, format!("max anchor error {worst:.1e}"))
}

fn exponent_separation() -> Outcome {
    let mut bad = Vec::new();
    for i in 2..=6u32 {
        for j in (i + 1)..=6 {
            let (r1, r2) = collision_roots(i, j).expect("distinct indices");
            let expected = -1.0 / f64::from(i * j - 1);
            let d = |a: f64| exponent_at(i, a) - exponent_at(j, a);
            let roots_ok = r1 == 0.5 && (r2 - expected).abs() < 1e-15 && d(r1).abs() < 1e-12 && d(r2).abs() < 1e-12;
            let crossings: Vec<f64> = (0..1000)
                .map(|k| (f64::from(k) * 1e-3, f64::from(k + 1) * 1e-3))
                .filter(|&(a0, a1)| d(a0) == 0.0 || d(a0).signum() != d(a1).signum())
                .map(|(a0, _)| a0)
                .collect();
            let only_half = !crossings.is_empty() && crossings.iter().all(|a| (a - 0.5).abs() <= 1e-3 + 1e-12);
            if !(roots_ok && only_half) {
                bad.push(format!("({i},{j})"));
            }
        }
    }
    Outcome::new(bad.is_empty(), format!("10 pairs scanned, violations {bad:?}"))
}

fn laplace_checkpoints() -> Outcome {
    let spec = DistributionSpec::laplace();
    let g0 = g2_point(&spec, 0.0).expect("finite").g2;
    let g1 = g2_point(&spec, 1.0).expect("finite").g2;
    let pi = std::f64::consts::PI;
    let exact0 = (2.0 - 9.0 * pi / 16.0) / (2.0 - pi / 2.0);
    Outcome::all(vec![
        Outcome::new((g1 - 0.75).abs() < 1e-12, format!("g2(1)={g1:.12}")),
        Outcome::new((g0 - exact0).abs() < 1e-10, format!("g2(0)={g0:.6} vs gamma form {exact0:.6}")),
        Outcome::new(within(g1, 0.7438, 0.01) && within(g0, 0.5439, 0.01), "within 0.01 of 0.7438/0.5439"),
    ])
}

fn quadrature_set(spec: &DistributionSpec, p: f64) -> FractionalMomentSet {
    let sup = spec.support();
    let c = spec.center();
    let q = |order: f64| quadrature_moment(|x| spec.pdf(x), order, sup, c).expect("finite");
    FractionalMomentSet {
        p,
        c2: q(2.0),
        nu_pm1: q(p - 1.0),
        nu_pp1: q(p + 1.0),
        nu_2p: q(2.0 * p),
        sigma_p: 0.0,
        nu_p: None,
    }
}

fn gaussian_flatness() -> Outcome {
    let spec = DistributionSpec::gaussian();
    let mut worst = 0.0f64;
    let mut points = 0;
    for k in 0..=100 {
        let alpha = f64::from(k) * 0.01;
        if (alpha - 0.5).abs() < 0.05 - 1e-12 {
            continue;
        }
        let p = exponent_at(2, alpha);
        let g = g2_closed_form(&quadrature_set(&spec, p)).expect("defined away from the band");
        worst = worst.max((g - 1.0).abs());
        points += 1;
    }
    Outcome::new(worst <= 1e-6, format!("{points} grid points, max |g2-1| = {worst:.2e}"))
}

fn degeneracy() -> Outcome {
    let mut worst = 0.0f64;
    let mut fallback = true;
    for (r, spec) in [DistributionSpec::laplace(), DistributionSpec::beta(2.0, 5.0).unwrap(), DistributionSpec::gg(4.0).unwrap()]
        .iter()
        .enumerate()
    {
        for n in [5, 50, 500] {
            let x: Vec<f64> = spec
                .sample(n, 100 + r as u64)
                .unwrap()
                .iter()
                .map(|v| 1e3 * v + 7.0)
                .collect();
            let m = empirical_moments(&x, estimate_ols(&x).unwrap().theta_hat, 1.0, &MomentEstimatorConfig::default())
                .unwrap();
            let sys = CorrelantSystem::assemble(&m);
            worst = worst.max(sys.det.abs() / (m.c2 * m.c2));
            for off in [0.0, 0.004, -0.009] {
                let a = AlphaParam::new(0.5 + off).unwrap();
                let e = estimate_full(&x, a, &SolverConfig::default()).unwrap();
                fallback &= e.method == Method::OlsFallback;
            }
        }
    }
    Outcome::all(vec![
        Outcome::new(worst < 1e-12, format!("max |det|/c2^2 = {worst:.1e}")),
        Outcome::new(fallback, "band estimates are ols_fallback"),
    ])
}

fn sweep_argmins() -> Outcome {
    let check = |spec: DistributionSpec, target: f64, tol: f64, near: f64| {
        let c = g2_sweep(&spec, 0.05, 0.05).expect("finite");
        let pass = within(c.argmin_g2, target, tol) && (c.argmin_alpha - near).abs() <= 0.05 + 1e-9;
        Outcome::new(
            pass,
            format!("{spec} min {:.4} at {:.2} (want {target}±{tol} near {near})", c.argmin_g2, c.argmin_alpha),
        )
    };
    Outcome::all(vec![
        check(DistributionSpec::gg(0.5).unwrap(), 0.1021, 0.01, 0.0),
        check(DistributionSpec::gg(4.0).unwrap(), 0.7392, 0.01, 1.0),
        check(DistributionSpec::beta(2.0, 5.0).unwrap(), 0.8895, 0.015, 0.54),
    ])
}

fn full_estimator() -> Outcome {
    let recs = mc(design(DistributionSpec::laplace(), &[500], vec![EstimatorKind::Ols, EstimatorKind::Full]));
    let parts = recs
        .iter()
        .filter(|r| r.estimator == "full")
        .map(|r| {
            let theo = r.g2_theo.expect("finite");
            let rel = (r.g2_emp / theo - 1.0).abs();
            Outcome::new(
                rel <= 0.08,
                format!("a={} emp {:.4} theo {:.4} ({:.1}%)", r.alpha.unwrap(), r.g2_emp, theo, 100.0 * rel),
            )
        })
        .collect();
    Outcome::all(parts)
}

fn proxy_are() -> Outcome {
    let mut parts = Vec::new();
    let lap = mc(design(DistributionSpec::laplace(), &[50, 100, 200, 500], vec![EstimatorKind::Ols, EstimatorKind::Proxy]));
    for r in lap.iter().filter(|r| r.estimator == "proxy" && r.alpha == Some(0.05)) {
        parts.push(Outcome::new(
            (1.40..=1.80).contains(&r.are),
            format!("laplace N={} ARE {:.3}", r.n, r.are),
        ));
    }
    let gg = mc(design(DistributionSpec::gg(4.0).unwrap(), &[100, 200, 500], vec![EstimatorKind::Ols, EstimatorKind::Proxy]));
    for n in [100, 200, 500] {
        let best = gg
            .iter()
            .filter(|r| r.estimator == "proxy" && r.n == n)
            .max_by(|a, b| a.are.total_cmp(&b.are))
            .expect("cells present");
        parts.push(Outcome::new(
            best.alpha == Some(0.95),
            format!("gg:4 N={n} best a={} ARE {:.3}", best.alpha.unwrap(), best.are),
        ));
    }
    Outcome::all(parts)
}

fn baseline_table() -> Outcome {
    let d = McDesign {
        distributions: vec![DistributionSpec::laplace()],
        n_values: vec![100],
        ..McDesign::paper_default(SEED)
    };
    let recs = run_baseline_mc(&d).expect("design runs");
    let rel = |id: BaselineId| recs.iter().find(|r| r.estimator == id.as_str()).expect("baseline present").rel_mse;
    let check = |id: BaselineId, target: f64, tol: f64| {
        let v = rel(id);
        Outcome::new(within(v, target, tol), format!("{id} {v:.3} (want {target}±{tol})"))
    };
    Outcome::all(vec![
        check(BaselineId::Median, 0.53, 0.05),
        check(BaselineId::Huber, 0.63, 0.06),
        check(BaselineId::Trimmed10, 0.68, 0.07),
    ])
}

fn entropy_coefficients() -> Outcome {
    let table = [
        (DistributionSpec::gaussian(), 2.0663),
        (DistributionSpec::laplace(), 1.9300),
        (DistributionSpec::uniform(), 1.7321),
        (DistributionSpec::arcsine(), 1.1107),
        (DistributionSpec::triangular(), 2.0240),
    ];
    let mut parts: Vec<Outcome> = table
        .iter()
        .map(|(spec, target)| {
            let k = spec.shape_summary().unwrap().entropy_coeff.unwrap();
            Outcome::new(within(k, *target, 1e-4), format!("{} k={k:.5} table {target}", spec.name()))
        })
        .collect();
    for (i, (spec, _)) in table.iter().take(3).enumerate() {
        let theory = spec.shape_summary().unwrap().entropy_coeff.unwrap();
        let x = spec.sample(5000, 500 + i as u64).unwrap();
        let k = entropy_diagnostic(&x).unwrap().k_hat;
        parts.push(Outcome::new(
            within(k, theory, 0.06),
            format!("{} kde {k:.4}", spec.name()),
        ));
    }
    Outcome::all(parts)
}

fn property_suite() -> Outcome {
    let mut parts = Vec::new();

    let cfg = SmoothingConfig::default();
    let mut odd = true;
    let mut collapse = true;
    for i in 1..=8u32 {
        let idx = BasisIndex::new(i).unwrap();
        for k in 0..=20 {
            let a = AlphaParam::new(f64::from(k) * 0.05).unwrap();
            for xi in [-37.5, -1.0, -0.003, 0.25, 2.0, 910.0] {
                odd &= basis_value(idx, a, -xi, &cfg) == -basis_value(idx, a, xi, &cfg);
            }
        }
        for xi in [-5.0, 0.1, 3.0] {
            collapse &= basis_value(idx, AlphaParam::new(0.5).unwrap(), xi, &cfg) == xi;
        }
    }
    parts.push(Outcome::new(odd && collapse, "basis oddness and midpoint collapse"));

    let solver = SolverConfig::default();
    let mut worst = 0.0f64;
    for r in 0..20u64 {
        let x = DistributionSpec::laplace().sample(80, 900 + r).unwrap();
        let c = 13.25;
        let y: Vec<f64> = x.iter().map(|v| v + c).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        for alpha in ABLATION {
            let a = AlphaParam::new(alpha).unwrap();
            let f0 = estimate_full(&x, a, &solver).unwrap().theta_hat;
            let p0 = estimate_proxy(&x, a, &solver).unwrap().theta_hat;
            worst = worst
                .max((estimate_full(&y, a, &solver).unwrap().theta_hat - f0 - c).abs())
                .max((estimate_proxy(&y, a, &solver).unwrap().theta_hat - p0 - c).abs())
                .max((estimate_full(&neg, a, &solver).unwrap().theta_hat + f0).abs())
                .max((estimate_proxy(&neg, a, &solver).unwrap().theta_hat + p0).abs());
        }
    }
    parts.push(Outcome::new(worst < 1e-9, format!("equivariance/oddness max error {worst:.1e}")));

    let mut d = McDesign::paper_default(SEED);
    d.replicates = 100;
    d.n_values = vec![50, 200];
    d.estimators.push(EstimatorKind::Baseline(BaselineId::Huber));
    let one = run_mc_with_threads(&d, Some(1)).unwrap();
    let four = run_mc_with_threads(&d, Some(4)).unwrap();
    let identity = one
        .iter()
        .all(|r| r.mse.is_nan() || (r.mse - (r.var + r.bias * r.bias)).abs() <= 1e-12 * r.mse.abs());
    parts.push(Outcome::new(identity, format!("mse = var + bias^2 on {} rows", one.len())));
    parts.push(Outcome::new(one == four, "1 and 4 threads identical"));

    let cauchy = DistributionSpec::cauchy();
    let nonfinite = |r: Result<(), Error>| matches!(r, Err(Error::NonFiniteMoment { .. }));
    let refusals = [
        nonfinite(theoretical_moments(&cauchy, 0.3).map(|_| ())),
        nonfinite(g2_sweep(&cauchy, 0.05, 0.05).map(|_| ())),
        nonfinite(calibrate_oracle(&cauchy, 0.05, 0.05).map(|_| ())),
        !topographic_coords(&cauchy).unwrap().is_defined(),
        EstimatorKind::Full
            .estimate(&cauchy, &cauchy.sample(50, 1).unwrap(), Some(AlphaParam::new(0.05).unwrap()), &solver)
            .is_err(),
    ];
    parts.push(Outcome::new(refusals.iter().all(|&b| b), format!("cauchy refusals {refusals:?}")));
    Outcome::all(parts)
}

fn plugin_frequency() -> Outcome {
    let cfg = PluginConfig {
        bootstrap_b: 0,
        ..PluginConfig::default()
    };
    let freq = |spec: &DistributionSpec, hit: &dyn Fn(f64) -> bool| {
        (0..200u64)
            .filter(|&r| {
                let x = spec.sample_with(&mut rng::substream(SEED, r), 500);
                hit(calibrate_plugin(&x, &cfg).unwrap().alpha_star)
            })
            .count()
    };
    let lap = freq(&DistributionSpec::laplace(), &|a| a <= 0.05 + 1e-9);
    let gg = freq(&DistributionSpec::gg(4.0).unwrap(), &|a| a >= 0.7 - 1e-9);
    Outcome::all(vec![
        Outcome::new(lap >= 160, format!("laplace N=500 alpha* in {{0,0.05}}: {lap}/200")),
        Outcome::new(gg >= 160, format!("gg:4 N=500 alpha* >= 0.7: {gg}/200")),
    ])
}

fn grid_search_small_sample() -> Outcome {
    let grid: Vec<f64> = (0..=20).map(|k| f64::from(k) * 0.05).collect();
    let x = DistributionSpec::laplace().sample(30, SEED).unwrap();
    let c = calibrate_grid_mc(&x, &grid, 200, SEED, &SolverConfig::default()).unwrap();
    let (lo, hi) = c.sensitivity_interval;
    Outcome::new(
        c.ambiguous,
        format!("N=30 alpha*={} interval ({lo}, {hi}) ambiguous={}", c.alpha_star, c.ambiguous),
    )
}

fn bench_ordering() -> Outcome {
    let est = [
        EstimatorKind::Ols,
        EstimatorKind::Baseline(BaselineId::Median),
        EstimatorKind::Baseline(BaselineId::Huber),
        EstimatorKind::Proxy,
        EstimatorKind::Full,
    ];
    let recs = run_bench(&[10_000, 100_000], &est, 0.05, 10).unwrap();
    let at = |name: &str| recs.iter().find(|r| r.estimator == name && r.n == 10_000).unwrap().per_call_ms;
    let mean_cheapest = recs.iter().filter(|r| r.n == 10_000).all(|r| r.per_call_ms >= at("ols"));
    let ratio = scaling_ratio(&recs, "full", 10_000, 100_000).unwrap();
    Outcome::all(vec![
        Outcome::new(mean_cheapest, format!("mean {:.4} ms cheapest at N=1e4", at("ols"))),
        Outcome::new(ratio < 20.0, format!("full time ratio 1e5/1e4 {ratio:.2}")),
        Outcome::new(at("proxy") >= 10.0 * at("ols"), format!("proxy {:.3} ms", at("proxy"))),
    ])
}

type Check = (&'static str, u64, fn() -> Outcome);

const CRITERIA: [Check; 11] = [
    ("exponent anchors", 1, exponent_anchors),
    ("exponent separation", 1, exponent_separation),
    ("laplace closed-form checkpoints", 1, laplace_checkpoints),
    ("gaussian flatness", 10, gaussian_flatness),
    ("degeneracy at one half", 1, degeneracy),
    ("sweep argmins", 30, sweep_argmins),
    ("full estimator vs closed form", 60, full_estimator),
    ("proxy ARE", 90, proxy_are),
    ("baseline table", 30, baseline_table),
    ("entropy coefficients", 20, entropy_coefficients),
    ("property suite", 30, property_suite),
];

const SUPPLEMENTARY: [Check; 3] = [
    ("plugin choice frequency", 120, plugin_frequency),
    ("grid search small sample", 60, grid_search_small_sample),
    ("bench ordering and scaling", 120, bench_ordering),
];

fn run(label: &str, (name, budget, f): &Check) -> bool {
    let t = Instant::now();
    let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Outcome::new(false, "panicked"));
    let elapsed = t.elapsed();
    let in_time = elapsed <= Duration::from_secs(*budget);
    let pass = out.pass && in_time;
    println!(
        "{label} [{}] {name}: {} ({:.2}s{})",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        if in_time { String::new() } else { format!(", budget {budget}s") },
    );
    pass
}

fn main() {
    let mut failed = 0;
    for (i, c) in CRITERIA.iter().enumerate() {
        failed += usize::from(!run(&format!("criterion {}", i + 1), c));
    }
    for c in &SUPPLEMENTARY {
        failed += usize::from(!run("check", c));
    }
    println!("{failed} failing");
    if failed > 0 {
        std::process::exit(1);
    }
}
