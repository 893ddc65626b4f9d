use patp_core::basis::{basis_location_derivative, basis_value, collision_roots, exponent_at};
use patp_core::baselines::{run_baseline, BaselineId};
use patp_core::estimators::{estimate_full, estimate_ols, estimate_proxy, Method};
use patp_core::{AlphaParam, BasisIndex, SmoothingConfig, SolverConfig};
use proptest::prelude::*;

fn alpha_strategy() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

fn sample_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0..50.0f64, 5..60)
}

const GRID: [f64; 8] = [0.0, 0.05, 0.3, 0.45, 0.55, 0.7, 0.95, 1.0];

proptest! {
    #[test]
    fn basis_is_odd(i in 1u32..=8, alpha in alpha_strategy(), xi in -1e3..1e3f64, eps in prop_oneof![Just(0.0), 1e-6..1e-2f64]) {
        let cfg = SmoothingConfig::new(eps, 1e-12).unwrap();
        let i = BasisIndex::new(i).unwrap();
        let a = AlphaParam::new(alpha).unwrap();
        prop_assert_eq!(basis_value(i, a, -xi, &cfg), -basis_value(i, a, xi, &cfg));
    }

    #[test]
    fn basis_collapses_at_midpoint(i in 1u32..=12, xi in -1e6..1e6f64) {
        let a = AlphaParam::new(0.5).unwrap();
        prop_assert_eq!(basis_value(BasisIndex::new(i).unwrap(), a, xi, &SmoothingConfig::default()), xi);
    }

    #[test]
    fn derivative_matches_central_difference(
        i in 2u32..=5,
        k in 0usize..4,
        mag in 0.1..20.0f64,
        neg in any::<bool>(),
    ) {
        let alpha = [0.0, 0.25, 0.75, 1.0][k];
        let xi = if neg { -mag } else { mag };
        let a = AlphaParam::new(alpha).unwrap();
        let idx = BasisIndex::new(i).unwrap();
        let cfg = SmoothingConfig::default();
        // phi(x - theta): shifting theta by +h moves xi by -h
        let h = 1e-5 * mag;
        let fd = (basis_value(idx, a, xi - h, &cfg) - basis_value(idx, a, xi + h, &cfg)) / (2.0 * h);
        let d = basis_location_derivative(idx, a, xi, &cfg);
        prop_assert!((fd - d).abs() <= 1e-6 * d.abs(), "fd {} vs {}", fd, d);
        prop_assert_eq!(d, basis_location_derivative(idx, a, -xi, &cfg));
    }

    #[test]
    fn estimators_are_translation_equivariant(x in sample_strategy(), c in -100.0..100.0f64, k in 0usize..GRID.len()) {
        let a = AlphaParam::new(GRID[k]).unwrap();
        let cfg = SolverConfig::default();
        let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
        let f0 = estimate_full(&x, a, &cfg).unwrap();
        let f1 = estimate_full(&shifted, a, &cfg).unwrap();
        // Shifting rounds the input by up to ulp(c); a near-singular F2 amplifies that by its condition number.
        let cond = if f0.cond_last.is_finite() { f0.cond_last.max(f1.cond_last) } else { 1.0 };
        let tol = 1e-9 + 64.0 * f64::EPSILON * cond * (c.abs() + 50.0);
        prop_assert!((f1.theta_hat - f0.theta_hat - c).abs() < tol, "full {} {} cond {}", f0.theta_hat, f1.theta_hat, cond);
        let p0 = estimate_proxy(&x, a, &cfg).unwrap().theta_hat;
        let p1 = estimate_proxy(&shifted, a, &cfg).unwrap().theta_hat;
        prop_assert!((p1 - p0 - c).abs() < 1e-9, "proxy {} {}", p0, p1);
        let o0 = estimate_ols(&x).unwrap().theta_hat;
        let o1 = estimate_ols(&shifted).unwrap().theta_hat;
        prop_assert!((o1 - o0 - c).abs() < 1e-9);
    }

    #[test]
    fn estimators_are_odd(x in sample_strategy(), k in 0usize..GRID.len()) {
        let a = AlphaParam::new(GRID[k]).unwrap();
        let cfg = SolverConfig::default();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let f0 = estimate_full(&x, a, &cfg).unwrap().theta_hat;
        let f1 = estimate_full(&neg, a, &cfg).unwrap().theta_hat;
        prop_assert!((f0 + f1).abs() < 1e-9, "full {} {}", f0, f1);
        let p0 = estimate_proxy(&x, a, &cfg).unwrap().theta_hat;
        let p1 = estimate_proxy(&neg, a, &cfg).unwrap().theta_hat;
        prop_assert!((p0 + p1).abs() < 1e-9, "proxy {} {}", p0, p1);
    }

    #[test]
    fn band_always_falls_back_to_ols(x in sample_strategy(), off in -0.0099..0.0099f64) {
        let a = AlphaParam::new(0.5 + off).unwrap();
        let r = estimate_full(&x, a, &SolverConfig::default()).unwrap();
        prop_assert_eq!(r.method, Method::OlsFallback);
        prop_assert_eq!(r.theta_hat, estimate_ols(&x).unwrap().theta_hat);
    }

    #[test]
    fn estimates_are_reproducible(x in sample_strategy(), k in 0usize..GRID.len()) {
        let a = AlphaParam::new(GRID[k]).unwrap();
        let cfg = SolverConfig::default();
        prop_assert_eq!(estimate_full(&x, a, &cfg).unwrap(), estimate_full(&x, a, &cfg).unwrap());
    }

    #[test]
    fn baselines_are_equivariant(x in sample_strategy(), c in -100.0..100.0f64) {
        let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        for id in BaselineId::ALL {
            let b0 = run_baseline(id, &x).unwrap();
            let b1 = run_baseline(id, &shifted).unwrap();
            let b2 = run_baseline(id, &neg).unwrap();
            let tol = 1e-12 * (1.0 + b0.abs() + c.abs()) * 10.0;
            prop_assert!((b1 - b0 - c).abs() <= tol, "{}: {} {}", id, b0, b1);
            prop_assert!((b0 + b2).abs() <= tol, "{}: {} {}", id, b0, b2);
        }
    }
}

#[test]
fn exponent_anchors() {
    for i in 2..=12u32 {
        let f = f64::from(i);
        assert!((exponent_at(i, 0.0) - 1.0 / f).abs() < 1e-12);
        assert!((exponent_at(i, 0.5) - 1.0).abs() < 1e-12);
        assert!((exponent_at(i, 1.0) - f).abs() < 1e-12);
    }
}

#[test]
fn exponent_differences_change_sign_only_at_half() {
    for i in 2..=6u32 {
        for j in (i + 1)..=6 {
            let (r1, r2) = collision_roots(i, j).unwrap();
            assert_eq!(r1, 0.5);
            assert!(r2 < 0.0);
            for r in [r1, r2] {
                assert!((exponent_at(i, r) - exponent_at(j, r)).abs() < 1e-12, "({i},{j}) at {r}");
            }
            let d = |a: f64| exponent_at(i, a) - exponent_at(j, a);
            let mut crossings = Vec::new();
            for k in 0..1000 {
                let (a0, a1) = (k as f64 * 1e-3, (k + 1) as f64 * 1e-3);
                if d(a0) == 0.0 || d(a0).signum() != d(a1).signum() {
                    crossings.push(a0);
                }
            }
            assert!(crossings.iter().all(|a| (a - 0.5).abs() <= 1e-3 + 1e-12), "({i},{j}): {crossings:?}");
            assert!(!crossings.is_empty());
        }
    }
}
