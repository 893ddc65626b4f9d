//! Scalar root finders: Brent bracketing and a damped, score-decreasing Newton.

use crate::error::{Error, Result};

/// Outcome of an iterative scalar solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOutcome {
    pub root: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Settings for [`damped_newton_scalar`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    /// Step factor for the first `damped_steps` iterations.
    pub damping: f64,
    pub damped_steps: usize,
    /// Relative step tolerance.
    pub tol: f64,
    pub max_iters: usize,
    /// How many times a rejected step may be halved.
    pub max_halvings: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            damping: 0.5,
            damped_steps: 5,
            tol: 1e-8,
            max_iters: 100,
            max_halvings: 40,
        }
    }
}

/// Newton iteration `theta <- theta - lambda Z / Z'` that only accepts steps
/// which reduce `|Z|`, halving `lambda` otherwise.
pub fn damped_newton_scalar<S, D>(mut score: S, mut slope: D, start: f64, cfg: &NewtonConfig) -> Result<RootOutcome>
where
    S: FnMut(f64) -> f64,
    D: FnMut(f64) -> f64,
{
    if !(cfg.damping > 0.0 && cfg.damping <= 1.0) {
        return Err(Error::InvalidArgument("damping must lie in (0, 1]"));
    }
    let mut theta = start;
    let mut z = score(theta);
    for it in 0..cfg.max_iters {
        if z == 0.0 {
            return Ok(RootOutcome {
                root: theta,
                iterations: it,
                converged: true,
            });
        }
        let zp = slope(theta);
        if !zp.is_finite() || zp == 0.0 || !z.is_finite() {
            return Err(Error::RootFinding("slope is zero or not finite"));
        }
        let full = -z / zp;
        let mut lambda = if it < cfg.damped_steps { cfg.damping } else { 1.0 };
        let mut accepted = None;
        for _ in 0..=cfg.max_halvings {
            let cand = theta + lambda * full;
            let zc = score(cand);
            if zc.abs() < z.abs() {
                accepted = Some((cand, zc));
                break;
            }
            lambda *= 0.5;
        }
        let Some((next, znext)) = accepted else {
            // No decrease possible: we sit at the floating-point root.
            let converged = full.abs() < cfg.tol * theta.abs().max(1.0);
            return if converged {
                Ok(RootOutcome {
                    root: theta,
                    iterations: it,
                    converged,
                })
            } else {
                Err(Error::RootFinding("damped Newton could not reduce the score"))
            };
        };
        let step = next - theta;
        theta = next;
        z = znext;
        if step.abs() < cfg.tol * theta.abs().max(1.0) {
            return Ok(RootOutcome {
                root: theta,
                iterations: it + 1,
                converged: true,
            });
        }
    }
    Err(Error::RootFinding("damped Newton hit the iteration cap"))
}

/// Brent's method on a sign-changing bracket `[a, b]`.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64, max_iters: usize) -> Result<RootOutcome> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(RootOutcome { root: a, iterations: 0, converged: true });
    }
    if fb == 0.0 {
        return Ok(RootOutcome { root: b, iterations: 0, converged: true });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::RootFinding("interval does not bracket a root"));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for it in 1..=max_iters {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(RootOutcome { root: b, iterations: it, converged: true });
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::RootFinding("Brent hit the iteration cap"))
}

/// Widens `[center - w, center + w]` by doubling `w` until a decreasing
/// score changes sign (`f(lo) > 0 > f(hi)`), at most `max_doublings` times.
pub fn expand_bracket<F: FnMut(f64) -> f64>(
    mut f: F,
    center: f64,
    half_width: f64,
    max_doublings: usize,
) -> Result<(f64, f64)> {
    let mut w = half_width;
    for _ in 0..=max_doublings {
        let (lo, hi) = (center - w, center + w);
        if f(lo) >= 0.0 && f(hi) <= 0.0 {
            return Ok((lo, hi));
        }
        w *= 2.0;
    }
    Err(Error::RootFinding("no sign change after bracket expansion"))
}
