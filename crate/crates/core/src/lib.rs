//! Location estimation with the parametrically adaptive transition polynomial
//! (PATP): a one-parameter family of sign-preserving fractional-power bases
//! that moves continuously from a fractal regime (`alpha = 0`, exponents
//! `1/i`) through the linear collapse (`alpha = 1/2`) to signed integer powers
//! (`alpha = 1`).
//!
//! The crate is `no_std` with `alloc`. It contains the basis, fractional
//! moments (empirical, closed form and quadrature), the correlant system and
//! variance-reduction coefficient `g2(alpha)`, the full and proxy estimators
//! with their solver stack, six robust baselines, seedable samplers for the
//! canonical distributions and the `alpha` calibration procedures.
//!
//! IO, CSV, Monte Carlo orchestration and the command-line interface live in
//! the companion `patp-harness` crate.

#![no_std]
#![warn(missing_debug_implementations, rust_2018_idioms)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod baselines;
pub mod basis;
pub mod calibration;
pub mod distributions;
pub mod efficiency;
pub mod error;
pub mod estimators;
pub mod moments;
pub mod quadrature;
pub mod rng;
pub mod solver;
pub mod stats;

pub(crate) mod fmath;

pub use basis::{AlphaParam, BasisIndex, SmoothingConfig};
pub use distributions::{DistributionSpec, Family, ShapeSummary};
pub use efficiency::{CorrelantSystem, G2Curve};
pub use error::{Error, Result};
pub use estimators::{EstimateResult, Method, SolverConfig};
pub use moments::{FractionalMomentSet, MomentEstimatorConfig};
