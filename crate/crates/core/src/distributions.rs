//! Canonical noise distributions: densities, seedable samplers and shape
//! summaries (cumulants, contrexcess, entropy coefficient).
//!
//! Standardised specs have zero mean and unit variance, except Beta (centred
//! at its mean, not rescaled) and Cauchy (location 0, scale 1).

use alloc::string::ToString;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::fmath;
use crate::quadrature::{self, Interval, QuadOptions};
use crate::rng;

/// Upper bound of the entropy coefficient, attained by the Gaussian.
pub const K_MAX: f64 = 2.066_365_677_061_567_6; // sqrt(2 pi e) / 2

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Gaussian,
    Laplace,
    /// Generalised Gaussian, density proportional to `exp(-|x|^beta)`.
    GeneralizedGaussian { beta: f64 },
    Uniform,
    Beta { a: f64, b: f64 },
    Cauchy,
    Arcsine,
    /// Simpson (symmetric triangular).
    Triangular,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionSpec {
    family: Family,
    standardized: bool,
}

/// Shape coordinates of a distribution; `None` marks an undefined field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeSummary {
    pub gamma3: Option<f64>,
    pub gamma4: Option<f64>,
    /// `1 / sqrt(gamma4 + 3)`.
    pub contrexcess: Option<f64>,
    /// `exp(H) / (2 sigma)`.
    pub entropy_coeff: Option<f64>,
    /// `exp(H) / 2`.
    pub entropic_error: Option<f64>,
}

/// Excess kurtosis of GG(beta): `Gamma(5/b) Gamma(1/b) / Gamma(3/b)^2 - 3`.
pub fn gg_kurtosis(beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument("GG shape must be positive"));
    }
    let lg = |x: f64| fmath::ln_gamma(x);
    Ok(fmath::exp(lg(5.0 / beta) + lg(1.0 / beta) - 2.0 * lg(3.0 / beta)) - 3.0)
}

impl DistributionSpec {
    /// Standardised spec for `family`.
    pub fn new(family: Family) -> Result<Self> {
        Self::with_standardization(family, true)
    }

    pub fn with_standardization(family: Family, standardized: bool) -> Result<Self> {
        match family {
            Family::GeneralizedGaussian { beta } if !(beta > 0.0 && beta.is_finite()) => {
                Err(Error::InvalidArgument("GG shape must be positive"))
            }
            Family::Beta { a, b } if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) => {
                Err(Error::InvalidArgument("Beta shapes must be positive"))
            }
            _ => Ok(Self {
                family,
                standardized,
            }),
        }
    }

    pub fn gaussian() -> Self {
        Self::new(Family::Gaussian).unwrap()
    }
    pub fn laplace() -> Self {
        Self::new(Family::Laplace).unwrap()
    }
    pub fn uniform() -> Self {
        Self::new(Family::Uniform).unwrap()
    }
    pub fn cauchy() -> Self {
        Self::new(Family::Cauchy).unwrap()
    }
    pub fn arcsine() -> Self {
        Self::new(Family::Arcsine).unwrap()
    }
    pub fn triangular() -> Self {
        Self::new(Family::Triangular).unwrap()
    }
    pub fn gg(beta: f64) -> Result<Self> {
        Self::new(Family::GeneralizedGaussian { beta })
    }
    pub fn beta(a: f64, b: f64) -> Result<Self> {
        Self::new(Family::Beta { a, b })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            Family::Gaussian => "gaussian",
            Family::Laplace => "laplace",
            Family::GeneralizedGaussian { .. } => "gg",
            Family::Uniform => "uniform",
            Family::Beta { .. } => "beta",
            Family::Cauchy => "cauchy",
            Family::Arcsine => "arcsine",
            Family::Triangular => "triangular",
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self.family {
            Family::Beta { a, b } => a == b,
            _ => true,
        }
    }

    pub fn has_finite_variance(&self) -> bool {
        !matches!(self.family, Family::Cauchy)
    }

    /// Variance of the natural (unscaled) form.
    fn natural_variance(&self) -> Option<f64> {
        Some(match self.family {
            Family::Gaussian => 1.0,
            Family::Laplace => 2.0,
            Family::GeneralizedGaussian { beta } => {
                fmath::exp(fmath::ln_gamma(3.0 / beta) - fmath::ln_gamma(1.0 / beta))
            }
            Family::Uniform => 1.0 / 3.0,
            Family::Beta { a, b } => a * b / ((a + b) * (a + b) * (a + b + 1.0)),
            Family::Cauchy => return None,
            Family::Arcsine => 0.5,
            Family::Triangular => 1.0 / 6.0,
        })
    }

    fn natural_mean(&self) -> f64 {
        match self.family {
            Family::Beta { a, b } => a / (a + b),
            _ => 0.0,
        }
    }

    /// Multiplier applied to the natural variate.
    fn scale(&self) -> f64 {
        if !self.standardized {
            return 1.0;
        }
        match self.family {
            Family::Beta { .. } | Family::Cauchy => 1.0,
            _ => 1.0 / fmath::sqrt(self.natural_variance().unwrap()),
        }
    }

    /// Additive shift applied after scaling.
    fn shift(&self) -> f64 {
        if self.standardized {
            -self.natural_mean() * self.scale()
        } else {
            0.0
        }
    }

    /// Theoretical location about which moments are taken (mean, or 0 for Cauchy).
    pub fn center(&self) -> f64 {
        self.natural_mean() * self.scale() + self.shift()
    }

    pub fn mean(&self) -> Option<f64> {
        self.has_finite_variance().then(|| self.center())
    }

    pub fn variance(&self) -> Option<f64> {
        let s = self.scale();
        self.natural_variance().map(|v| v * s * s)
    }

    fn natural_support(&self) -> Interval {
        match self.family {
            Family::Uniform | Family::Arcsine | Family::Triangular => Interval::new(-1.0, 1.0),
            Family::Beta { .. } => Interval::new(0.0, 1.0),
            _ => Interval::REAL_LINE,
        }
    }

    pub fn support(&self) -> Interval {
        let s = self.natural_support();
        let (k, m) = (self.scale(), self.shift());
        Interval::new(s.lo * k + m, s.hi * k + m)
    }

    fn natural_pdf(&self, z: f64) -> f64 {
        match self.family {
            Family::Gaussian => fmath::exp(-0.5 * z * z) / fmath::sqrt(2.0 * PI),
            Family::Laplace => 0.5 * fmath::exp(-z.abs()),
            Family::GeneralizedGaussian { beta } => {
                let log_norm = fmath::ln(beta / 2.0) - fmath::ln_gamma(1.0 / beta);
                fmath::exp(log_norm - fmath::powf(z.abs(), beta))
            }
            Family::Uniform => {
                if z.abs() <= 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
            Family::Beta { a, b } => {
                if z <= 0.0 || z >= 1.0 {
                    // Endpoint values only matter when a or b equals 1.
                    if (z == 0.0 && a == 1.0) || (z == 1.0 && b == 1.0) {
                        fmath::exp(-ln_beta(a, b))
                    } else {
                        0.0
                    }
                } else {
                    fmath::exp((a - 1.0) * fmath::ln(z) + (b - 1.0) * fmath::ln(1.0 - z) - ln_beta(a, b))
                }
            }
            Family::Cauchy => 1.0 / (PI * (1.0 + z * z)),
            Family::Arcsine => {
                if z.abs() < 1.0 {
                    1.0 / (PI * fmath::sqrt(1.0 - z * z))
                } else {
                    0.0
                }
            }
            Family::Triangular => (1.0 - z.abs()).max(0.0),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let k = self.scale();
        self.natural_pdf((x - self.shift()) / k) / k
    }

    /// Differential entropy `-int f ln f`, by quadrature split at the centre.
    pub fn entropy(&self) -> Result<f64> {
        let opts = QuadOptions::default();
        let h = quadrature::integrate_split(
            |x| {
                let f = self.pdf(x);
                if f > 0.0 {
                    -f * fmath::ln(f)
                } else {
                    0.0
                }
            },
            self.support(),
            self.center(),
            &opts,
        )?;
        Ok(h)
    }

    /// Standardised skewness and excess kurtosis, when they exist.
    pub fn cumulants(&self) -> (Option<f64>, Option<f64>) {
        match self.family {
            Family::Gaussian => (Some(0.0), Some(0.0)),
            Family::Laplace => (Some(0.0), Some(3.0)),
            Family::GeneralizedGaussian { beta } => (Some(0.0), gg_kurtosis(beta).ok()),
            Family::Uniform => (Some(0.0), Some(-1.2)),
            Family::Arcsine => (Some(0.0), Some(-1.5)),
            Family::Triangular => (Some(0.0), Some(-0.6)),
            Family::Cauchy => (None, None),
            Family::Beta { a, b } => {
                let s = a + b;
                let g3 = 2.0 * (b - a) * fmath::sqrt(s + 1.0) / ((s + 2.0) * fmath::sqrt(a * b));
                let g4 = 6.0 * ((a - b) * (a - b) * (s + 1.0) - a * b * (s + 2.0))
                    / (a * b * (s + 2.0) * (s + 3.0));
                (Some(g3), Some(g4))
            }
        }
    }

    pub fn shape_summary(&self) -> Result<ShapeSummary> {
        let (gamma3, gamma4) = self.cumulants();
        let contrexcess = gamma4.filter(|g| *g > -3.0).map(|g| 1.0 / fmath::sqrt(g + 3.0));
        let h = self.entropy()?;
        let entropic_error = fmath::exp(h) / 2.0;
        let entropy_coeff = self.variance().map(|v| entropic_error / fmath::sqrt(v));
        Ok(ShapeSummary {
            gamma3,
            gamma4,
            contrexcess,
            entropy_coeff,
            entropic_error: Some(entropic_error),
        })
    }

    fn draw_natural<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.family {
            Family::Gaussian => rng.sample(StandardNormal),
            Family::Laplace => {
                let u: f64 = rng.random::<f64>() - 0.5;
                let mag = -fmath::ln(1.0 - 2.0 * u.abs());
                if u < 0.0 {
                    -mag
                } else {
                    mag
                }
            }
            Family::GeneralizedGaussian { beta } => {
                let g = Gamma::new(1.0 / beta, 1.0).expect("validated shape").sample(rng);
                let mag = fmath::powf(g, 1.0 / beta);
                if rng.random::<bool>() {
                    mag
                } else {
                    -mag
                }
            }
            Family::Uniform => 2.0 * rng.random::<f64>() - 1.0,
            Family::Beta { a, b } => {
                // Two gamma draws keep the stream layout independent of rand_distr's Beta internals.
                let x = Gamma::new(a, 1.0).expect("validated shape").sample(rng);
                let y = Gamma::new(b, 1.0).expect("validated shape").sample(rng);
                x / (x + y)
            }
            Family::Cauchy => fmath::tan(PI * (rng.random::<f64>() - 0.5)),
            Family::Arcsine => fmath::sin(PI * (rng.random::<f64>() - 0.5)),
            Family::Triangular => rng.random::<f64>() + rng.random::<f64>() - 1.0,
        }
    }

    /// One draw from the (possibly standardised) law.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.draw_natural(rng) * self.scale() + self.shift()
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.draw(rng)).collect()
    }

    /// `n` draws, deterministic in `(self, n, seed)`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::InvalidArgument("sample size must be at least 1"));
        }
        let mut rng = rng::seeded(seed);
        Ok(self.sample_with(&mut rng, n))
    }
}

fn ln_beta(a: f64, b: f64) -> f64 {
    fmath::ln_gamma(a) + fmath::ln_gamma(b) - fmath::ln_gamma(a + b)
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::GeneralizedGaussian { beta } => write!(f, "gg:{beta}"),
            Family::Beta { a, b } => write!(f, "beta:{a}:{b}"),
            _ => f.write_str(self.name()),
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    /// Parses `gaussian`, `laplace`, `gg:<beta>`, `uniform`, `beta:<a>:<b>`,
    /// `cauchy`, `arcsine`, `triangular`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let mut parts = lower.split(':');
        let head = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let bad = || Error::UnknownDistribution(s.to_string());
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
        let family = match (head, args.as_slice()) {
            ("gaussian" | "normal", []) => Family::Gaussian,
            ("laplace", []) => Family::Laplace,
            ("uniform", []) => Family::Uniform,
            ("cauchy", []) => Family::Cauchy,
            ("arcsine", []) => Family::Arcsine,
            ("triangular" | "simpson", []) => Family::Triangular,
            ("gg", [beta]) => Family::GeneralizedGaussian { beta: num(beta)? },
            ("beta", [a, b]) => Family::Beta {
                a: num(a)?,
                b: num(b)?,
            },
            _ => return Err(bad()),
        };
        DistributionSpec::new(family).map_err(|_| bad())
    }
}
