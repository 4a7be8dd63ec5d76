//! Exponential-family distribution layer.
//!
//! Every family is written in minimal canonical form
//! `h(y) exp(θ·T(y) − A(θ))` with fixed nuisance parameters. Segment costs
//! are contrasts: the base measure `h` is dropped, so a reported cost is the
//! negative log-likelihood up to a term that does not depend on the partition.

mod chi2;
mod constants;
mod sample;

pub use chi2::chi_square;
pub use constants::{theory_constants, ParamBox, TheoryConstants};
pub use sample::draw;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Small vector used for statistic-sized buffers on hot paths.
pub type StatVec = SmallVec<[f64; 4]>;

/// Margin kept between the negative binomial natural parameter and zero.
const NEG_BINOMIAL_MARGIN: f64 = 1e-12;

/// Distribution governing the observations, with its fixed nuisance parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Poisson,
    Exponential,
    GaussianPositiveMean,
    /// Pareto with known scale `x_m`, statistic `log y`.
    Pareto {
        scale: f64,
    },
    /// Gamma with known shape `α`.
    Gamma {
        shape: f64,
    },
    /// Weibull with known shape `k`, statistic `y^k`.
    Weibull {
        shape: f64,
    },
    /// Laplace with known location `μ`, statistic `|y − μ|`.
    Laplace {
        location: f64,
    },
    /// Binomial with a known number of trials.
    Binomial {
        trials: u32,
    },
    /// Negative binomial with known dispersion `φ`.
    NegativeBinomial {
        dispersion: f64,
    },
    /// Categorical over `dim + 1` categories; category `dim + 1` is the reference.
    Categorical {
        dim: usize,
    },
}

/// Natural parameter vector of length `FamilySpec::dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NaturalParam(pub Vec<f64>);

impl NaturalParam {
    pub fn scalar(theta: f64) -> Self {
        NaturalParam(vec![theta])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for NaturalParam {
    fn from(v: Vec<f64>) -> Self {
        NaturalParam(v)
    }
}

fn is_nonneg_integer(y: f64) -> bool {
    y.is_finite() && y >= 0.0 && y.fract() == 0.0
}

/// `x log x` with the `0 log 0 = 0` convention.
fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

impl FamilySpec {
    /// Short stable name, also used by the CLI and in serialized documents.
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Poisson => "poisson",
            FamilySpec::Exponential => "exponential",
            FamilySpec::GaussianPositiveMean => "gaussian_positive_mean",
            FamilySpec::Pareto { .. } => "pareto",
            FamilySpec::Gamma { .. } => "gamma",
            FamilySpec::Weibull { .. } => "weibull",
            FamilySpec::Laplace { .. } => "laplace",
            FamilySpec::Binomial { .. } => "binomial",
            FamilySpec::NegativeBinomial { .. } => "negative_binomial",
            FamilySpec::Categorical { .. } => "categorical",
        }
    }

    /// Dimension of the sufficient statistic.
    pub fn dim(&self) -> usize {
        match self {
            FamilySpec::GaussianPositiveMean => 2,
            FamilySpec::Categorical { dim } => *dim,
            _ => 1,
        }
    }

    /// Checks the nuisance parameters.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Family(format!(
                    "{}: {name} must be positive, got {v}",
                    self.name()
                )))
            }
        };
        match *self {
            FamilySpec::Pareto { scale } => positive("scale", scale),
            FamilySpec::Gamma { shape } | FamilySpec::Weibull { shape } => positive("shape", shape),
            FamilySpec::Laplace { location } => positive("location", location),
            FamilySpec::NegativeBinomial { dispersion } => positive("dispersion", dispersion),
            FamilySpec::Binomial { trials: 0 } => {
                Err(Error::Family("binomial: trials must be at least 1".into()))
            }
            FamilySpec::Categorical { dim: 0 } => Err(Error::Family(
                "categorical: dimension must be at least 1".into(),
            )),
            _ => Ok(()),
        }
    }

    fn support_err(&self, value: f64) -> Error {
        Error::Support {
            family: self.name(),
            value,
            index: None,
        }
    }

    fn domain_err(&self, theta: &[f64]) -> Error {
        Error::Domain {
            family: self.name(),
            theta: theta.to_vec(),
        }
    }

    fn boundary_err(&self, mu: &[f64]) -> Error {
        Error::Boundary {
            family: self.name(),
            mu: mu.to_vec(),
        }
    }

    /// Writes `T(y)` into `out` (length `dim`).
    pub fn write_stat(&self, y: f64, out: &mut [f64]) -> Result<()> {
        debug_assert_eq!(out.len(), self.dim());
        match *self {
            FamilySpec::Poisson | FamilySpec::NegativeBinomial { .. } => {
                if !is_nonneg_integer(y) {
                    return Err(self.support_err(y));
                }
                out[0] = y;
            }
            FamilySpec::Binomial { trials } => {
                if !is_nonneg_integer(y) || y > f64::from(trials) {
                    return Err(self.support_err(y));
                }
                out[0] = y;
            }
            FamilySpec::Exponential | FamilySpec::Gamma { .. } => {
                if !(y.is_finite() && y > 0.0) {
                    return Err(self.support_err(y));
                }
                out[0] = y;
            }
            FamilySpec::Weibull { shape } => {
                if !(y.is_finite() && y > 0.0) {
                    return Err(self.support_err(y));
                }
                out[0] = y.powf(shape);
            }
            FamilySpec::Laplace { location } => {
                if !y.is_finite() {
                    return Err(self.support_err(y));
                }
                out[0] = (y - location).abs();
            }
            FamilySpec::Pareto { scale } => {
                if !(y.is_finite() && y > scale) {
                    return Err(self.support_err(y));
                }
                out[0] = y.ln();
            }
            FamilySpec::GaussianPositiveMean => {
                if !y.is_finite() {
                    return Err(self.support_err(y));
                }
                out[0] = y;
                out[1] = y * y;
            }
            FamilySpec::Categorical { dim } => {
                if !is_nonneg_integer(y) || y < 1.0 || y > (dim + 1) as f64 {
                    return Err(self.support_err(y));
                }
                out.fill(0.0);
                let cat = y as usize;
                if cat <= dim {
                    out[cat - 1] = 1.0;
                }
            }
        }
        Ok(())
    }

    /// The sufficient statistic `T(y)`.
    pub fn sufficient_stat(&self, y: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.write_stat(y, &mut out)?;
        Ok(out)
    }

    /// Checks that `theta` lies in the natural domain.
    pub fn check_domain(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.dim() || theta.iter().any(|t| !t.is_finite()) {
            return Err(self.domain_err(theta));
        }
        let ok = match *self {
            FamilySpec::Poisson | FamilySpec::Binomial { .. } | FamilySpec::Categorical { .. } => {
                true
            }
            FamilySpec::Exponential
            | FamilySpec::Gamma { .. }
            | FamilySpec::Weibull { .. }
            | FamilySpec::Laplace { .. }
            | FamilySpec::Pareto { .. } => theta[0] < 0.0,
            FamilySpec::GaussianPositiveMean => theta[0] > 0.0 && theta[1] < 0.0,
            FamilySpec::NegativeBinomial { .. } => theta[0] < -NEG_BINOMIAL_MARGIN,
        };
        if ok {
            Ok(())
        } else {
            Err(self.domain_err(theta))
        }
    }

    /// Log-partition function `A(θ)`.
    pub fn log_partition(&self, theta: &[f64]) -> Result<f64> {
        self.check_domain(theta)?;
        let t = theta[0];
        Ok(match *self {
            FamilySpec::Poisson => t.exp(),
            FamilySpec::Exponential | FamilySpec::Weibull { .. } | FamilySpec::Laplace { .. } => {
                -(-t).ln()
            }
            FamilySpec::Gamma { shape } => -shape * (-t).ln(),
            FamilySpec::Pareto { scale } => t * scale.ln() - (-t).ln(),
            FamilySpec::GaussianPositiveMean => {
                let (t1, t2) = (theta[0], theta[1]);
                -t1 * t1 / (4.0 * t2) - 0.5 * (-2.0 * t2).ln()
            }
            FamilySpec::Binomial { trials } => {
                // softplus(θ) = max(θ, 0) + log(1 + e^{−|θ|})
                f64::from(trials) * (t.max(0.0) + (-t.abs()).exp().ln_1p())
            }
            FamilySpec::NegativeBinomial { dispersion } => -dispersion * (-t.exp_m1()).ln(),
            FamilySpec::Categorical { .. } => {
                let shift = theta.iter().copied().fold(0.0_f64, f64::max);
                let s: f64 = (-shift).exp() + theta.iter().map(|&x| (x - shift).exp()).sum::<f64>();
                shift + s.ln()
            }
        })
    }

    /// Gradient `∇A(θ)`, the mean of the sufficient statistic.
    pub fn grad_log_partition(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_domain(theta)?;
        let t = theta[0];
        Ok(match *self {
            FamilySpec::Poisson => vec![t.exp()],
            FamilySpec::Exponential | FamilySpec::Weibull { .. } | FamilySpec::Laplace { .. } => {
                vec![-1.0 / t]
            }
            FamilySpec::Gamma { shape } => vec![-shape / t],
            FamilySpec::Pareto { scale } => vec![scale.ln() - 1.0 / t],
            FamilySpec::GaussianPositiveMean => {
                let (t1, t2) = (theta[0], theta[1]);
                let mean = -t1 / (2.0 * t2);
                let var = -1.0 / (2.0 * t2);
                vec![mean, mean * mean + var]
            }
            FamilySpec::Binomial { trials } => vec![f64::from(trials) * logistic(t)],
            FamilySpec::NegativeBinomial { dispersion } => vec![-dispersion * t.exp() / t.exp_m1()],
            FamilySpec::Categorical { .. } => {
                let shift = theta.iter().copied().fold(0.0_f64, f64::max);
                let weights: Vec<f64> = theta.iter().map(|&x| (x - shift).exp()).collect();
                let denom = (-shift).exp() + weights.iter().sum::<f64>();
                weights.into_iter().map(|w| w / denom).collect()
            }
        })
    }

    /// Inverse of the gradient map: the natural parameter whose mean is `mu`.
    pub fn inv_grad_log_partition(&self, mu: &[f64]) -> Result<NaturalParam> {
        if mu.len() != self.dim() || mu.iter().any(|m| !m.is_finite()) {
            return Err(self.boundary_err(mu));
        }
        let m = mu[0];
        let theta = match *self {
            FamilySpec::Poisson if m > 0.0 => vec![m.ln()],
            FamilySpec::Exponential | FamilySpec::Weibull { .. } | FamilySpec::Laplace { .. }
                if m > 0.0 =>
            {
                vec![-1.0 / m]
            }
            FamilySpec::Gamma { shape } if m > 0.0 => vec![-shape / m],
            FamilySpec::Pareto { scale } if m > scale.ln() => vec![-1.0 / (m - scale.ln())],
            FamilySpec::GaussianPositiveMean => {
                let var = mu[1] - m * m;
                if !(m > 0.0 && var > 0.0) {
                    return Err(self.boundary_err(mu));
                }
                vec![m / var, -1.0 / (2.0 * var)]
            }
            FamilySpec::Binomial { trials } if m > 0.0 && m < f64::from(trials) => {
                vec![(m / (f64::from(trials) - m)).ln()]
            }
            FamilySpec::NegativeBinomial { dispersion } if m > 0.0 => {
                vec![(m / (dispersion + m)).ln()]
            }
            FamilySpec::Categorical { .. } => {
                let total: f64 = mu.iter().sum();
                let reference = 1.0 - total;
                if !(reference > 0.0 && mu.iter().all(|&p| p > 0.0)) {
                    return Err(self.boundary_err(mu));
                }
                mu.iter().map(|&p| (p / reference).ln()).collect()
            }
            _ => return Err(self.boundary_err(mu)),
        };
        self.check_domain(&theta)
            .map_err(|_| self.boundary_err(mu))?;
        Ok(NaturalParam(theta))
    }

    /// Minimal contrast of a segment of length `len` whose statistics sum to `t_sum`:
    /// `len·(A(θ̂) − θ̂·t_sum/len)` at the segment MLE `θ̂`.
    ///
    /// Closed forms are used, which coincide with the limit of the likelihood
    /// on the boundary of the mean space (`0 log 0 = 0`). Continuous families
    /// whose boundary contrast diverges report a boundary error.
    pub fn segment_cost(&self, t_sum: &[f64], len: usize) -> Result<f64> {
        if len == 0 {
            return Err(Error::Argument("segment_cost: empty segment".into()));
        }
        if t_sum.len() != self.dim() {
            return Err(Error::Argument(format!(
                "segment_cost: statistic has length {}, expected {}",
                t_sum.len(),
                self.dim()
            )));
        }
        let l = len as f64;
        let s = t_sum[0];
        let mean = s / l;
        let cost = match *self {
            FamilySpec::Poisson if s >= 0.0 => s - xlogx(s) + s * l.ln(),
            FamilySpec::Exponential | FamilySpec::Weibull { .. } | FamilySpec::Laplace { .. }
                if mean > 0.0 =>
            {
                l * (1.0 + mean.ln())
            }
            FamilySpec::Gamma { shape } if mean > 0.0 => l * shape * (1.0 + (mean / shape).ln()),
            FamilySpec::Pareto { scale } if mean > scale.ln() => {
                l * (1.0 + (mean - scale.ln()).ln())
            }
            FamilySpec::GaussianPositiveMean => {
                let second = t_sum[1] / l;
                let var = second - mean * mean;
                // Constant segments leave a rounding residue of order ulp(second).
                if !(mean > 0.0 && var > 1e-12 * second) {
                    return Err(self.boundary_err(&[mean, second]));
                }
                0.5 * l * (1.0 + var.ln())
            }
            FamilySpec::Binomial { trials } => {
                let nb = f64::from(trials);
                let p = mean / nb;
                if !(0.0..=1.0).contains(&p) {
                    return Err(self.boundary_err(&[mean]));
                }
                -l * nb * (xlogx(p) + xlogx(1.0 - p))
            }
            FamilySpec::NegativeBinomial { dispersion } if mean >= 0.0 => {
                let phi = dispersion;
                l * (phi * ((phi + mean) / phi).ln() - xlogx(mean) + mean * (phi + mean).ln())
            }
            FamilySpec::Categorical { .. } => {
                let counted: f64 = t_sum.iter().sum();
                let reference = l - counted;
                if t_sum.iter().any(|&c| c < 0.0) || reference < -1e-9 * l {
                    return Err(self.boundary_err(t_sum));
                }
                xlogx(l) - t_sum.iter().map(|&c| xlogx(c)).sum::<f64>() - xlogx(reference.max(0.0))
            }
            _ => {
                let mu: Vec<f64> = t_sum.iter().map(|&v| v / l).collect();
                return Err(self.boundary_err(&mu));
            }
        };
        Ok(cost)
    }

    /// Pointwise Kullback-Leibler divergence `K(G(θ) ‖ G(p))`.
    pub fn kullback(&self, theta: &[f64], other: &[f64]) -> Result<f64> {
        let a_theta = self.log_partition(theta)?;
        let a_other = self.log_partition(other)?;
        let grad = self.grad_log_partition(theta)?;
        let inner: f64 = grad
            .iter()
            .zip(theta.iter().zip(other))
            .map(|(g, (t, p))| g * (t - p))
            .sum();
        Ok((inner - a_theta + a_other).max(0.0))
    }

    /// Squared Hellinger distance `1 − ∫√(g₁g₂)` between two members of the family.
    ///
    /// Uses the affinity identity `∫√(g₁g₂) = exp(A((θ₁+θ₂)/2) − (A(θ₁)+A(θ₂))/2)`,
    /// valid for every family here since the natural domains are convex.
    pub fn hellinger_sq(&self, theta1: &[f64], theta2: &[f64]) -> Result<f64> {
        let a1 = self.log_partition(theta1)?;
        let a2 = self.log_partition(theta2)?;
        let mid: Vec<f64> = theta1
            .iter()
            .zip(theta2)
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        let a_mid = self.log_partition(&mid)?;
        let log_affinity = (a_mid - 0.5 * (a1 + a2)).min(0.0);
        Ok((-log_affinity.exp_m1()).clamp(0.0, 1.0))
    }

    /// Maps a scalar rate-type parameter to the natural parameter.
    ///
    /// Poisson: mean λ. Exponential and gamma: rate. Weibull: `λ^{-k}`.
    /// Laplace: `1/b`. Pareto: shape α. Binomial and negative binomial:
    /// success probability `p`.
    pub fn natural_from_rate(&self, rate: f64) -> Result<NaturalParam> {
        let bad = || Error::Argument(format!("{}: invalid rate {rate}", self.name()));
        if !rate.is_finite() || rate <= 0.0 {
            return Err(bad());
        }
        let theta = match self {
            FamilySpec::Poisson => rate.ln(),
            FamilySpec::Exponential
            | FamilySpec::Gamma { .. }
            | FamilySpec::Weibull { .. }
            | FamilySpec::Laplace { .. }
            | FamilySpec::Pareto { .. } => -rate,
            FamilySpec::Binomial { .. } if rate < 1.0 => (rate / (1.0 - rate)).ln(),
            FamilySpec::NegativeBinomial { .. } if rate < 1.0 => (1.0 - rate).ln(),
            _ => return Err(bad()),
        };
        let theta = NaturalParam::scalar(theta);
        self.check_domain(&theta.0).map_err(|_| bad())?;
        Ok(theta)
    }
}

fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}
