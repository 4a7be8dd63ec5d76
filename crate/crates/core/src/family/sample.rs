use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma, Normal, Poisson};

use super::FamilySpec;
use crate::error::{Error, Result};

fn standard_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    -u.ln()
}

fn invalid(spec: &FamilySpec, theta: &[f64]) -> Error {
    Error::Domain {
        family: spec.name(),
        theta: theta.to_vec(),
    }
}

/// Draws one observation from `G(θ)`. Categorical draws are returned as the
/// category index in `1..=d+1`.
pub fn draw<R: Rng + ?Sized>(spec: &FamilySpec, theta: &[f64], rng: &mut R) -> Result<f64> {
    spec.check_domain(theta)?;
    let t = theta[0];
    let y = match *spec {
        FamilySpec::Poisson => {
            let d = Poisson::new(t.exp()).map_err(|_| invalid(spec, theta))?;
            d.sample(rng)
        }
        // inverse CDF
        FamilySpec::Exponential => standard_exponential(rng) / -t,
        FamilySpec::Gamma { shape } => {
            let d = Gamma::new(shape, -1.0 / t).map_err(|_| invalid(spec, theta))?;
            // Gamma draws can underflow to exactly zero for tiny shapes.
            d.sample(rng).max(f64::MIN_POSITIVE)
        }
        FamilySpec::Weibull { shape } => {
            let scale = (-t).powf(-1.0 / shape);
            scale * standard_exponential(rng).powf(1.0 / shape)
        }
        FamilySpec::Laplace { location } => {
            let magnitude = standard_exponential(rng) / -t;
            if rng.random::<bool>() {
                location + magnitude
            } else {
                location - magnitude
            }
        }
        FamilySpec::Pareto { scale } => {
            let u: f64 = rng.sample(Open01);
            scale * u.powf(1.0 / t)
        }
        FamilySpec::GaussianPositiveMean => {
            let var = -1.0 / (2.0 * theta[1]);
            let mean = theta[0] * var;
            let d = Normal::new(mean, var.sqrt()).map_err(|_| invalid(spec, theta))?;
            d.sample(rng)
        }
        FamilySpec::Binomial { trials } => {
            let p = 1.0 / (1.0 + (-t).exp());
            let d = Binomial::new(u64::from(trials), p).map_err(|_| invalid(spec, theta))?;
            d.sample(rng) as f64
        }
        FamilySpec::NegativeBinomial { dispersion } => {
            // Gamma-Poisson mixture with mean φ(1 − p)/p, where 1 − p = e^θ.
            let q = t.exp();
            let gamma = Gamma::new(dispersion, q / (1.0 - q)).map_err(|_| invalid(spec, theta))?;
            let lambda = gamma.sample(rng);
            if lambda > 0.0 {
                Poisson::new(lambda)
                    .map_err(|_| invalid(spec, theta))?
                    .sample(rng)
            } else {
                0.0
            }
        }
        FamilySpec::Categorical { dim } => {
            let probs = spec.grad_log_partition(theta)?;
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut cat = dim + 1;
            for (i, p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    cat = i + 1;
                    break;
                }
            }
            cat as f64
        }
    };
    Ok(y)
}
