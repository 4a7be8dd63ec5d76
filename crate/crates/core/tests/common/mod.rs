#![allow(dead_code)]

use efseg::FamilySpec;

/// One instance of every supported family.
pub fn all_families() -> Vec<FamilySpec> {
    vec![
        FamilySpec::Poisson,
        FamilySpec::Exponential,
        FamilySpec::GaussianPositiveMean,
        FamilySpec::Pareto { scale: 0.5 },
        FamilySpec::Gamma { shape: 2.5 },
        FamilySpec::Weibull { shape: 1.7 },
        FamilySpec::Laplace { location: 1.5 },
        FamilySpec::Binomial { trials: 10 },
        FamilySpec::NegativeBinomial { dispersion: 2.5 },
        FamilySpec::Categorical { dim: 3 },
    ]
}

/// Per-coordinate natural-parameter range used for grids and random draws.
pub fn theta_range(spec: &FamilySpec) -> Vec<(f64, f64)> {
    match spec {
        FamilySpec::Poisson | FamilySpec::Binomial { .. } => vec![(-3.0, 3.0)],
        FamilySpec::Exponential
        | FamilySpec::Gamma { .. }
        | FamilySpec::Weibull { .. }
        | FamilySpec::Laplace { .. } => vec![(-5.0, -0.1)],
        FamilySpec::Pareto { .. } => vec![(-1.4, -0.1)],
        FamilySpec::GaussianPositiveMean => vec![(0.1, 3.0), (-3.0, -0.1)],
        FamilySpec::NegativeBinomial { .. } => vec![(-3.0, -0.05)],
        FamilySpec::Categorical { dim } => vec![(-2.0, 2.0); *dim],
    }
}

/// Point of the parameter range at fractions `u` (one per coordinate).
pub fn theta_at(spec: &FamilySpec, u: &[f64]) -> Vec<f64> {
    theta_range(spec)
        .iter()
        .zip(u)
        .map(|(&(lo, hi), &t)| lo + (hi - lo) * t)
        .collect()
}

/// `m` points per family spread over the range; multi-dimensional
/// families use a scrambled lattice.
pub fn theta_grid(spec: &FamilySpec, m: usize) -> Vec<Vec<f64>> {
    let d = spec.dim();
    (0..m)
        .map(|i| {
            let u: Vec<f64> = (0..d)
                .map(|j| {
                    let step = [1usize, 7, 11, 13][j % 4];
                    ((i * step + j) % m) as f64 / (m - 1) as f64
                })
                .collect();
            theta_at(spec, &u)
        })
        .collect()
}

/// Small integer-valued observations in the support of `spec`, chosen to
/// produce frequent cost ties.
pub fn small_observation(spec: &FamilySpec, code: u8) -> f64 {
    match spec {
        FamilySpec::Poisson | FamilySpec::NegativeBinomial { .. } => (code % 4) as f64,
        FamilySpec::Binomial { trials } => (code as u32 % (trials + 1)) as f64,
        FamilySpec::Categorical { dim } => (code as usize % (dim + 1) + 1) as f64,
        FamilySpec::Pareto { scale } => scale + 1.0 + (code % 3) as f64,
        FamilySpec::Laplace { location } => location + (code % 5) as f64 - 2.0,
        FamilySpec::GaussianPositiveMean => 1.0 + (code % 4) as f64,
        _ => 1.0 + (code % 3) as f64,
    }
}
