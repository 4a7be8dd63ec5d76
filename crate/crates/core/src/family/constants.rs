//! Variance-to-mean sandwich constants `ζ·E ≤ Var T ≤ κ·E` over a compact
//! box of natural parameters.

use serde::{Deserialize, Serialize};

use super::FamilySpec;
use crate::error::{Error, Result};

/// Axis-aligned compact set of natural parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ParamBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        ParamBox { lower, upper }
    }

    /// The categorical box `[−log a, log a]^d`.
    pub fn symmetric_log(a: f64, d: usize) -> Self {
        ParamBox {
            lower: vec![-a.ln(); d],
            upper: vec![a.ln(); d],
        }
    }

    fn validate(&self, spec: &FamilySpec) -> Result<()> {
        let d = spec.dim();
        if self.lower.len() != d || self.upper.len() != d {
            return Err(Error::Argument(format!("box must have dimension {d}")));
        }
        if self.lower.iter().zip(&self.upper).any(|(l, u)| !(l < u)) {
            return Err(Error::Argument(
                "box lower bounds must be below upper bounds".into(),
            ));
        }
        spec.check_domain(&self.lower)?;
        spec.check_domain(&self.upper)?;
        Ok(())
    }

    /// All `2^d` corners of the box.
    fn corners(&self) -> Vec<Vec<f64>> {
        let d = self.lower.len();
        (0..1usize << d)
            .map(|mask| {
                (0..d)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            self.upper[i]
                        } else {
                            self.lower[i]
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Variance/mean constants and the mean bounds over the box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    pub zeta: f64,
    pub kappa: f64,
    pub e_min: f64,
    pub e_max: f64,
    pub m_eps: Option<f64>,
    #[serde(rename = "M_eps")]
    pub big_m_eps: Option<f64>,
}

/// Evaluates the variance/mean constants for `spec` over `bx`.
///
/// `epsilon` requests `m_ε` and `M_ε`, which are only defined for the
/// categorical family and require `ε < E^min`.
pub fn theory_constants(
    spec: &FamilySpec,
    bx: &ParamBox,
    epsilon: Option<f64>,
) -> Result<TheoryConstants> {
    spec.validate()?;
    bx.validate(spec)?;
    let lo = bx.lower[0];
    let hi = bx.upper[0];

    if let FamilySpec::Categorical { dim } = *spec {
        let a = categorical_radius(bx)?;
        let d = dim as f64;
        let zeta = (d + a * (1.0 - a)) / (d + a);
        if zeta <= 0.0 {
            return Err(Error::Argument(format!(
                "categorical box with a = {a} and d = {dim} gives a non-positive zeta"
            )));
        }
        let e_min = 1.0 / (a + a * a * d);
        let e_max = a * a / (d + a);
        let (m_eps, big_m_eps) = match epsilon {
            None => (None, None),
            Some(eps) if eps >= 0.0 && eps < e_min => {
                (Some((e_min - eps).powi(dim as i32 + 1)), Some(1.0))
            }
            Some(eps) => {
                return Err(Error::Argument(format!(
                    "epsilon {eps} must lie in [0, e_min = {e_min})"
                )))
            }
        };
        return Ok(TheoryConstants {
            zeta,
            kappa: 2.0,
            e_min,
            e_max,
            m_eps,
            big_m_eps,
        });
    }
    if epsilon.is_some() {
        return Err(Error::Argument(format!(
            "m_eps and M_eps are only available for the categorical family, not {}",
            spec.name()
        )));
    }

    let (zeta, kappa) = match *spec {
        FamilySpec::Poisson => (1.0, 1.0),
        FamilySpec::Exponential
        | FamilySpec::Gamma { .. }
        | FamilySpec::Weibull { .. }
        | FamilySpec::Laplace { .. } => (-1.0 / lo, -1.0 / hi),
        FamilySpec::GaussianPositiveMean => {
            let (t1_lo, t2_lo) = (bx.lower[0], bx.lower[1]);
            let (t1_hi, t2_hi) = (bx.upper[0], bx.upper[1]);
            (
                (1.0 / t1_hi).min(-1.0 / t2_lo),
                (1.0 / t1_lo).max(-2.0 / t2_hi),
            )
        }
        FamilySpec::Binomial { .. } => (1.0 / (1.0 + hi.exp()), 2.0),
        FamilySpec::NegativeBinomial { .. } => {
            // Var/E = 1/(1 − e^θ) is increasing in θ; e^{−θ_min} alone does not
            // bound it when θ_max is close to 0.
            let sup = -1.0 / hi.exp_m1();
            (1.0, (-lo).exp().max(sup))
        }
        FamilySpec::Pareto { scale } => pareto_constants(scale, lo, hi)?,
        FamilySpec::Categorical { .. } => unreachable!(),
    };

    let (e_min, e_max) =
        bx.corners()
            .iter()
            .try_fold((f64::INFINITY, f64::NEG_INFINITY), |acc, c| {
                let g = spec.grad_log_partition(c)?;
                Ok::<_, Error>(g.iter().fold(acc, |(mn, mx), &v| (mn.min(v), mx.max(v))))
            })?;

    Ok(TheoryConstants {
        zeta,
        kappa,
        e_min,
        e_max,
        m_eps: None,
        big_m_eps: None,
    })
}

fn categorical_radius(bx: &ParamBox) -> Result<f64> {
    let log_a = bx.upper[0];
    let symmetric = bx.upper.iter().zip(&bx.lower).all(|(&u, &l)| {
        (u - log_a).abs() <= 1e-12 * log_a.abs().max(1.0)
            && (l + log_a).abs() <= 1e-12 * log_a.abs().max(1.0)
    });
    if !symmetric || log_a <= 0.0 {
        return Err(Error::Argument(
            "categorical box must have the form [-log a, log a]^d with a > 1".into(),
        ));
    }
    Ok(log_a.exp())
}

/// Pareto row. With `L = log x_m < 0` the ratio `Var/E = 1/(θ(θL − 1))` is
/// convex in θ with its minimum at `θ = 1/(2L)`, so the tabulated values are
/// widened to the exact extremes over the box whenever they fail to bound it.
fn pareto_constants(scale: f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
    if scale >= 1.0 {
        return Err(Error::Argument(format!(
            "pareto: constants require scale < 1 (got {scale})"
        )));
    }
    let log_xm = scale.ln();
    // shape α = −θ must stay below −1/log x_m
    if lo <= 1.0 / log_xm {
        return Err(Error::Argument(format!(
            "pareto: box lower bound {lo} must exceed 1/log(x_m) = {}",
            1.0 / log_xm
        )));
    }
    let ratio = |t: f64| 1.0 / (t * (t * log_xm - 1.0));
    let table_zeta = ratio(hi);
    let table_kappa = log_xm / (lo * log_xm - 1.0);
    let critical = 1.0 / (2.0 * log_xm);
    let mut inf = ratio(lo).min(ratio(hi));
    if lo < critical && critical < hi {
        inf = inf.min(ratio(critical));
    }
    let sup = ratio(lo).max(ratio(hi));
    Ok((table_zeta.min(inf), table_kappa.max(sup)))
}
