//! Penalized selection of the number of segments.
//!
//! The penalty is `pen(K) = β·d·K·(1 + 4√(c + log(n/K)))²` with `c = 1.1` by
//! default. The multiplier β is either fixed or calibrated from the cost
//! curve with the slope heuristic.

use serde::{Deserialize, Serialize};

use crate::dp::CostCurve;
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Default additive constant of the weights `L_K = c + log(n/K)`.
pub const DEFAULT_OFFSET: f64 = 1.1;
/// Bounds and resolution of the β scan used for dimension-jump diagnostics.
pub const BETA_GRID_MIN: f64 = 1e-4;
pub const BETA_GRID_MAX: f64 = 1e4;
pub const BETA_GRID_POINTS: usize = 400;
/// Ratio between the calibrated multiplier and the minimal one.
pub const DEFAULT_CALIBRATION_FACTOR: f64 = 2.0;
/// Smallest `kmax` accepted by the slope heuristic.
pub const MIN_CALIBRATION_KMAX: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationMethod {
    #[default]
    DimensionJump,
    SlopeFit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Beta {
    Fixed(f64),
    Calibrate(CalibrationMethod),
}

/// Penalty configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltySpec {
    pub d: usize,
    pub beta: Beta,
    pub c_offset: f64,
    /// `beta_hat = factor · beta_min` for calibrated penalties.
    pub factor: f64,
}

impl PenaltySpec {
    pub fn new(d: usize, beta: Beta) -> Self {
        PenaltySpec {
            d,
            beta,
            c_offset: DEFAULT_OFFSET,
            factor: DEFAULT_CALIBRATION_FACTOR,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Argument(
                "penalty dimension must be at least 1".into(),
            ));
        }
        if !(self.c_offset > 0.0) {
            return Err(Error::Argument("c_offset must be positive".into()));
        }
        if !(self.factor > 0.0) {
            return Err(Error::Argument(
                "calibration factor must be positive".into(),
            ));
        }
        if let Beta::Fixed(b) = self.beta {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::Argument(format!("beta must be positive, got {b}")));
            }
        }
        Ok(())
    }
}

/// Calibration trace kept with a selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Diagnostics {
    None,
    DimensionJump {
        /// Minimal multiplier at which the largest drop in `k_hat` happens.
        beta_min: f64,
        /// `k_hat` just below and just above `beta_min`.
        jump_from: usize,
        jump_to: usize,
        /// Exact breakpoints `(β, k_hat for β above it)` of the selection path inside the grid bounds.
        breakpoints: Vec<(f64, usize)>,
        /// `(β, k_hat(β))` on the log grid.
        grid_path: Vec<(f64, usize)>,
    },
    SlopeFit {
        slope: f64,
        intercept: f64,
        k_range: (usize, usize),
        /// Residuals `cost[K] − (intercept + slope·shape[K])` over the fit window.
        residuals: Vec<f64>,
    },
}

/// Outcome of penalized selection.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub k_hat: usize,
    pub beta_hat: f64,
    /// `(K, cost[K] + pen(K))` for every feasible K.
    pub penalized: Vec<(usize, f64)>,
    /// `(K, pen(K))` for every feasible K.
    pub penalties: Vec<(usize, f64)>,
    pub partition: Partition,
    pub diagnostics: Diagnostics,
}

/// Penalty shape `d·K·(1 + 4√(c + log(n/K)))²` (the penalty at β = 1).
pub fn penalty_shape(n: usize, k: usize, d: usize, c_offset: f64) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::Argument(format!(
            "penalty needs 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    if d == 0 {
        return Err(Error::Argument(
            "penalty dimension must be at least 1".into(),
        ));
    }
    let weight = c_offset + (n as f64 / k as f64).ln();
    let root = 1.0 + 4.0 * weight.sqrt();
    Ok(d as f64 * k as f64 * root * root)
}

/// `β·d·K·(1 + 4√(1.1 + log(n/K)))²`.
pub fn penalty_value(n: usize, k: usize, d: usize, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Argument(format!(
            "beta must be positive, got {beta}"
        )));
    }
    Ok(beta * penalty_shape(n, k, d, DEFAULT_OFFSET)?)
}

fn shapes(curve: &CostCurve, n: usize, d: usize, c_offset: f64) -> Result<Vec<(usize, f64, f64)>> {
    let out: Vec<(usize, f64, f64)> = curve
        .feasible()
        .map(|(k, c)| penalty_shape(n, k, d, c_offset).map(|p| (k, c, p)))
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(Error::Argument("cost curve has no feasible model".into()));
    }
    Ok(out)
}

/// `argmin_K cost[K] + β·shape[K]`, ties toward the smaller K.
fn argmin_at(points: &[(usize, f64, f64)], beta: f64) -> usize {
    let mut best = f64::INFINITY;
    let mut best_k = points[0].0;
    for &(k, c, p) in points {
        let v = c + beta * p;
        if v < best {
            best = v;
            best_k = k;
        }
    }
    best_k
}

fn finish(
    curve: &CostCurve,
    points: &[(usize, f64, f64)],
    beta: f64,
    diagnostics: Diagnostics,
) -> Result<SelectionResult> {
    let k_hat = argmin_at(points, beta);
    let partition = curve
        .argmin(k_hat)
        .cloned()
        .ok_or_else(|| Error::Argument(format!("no partition stored for K = {k_hat}")))?;
    Ok(SelectionResult {
        k_hat,
        beta_hat: beta,
        penalized: points.iter().map(|&(k, c, p)| (k, c + beta * p)).collect(),
        penalties: points.iter().map(|&(k, _, p)| (k, beta * p)).collect(),
        partition,
        diagnostics,
    })
}

/// Selection with a fixed multiplier.
pub fn select_fixed_beta(
    curve: &CostCurve,
    n: usize,
    d: usize,
    beta: f64,
) -> Result<SelectionResult> {
    select_with(curve, n, &PenaltySpec::new(d, Beta::Fixed(beta)))
}

/// Selection following a full penalty configuration.
pub fn select_with(curve: &CostCurve, n: usize, penalty: &PenaltySpec) -> Result<SelectionResult> {
    penalty.validate()?;
    match penalty.beta {
        Beta::Fixed(beta) => {
            let points = shapes(curve, n, penalty.d, penalty.c_offset)?;
            finish(curve, &points, beta, Diagnostics::None)
        }
        Beta::Calibrate(method) => calibrate(curve, n, penalty, method),
    }
}

/// Slope-heuristic calibration with the default offset and factor.
pub fn calibrate_slope_heuristic(
    curve: &CostCurve,
    n: usize,
    d: usize,
    method: CalibrationMethod,
) -> Result<SelectionResult> {
    calibrate(
        curve,
        n,
        &PenaltySpec::new(d, Beta::Calibrate(method)),
        method,
    )
}

fn calibrate(
    curve: &CostCurve,
    n: usize,
    penalty: &PenaltySpec,
    method: CalibrationMethod,
) -> Result<SelectionResult> {
    if curve.kmax() < MIN_CALIBRATION_KMAX {
        return Err(Error::Calibration(format!(
            "slope heuristic needs kmax >= {MIN_CALIBRATION_KMAX}, got {}",
            curve.kmax()
        )));
    }
    let points = shapes(curve, n, penalty.d, penalty.c_offset)?;
    let (beta_min, diagnostics) = match method {
        CalibrationMethod::DimensionJump => dimension_jump(&points)?,
        CalibrationMethod::SlopeFit => slope_fit(&points, curve.kmax())?,
    };
    finish(curve, &points, penalty.factor * beta_min, diagnostics)
}

/// Vertices of the lower convex hull of `(shape, cost)`, ordered by
/// increasing shape; these are the only models `k_hat(β)` can return.
fn lower_hull(points: &[(usize, f64, f64)]) -> Vec<(usize, f64, f64)> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.2.total_cmp(&b.2));
    let mut hull: Vec<(usize, f64, f64)> = Vec::new();
    for p in sorted {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b when it lies on or above the chord a–p, up to rounding
            let lhs = (b.2 - a.2) * (p.1 - a.1);
            let rhs = (b.1 - a.1) * (p.2 - a.2);
            if lhs - rhs <= 1e-12 * (lhs.abs() + rhs.abs()) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Locates the largest drop of `k_hat(β)` over `[BETA_GRID_MIN, BETA_GRID_MAX]`.
///
/// The breakpoints of the path are computed exactly from the lower hull of
/// the cost curve, so the located minimal multiplier scales exactly with the
/// costs. The log grid is kept as a diagnostic trace.
fn dimension_jump(points: &[(usize, f64, f64)]) -> Result<(f64, Diagnostics)> {
    let hull = lower_hull(points);
    // Between consecutive hull vertices (smaller shape first) the selection
    // switches at β = (cost_small − cost_large)/(shape_large − shape_small).
    let mut breakpoints = Vec::new();
    let mut best: Option<(usize, f64, usize, usize)> = None;
    for w in hull.windows(2).rev() {
        let (small, large) = (w[0], w[1]);
        let beta = (small.1 - large.1) / (large.2 - small.2);
        if !(BETA_GRID_MIN..=BETA_GRID_MAX).contains(&beta) {
            continue;
        }
        breakpoints.push((beta, small.0));
        let drop = large.0.saturating_sub(small.0);
        if best.is_none_or(|(d, ..)| drop > d) {
            best = Some((drop, beta, large.0, small.0));
        }
    }
    let grid_path: Vec<(f64, usize)> = (0..BETA_GRID_POINTS)
        .map(|i| {
            let t = i as f64 / (BETA_GRID_POINTS - 1) as f64;
            let beta = BETA_GRID_MIN * (BETA_GRID_MAX / BETA_GRID_MIN).powf(t);
            (beta, argmin_at(points, beta))
        })
        .collect();
    let (_, beta_min, jump_from, jump_to) = best.ok_or_else(|| {
        Error::Calibration("no dimension jump inside the beta range; increase kmax".into())
    })?;
    Ok((
        beta_min,
        Diagnostics::DimensionJump {
            beta_min,
            jump_from,
            jump_to,
            breakpoints,
            grid_path,
        },
    ))
}

/// Least-absolute-deviation fit of `cost[K] ≈ a + s·shape[K]` over
/// `K ∈ [kmax/2, kmax]`; returns `−s` as the minimal multiplier.
///
/// The LAD line passes through two of the data points, so every pair is tried.
fn slope_fit(points: &[(usize, f64, f64)], kmax: usize) -> Result<(f64, Diagnostics)> {
    let lo = kmax.div_ceil(2).max(1);
    let window: Vec<(usize, f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(k, ..)| k >= lo && k <= kmax)
        .collect();
    if window.len() < 3 {
        return Err(Error::Calibration(
            "too few models in the fit window; increase kmax".into(),
        ));
    }
    let mut best: Option<(f64, f64, f64)> = None;
    for i in 0..window.len() {
        for j in i + 1..window.len() {
            let (_, ci, pi) = window[i];
            let (_, cj, pj) = window[j];
            let dx = pj - pi;
            if dx.abs() <= f64::EPSILON * pj.abs() {
                continue;
            }
            let slope = (cj - ci) / dx;
            let intercept = ci - slope * pi;
            let loss: f64 = window
                .iter()
                .map(|&(_, c, p)| (c - intercept - slope * p).abs())
                .sum();
            if best.is_none_or(|(l, ..)| loss < l) {
                best = Some((loss, slope, intercept));
            }
        }
    }
    let (_, slope, intercept) =
        best.ok_or_else(|| Error::Calibration("degenerate fit window".into()))?;
    if !(slope < 0.0) {
        return Err(Error::Calibration(format!(
            "fitted slope {slope} is not negative; increase kmax"
        )));
    }
    let residuals = window
        .iter()
        .map(|&(_, c, p)| c - intercept - slope * p)
        .collect();
    Ok((
        -slope,
        Diagnostics::SlopeFit {
            slope,
            intercept,
            k_range: (lo, kmax),
            residuals,
        },
    ))
}
