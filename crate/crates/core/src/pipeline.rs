//! End-to-end segmentation of one input series.

use serde::{Deserialize, Serialize};

use crate::cart::{greedy_binary_candidates, CandidateSet};
use crate::dp::{dp_on_grid, segment_neighborhood, CostCurve};
use crate::error::{Error, Result};
use crate::family::{chi_square, FamilySpec};
use crate::io::{
    read_fasta_categorical, read_series_csv, AmbiguityPolicy, CurveRow, DocumentDiagnostics,
    InputDescriptor, Real, ResultDocument, SegmentEstimate, Selection,
};
use crate::partition::Partition;
use crate::prefix::PrefixStats;
use crate::select::{
    select_with, Beta, CalibrationMethod, Diagnostics, PenaltySpec, SelectionResult,
};
use crate::simulate::{draw_scenario, sample_sequence, ScenarioConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSource {
    Csv(String),
    Fasta {
        path: String,
        policy: AmbiguityPolicy,
    },
    Simulate(ScenarioConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: InputSource,
    pub family: FamilySpec,
    pub kmax: usize,
    pub min_len: usize,
    pub beta: Beta,
    pub hybrid: bool,
    /// Candidate budget of the hybrid search; `4·kmax` when unset.
    pub max_candidates: Option<usize>,
    /// Report natural parameters next to the segment means.
    pub natural: bool,
}

impl RunConfig {
    pub fn new(input: InputSource, family: FamilySpec) -> Self {
        RunConfig {
            input,
            family,
            kmax: 20,
            min_len: 2,
            beta: Beta::Calibrate(CalibrationMethod::DimensionJump),
            hybrid: false,
            max_candidates: None,
            natural: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        if let InputSource::Fasta { .. } = self.input {
            if self.family != (FamilySpec::Categorical { dim: 3 }) {
                return Err(Error::Argument(
                    "FASTA input requires the categorical family with dim 3".into(),
                ));
            }
        }
        if let InputSource::Simulate(c) = &self.input {
            if c.family != self.family {
                return Err(Error::Argument(
                    "scenario family differs from the run family".into(),
                ));
            }
        }
        if self.kmax == 0 || self.min_len == 0 {
            return Err(Error::Argument(
                "kmax and min_len must be at least 1".into(),
            ));
        }
        if self.max_candidates == Some(0) {
            return Err(Error::Argument("max_candidates must be at least 1".into()));
        }
        Ok(())
    }
}

/// Loaded observations with their descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedInput {
    pub data: Vec<f64>,
    pub descriptor: InputDescriptor,
}

pub fn load_input(config: &RunConfig) -> Result<LoadedInput> {
    config.validate()?;
    let (kind, source, data, dropped) = match &config.input {
        InputSource::Csv(path) => ("csv", path.clone(), read_series_csv(path)?, 0),
        InputSource::Fasta { path, policy } => {
            let s = read_fasta_categorical(path, *policy)?;
            ("fasta", path.clone(), s.values, s.dropped)
        }
        InputSource::Simulate(c) => {
            let truth = draw_scenario(c)?;
            (
                "simulate",
                format!("seed {}", c.seed),
                sample_sequence(&truth, &c.family, c.seed)?,
                0,
            )
        }
    };
    Ok(LoadedInput {
        descriptor: InputDescriptor {
            kind: kind.into(),
            source,
            n: data.len(),
            family: config.family,
            dropped,
        },
        data,
    })
}

/// Everything computed by [`run_segment`].
#[derive(Debug, Clone)]
pub struct SegmentOutcome {
    pub curve: CostCurve,
    pub selection: SelectionResult,
    pub candidates: Option<CandidateSet>,
    pub document: ResultDocument,
}

pub fn run_segment(config: &RunConfig) -> Result<SegmentOutcome> {
    let input = load_input(config)?;
    segment_series(config, &input.data, input.descriptor)
}

/// Runs the pipeline on data already in memory.
pub fn segment_series(
    config: &RunConfig,
    data: &[f64],
    descriptor: InputDescriptor,
) -> Result<SegmentOutcome> {
    config.validate()?;
    let prefix = PrefixStats::build(config.family, data)?;
    let n = prefix.n();
    let (curve, candidates) = if config.hybrid {
        let budget = config.max_candidates.unwrap_or(4 * config.kmax);
        let cands = greedy_binary_candidates(&prefix, budget, config.min_len, 0.0)?;
        let kmax = config.kmax.min(cands.len() + 1);
        (
            dp_on_grid(&prefix, &cands.positions, kmax, config.min_len)?,
            Some(cands),
        )
    } else {
        (
            segment_neighborhood(&prefix, config.kmax, config.min_len, true)?,
            None,
        )
    };
    let penalty = PenaltySpec::new(config.family.dim(), config.beta);
    let selection = select_with(&curve, n, &penalty)?;
    let document = build_document(
        config,
        &prefix,
        &curve,
        &selection,
        candidates.as_ref(),
        descriptor,
    )?;
    Ok(SegmentOutcome {
        curve,
        selection,
        candidates,
        document,
    })
}

fn build_document(
    config: &RunConfig,
    prefix: &PrefixStats,
    curve: &CostCurve,
    selection: &SelectionResult,
    candidates: Option<&CandidateSet>,
    input: InputDescriptor,
) -> Result<ResultDocument> {
    let spec = config.family;
    let penalties: std::collections::HashMap<usize, f64> =
        selection.penalties.iter().copied().collect();
    let cost_curve = curve
        .feasible()
        .map(|(k, cost)| {
            let pen = penalties.get(&k).copied().unwrap_or(f64::NAN);
            CurveRow {
                k,
                cost: Real(cost),
                penalty: Real(pen),
                penalized: Real(cost + pen),
            }
        })
        .collect();
    let partition = &selection.partition;
    let mut segments = Vec::with_capacity(partition.k());
    for (a, b) in partition.segments() {
        let mean = prefix.segment_mean(a, b);
        let mut estimate = SegmentEstimate::new(a, b, &mean, None);
        if config.natural {
            match spec.inv_grad_log_partition(&mean) {
                Ok(theta) => estimate = SegmentEstimate::new(a, b, &mean, Some(theta.as_slice())),
                Err(Error::Boundary { .. }) => estimate.boundary = true,
                Err(e) => return Err(e),
            }
        }
        segments.push(estimate);
    }
    let (method, beta_min) = match (&config.beta, &selection.diagnostics) {
        (Beta::Fixed(_), _) => ("fixed", None),
        (_, Diagnostics::DimensionJump { beta_min, .. }) => {
            ("dimension_jump", Some(Real(*beta_min)))
        }
        (_, Diagnostics::SlopeFit { slope, .. }) => ("slope_fit", Some(Real(-slope))),
        (_, Diagnostics::None) => ("calibrated", None),
    };
    let overall = prefix.segment_mean(0, prefix.n());
    let chi = chi_square(partition, prefix, &vec![overall; partition.k()])
        .ok()
        .map(Real);
    Ok(ResultDocument {
        input,
        kmax: curve.kmax(),
        min_len: config.min_len,
        hybrid: config.hybrid,
        cost_curve,
        selection: Selection {
            k_hat: selection.k_hat,
            beta_hat: Real(selection.beta_hat),
            method: method.into(),
            beta_min,
        },
        change_points: partition.breaks().to_vec(),
        segments,
        diagnostics: DocumentDiagnostics {
            chi_square: chi,
            candidates: candidates.map(|c| c.positions.clone()),
        },
    })
}

/// Change-points of the optimal `k`-segment model on a cost curve.
pub fn change_points_at(curve: &CostCurve, k: usize) -> Option<Vec<usize>> {
    curve.argmin(k).map(|p: &Partition| p.breaks().to_vec())
}
