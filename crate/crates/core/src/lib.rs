//! Multiple change-point detection for exponential-family sequences.
//!
//! Segment costs are minus the maximized log-likelihood of each segment,
//! exact optimal segmentations are found by a pruned segment-neighborhood
//! dynamic program, and the number of segments is chosen by a penalized
//! criterion calibrated with the slope heuristic.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cart;
pub mod dp;
pub mod error;
pub mod family;
pub mod io;
pub mod metrics;
pub mod partition;
pub mod pipeline;
pub mod prefix;
pub mod select;
pub mod simulate;

pub use cart::{greedy_binary_candidates, CandidateSet};
pub use dp::{brute_force_best, dp_on_grid, segment_neighborhood, theoretical_min_len, CostCurve};
pub use error::{Error, Result};
pub use family::{
    chi_square, theory_constants, FamilySpec, NaturalParam, ParamBox, TheoryConstants,
};
pub use metrics::{
    hausdorff, hellinger_profile_distance, kl_profile_distance, partition_divergence,
    PiecewiseProfile,
};
pub use partition::Partition;
pub use pipeline::{run_segment, segment_series, InputSource, RunConfig, SegmentOutcome};
pub use prefix::PrefixStats;
pub use select::{
    calibrate_slope_heuristic, penalty_value, select_fixed_beta, select_with, Beta,
    CalibrationMethod, PenaltySpec, SelectionResult,
};
pub use simulate::{
    draw_scenario, run_study, sample_sequence, ScenarioConfig, ScenarioTruth, StudyOptions,
    StudyRow,
};
