//! Input generators shared by the benchmarks.

use efseg::simulate::{draw_scenario, sample_sequence, ScenarioConfig};
use efseg::{FamilySpec, PrefixStats};

/// Exponential series of length `n` from the first rate group.
pub fn exponential_series(n: usize, k_mean: f64, seed: u64) -> Vec<f64> {
    let config = ScenarioConfig::rate_group(1, n, k_mean, 10, seed).expect("valid scenario");
    let truth = draw_scenario(&config).expect("feasible scenario");
    sample_sequence(&truth, &config.family, seed).expect("valid rates")
}

/// Nucleotide-like categorical series with slowly drifting composition.
pub fn categorical_series(n: usize, blocks: usize) -> Vec<f64> {
    let block = n.div_ceil(blocks.max(1));
    (0..n)
        .map(|t| {
            let b = t / block;
            let h = (t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 40;
            // block b favours category b mod 4 for one draw in four
            if h.is_multiple_of(4) {
                (b % 4 + 1) as f64
            } else {
                (h % 4 + 1) as f64
            }
        })
        .collect()
}

pub fn exponential_prefix(n: usize, seed: u64) -> PrefixStats {
    PrefixStats::build(
        FamilySpec::Exponential,
        &exponential_series(n, n as f64 / 500.0, seed),
    )
    .expect("positive data")
}
