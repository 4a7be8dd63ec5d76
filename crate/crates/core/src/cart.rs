//! Greedy binary segmentation producing candidate change-points for
//! [`crate::dp::dp_on_grid`].
//!
//! Splits are accepted best-gain-first across all open segments, so the
//! candidate budget is spent on the most contrasted breaks.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prefix::PrefixStats;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CandidateSet {
    /// Sorted candidate change-points.
    pub positions: Vec<usize>,
    /// Contrast reduction obtained when each position was introduced, aligned with `positions`.
    pub gains: Vec<f64>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
struct Split {
    gain: f64,
    start: usize,
    end: usize,
    at: usize,
}

impl PartialEq for Split {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Split {}

impl PartialOrd for Split {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Split {
    // max-heap on gain; earlier positions first among equal gains
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.at.cmp(&self.at))
    }
}

/// Best split of `(start, end]`, or `None` when no split respects `min_len`.
fn best_split(
    prefix: &PrefixStats,
    start: usize,
    end: usize,
    min_len: usize,
) -> Result<Option<Split>> {
    if end - start < 2 * min_len {
        return Ok(None);
    }
    let parent = prefix.cost(start, end)?;
    let mut best: Option<Split> = None;
    for at in start + min_len..=end - min_len {
        let gain = parent - prefix.cost(start, at)? - prefix.cost(at, end)?;
        if best.is_none_or(|b| gain > b.gain) {
            best = Some(Split {
                gain,
                start,
                end,
                at,
            });
        }
    }
    Ok(best)
}

/// Greedy binary segmentation.
///
/// Stops when `max_candidates` splits have been accepted or when the best
/// remaining gain falls below `min_gain`.
pub fn greedy_binary_candidates(
    prefix: &PrefixStats,
    max_candidates: usize,
    min_len: usize,
    min_gain: f64,
) -> Result<CandidateSet> {
    if max_candidates == 0 || min_len == 0 {
        return Err(Error::Argument(
            "max_candidates and min_len must be at least 1".into(),
        ));
    }
    if !(min_gain >= 0.0) {
        return Err(Error::Argument("min_gain must be nonnegative".into()));
    }
    let mut heap = BinaryHeap::new();
    if let Some(s) = best_split(prefix, 0, prefix.n(), min_len)? {
        heap.push(s);
    }
    let mut accepted: Vec<(usize, f64)> = Vec::new();
    while accepted.len() < max_candidates {
        let Some(split) = heap.pop() else { break };
        if split.gain < min_gain {
            break;
        }
        accepted.push((split.at, split.gain));
        for (a, b) in [(split.start, split.at), (split.at, split.end)] {
            if let Some(s) = best_split(prefix, a, b, min_len)? {
                heap.push(s);
            }
        }
    }
    accepted.sort_by_key(|&(p, _)| p);
    Ok(CandidateSet {
        positions: accepted.iter().map(|&(p, _)| p).collect(),
        gains: accepted.iter().map(|&(_, g)| g).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::FamilySpec;

    fn poisson(data: &[f64]) -> PrefixStats {
        PrefixStats::build(FamilySpec::Poisson, data).unwrap()
    }

    #[test]
    fn single_step() {
        let p = poisson(&[0.0, 0.0, 0.0, 9.0, 9.0, 9.0]);
        let c = greedy_binary_candidates(&p, 1, 1, 0.0).unwrap();
        assert_eq!(c.positions, vec![3]);
        // brute force over the five splits
        let total = p.cost(0, 6).unwrap();
        let gains: Vec<f64> = (1..6)
            .map(|s| total - p.cost(0, s).unwrap() - p.cost(s, 6).unwrap())
            .collect();
        let best = (0..5)
            .max_by(|&a, &b| gains[a].total_cmp(&gains[b]))
            .unwrap()
            + 1;
        assert_eq!(best, 3);
        assert!((c.gains[0] - gains[2]).abs() < 1e-12);
    }

    #[test]
    fn constant_data_yields_nothing() {
        let p = poisson(&[4.0; 30]);
        let c = greedy_binary_candidates(&p, 10, 2, 1e-6).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn two_breaks() {
        let mut data = vec![0.0; 10];
        data.extend([9.0; 10]);
        data.extend([0.0; 10]);
        let p = poisson(&data);
        let c = greedy_binary_candidates(&p, 2, 1, 0.0).unwrap();
        assert_eq!(c.positions, vec![10, 20]);
        assert!(c.gains.iter().all(|&g| g >= 0.0));
    }

    #[test]
    fn respects_min_len() {
        let mut data = vec![0.0; 3];
        data.extend([9.0; 20]);
        let p = poisson(&data);
        let c = greedy_binary_candidates(&p, 5, 5, 0.0).unwrap();
        assert!(c.positions.iter().all(|&x| (5..=18).contains(&x)));
        assert!(c.positions.windows(2).all(|w| w[1] - w[0] >= 5));
    }
}
