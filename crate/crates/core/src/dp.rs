//! Segment-neighborhood dynamic programming.
//!
//! `C_K(t) = min_s C_{K−1}(s) + cost(s+1..t)` over the allowed change-point
//! grid. Costs are evaluated on demand from [`PrefixStats`]; only the
//! backpointers are kept per layer.
//!
//! Pruning: because the minimal contrast is superadditive
//! (`cost(a..c) ≥ cost(a..b) + cost(b+1..c)`), a candidate `s` for which
//! `C_{K−1}(s) + cost(s+1..t) > C_{K−1}(t)` can never beat `t` as the last
//! change-point of any later target `t' ≥ t + min_len`. Such candidates are
//! retired once those targets are reached. A relative margin keeps the test
//! strict under rounding, so the pruned and unpruned recursions return the
//! same optima and the same tie-breaks.

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::prefix::PrefixStats;

const NO_PRED: u32 = u32::MAX;
const PRUNE_MARGIN: f64 = 1e-9;

/// Optimal contrast and partition for every number of segments `1..=kmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostCurve {
    kmax: usize,
    cost: Vec<Option<f64>>,
    argmin: Vec<Option<Partition>>,
}

impl CostCurve {
    pub fn kmax(&self) -> usize {
        self.kmax
    }

    /// Minimal contrast with exactly `k` segments, `None` when infeasible.
    pub fn cost(&self, k: usize) -> Option<f64> {
        k.checked_sub(1)
            .and_then(|i| self.cost.get(i).copied().flatten())
    }

    pub fn argmin(&self, k: usize) -> Option<&Partition> {
        k.checked_sub(1)
            .and_then(|i| self.argmin.get(i))
            .and_then(Option::as_ref)
    }

    /// `(K, cost[K])` for every feasible `K`.
    pub fn feasible(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.cost
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|c| (i + 1, c)))
    }

    /// Returns a copy with every cost multiplied by `factor` (partitions unchanged).
    pub fn scaled(&self, factor: f64) -> CostCurve {
        CostCurve {
            kmax: self.kmax,
            cost: self.cost.iter().map(|c| c.map(|c| c * factor)).collect(),
            argmin: self.argmin.clone(),
        }
    }

    /// Builds a curve from explicit costs with placeholder single-segment
    /// partitions; used to drive model selection on synthetic curves.
    pub fn from_costs(n: usize, costs: &[f64]) -> CostCurve {
        CostCurve {
            kmax: costs.len(),
            cost: costs.iter().map(|&c| Some(c)).collect(),
            argmin: costs.iter().map(|_| Some(Partition::whole(n))).collect(),
        }
    }
}

/// Smallest segment length `⌈Γ log² n⌉` of the theoretical grid condition.
pub fn theoretical_min_len(n: usize, gamma: f64) -> usize {
    let l = (n as f64).ln();
    ((gamma * l * l).ceil() as usize).max(1)
}

fn check_min_len(prefix: &PrefixStats, min_len: usize) -> Result<()> {
    if min_len == 0 {
        return Err(Error::Argument("min_len must be at least 1".into()));
    }
    if matches!(
        prefix.spec(),
        crate::family::FamilySpec::GaussianPositiveMean
    ) && min_len < 2
    {
        return Err(Error::Argument(
            "gaussian segments need min_len >= 2".into(),
        ));
    }
    Ok(())
}

/// Exact optimal segmentations for `K = 1..=kmax` over all change-point positions.
pub fn segment_neighborhood(
    prefix: &PrefixStats,
    kmax: usize,
    min_len: usize,
    prune: bool,
) -> Result<CostCurve> {
    check_min_len(prefix, min_len)?;
    let n = prefix.n();
    if kmax == 0 {
        return Err(Error::Argument("kmax must be at least 1".into()));
    }
    if kmax.saturating_mul(min_len) > n {
        return Err(Error::Infeasible(format!(
            "kmax = {kmax} segments of length >= {min_len} do not fit in n = {n}"
        )));
    }
    let grid: Vec<usize> = (0..=n).collect();
    run(prefix, &grid, kmax, min_len, prune)
}

/// Same recursion with change-points restricted to `candidates ∪ {n}`.
pub fn dp_on_grid(
    prefix: &PrefixStats,
    candidates: &[usize],
    kmax: usize,
    min_len: usize,
) -> Result<CostCurve> {
    check_min_len(prefix, min_len)?;
    let n = prefix.n();
    if kmax == 0 {
        return Err(Error::Argument("kmax must be at least 1".into()));
    }
    if candidates.is_empty() && kmax > 1 {
        return Err(Error::Argument("empty candidate set with kmax > 1".into()));
    }
    if candidates.windows(2).any(|w| w[0] >= w[1]) || candidates.iter().any(|&c| c == 0 || c >= n) {
        return Err(Error::Argument(
            "candidates must be strictly increasing within 1..n-1".into(),
        ));
    }
    let mut grid = Vec::with_capacity(candidates.len() + 2);
    grid.push(0);
    grid.extend_from_slice(candidates);
    grid.push(n);
    run(prefix, &grid, kmax, min_len, true)
}

fn run(
    prefix: &PrefixStats,
    grid: &[usize],
    kmax: usize,
    min_len: usize,
    prune: bool,
) -> Result<CostCurve> {
    let m = grid.len();
    let last = m - 1;
    let mut prev = vec![f64::INFINITY; m];
    for j in 1..m {
        if grid[j] >= min_len {
            prev[j] = prefix.cost(0, grid[j])?;
        }
    }
    let mut values = vec![f64::INFINITY; m];
    let mut backs: Vec<Vec<u32>> = Vec::with_capacity(kmax.saturating_sub(1));
    let mut cost = vec![None; kmax];
    let mut argmin = vec![None; kmax];
    if prev[last].is_finite() {
        cost[0] = Some(prev[last]);
        argmin[0] = Some(Partition::whole(grid[last]));
    }

    // (grid index, position from which the candidate is retired)
    let mut cands: Vec<(usize, usize)> = Vec::new();
    for k in 2..=kmax {
        let mut back = vec![NO_PRED; m];
        values.fill(f64::INFINITY);
        cands.clear();
        let mut next = 1usize;
        let first_target = if k == kmax { last } else { 1 };
        for j in first_target..m {
            let target = grid[j];
            if target < k * min_len {
                continue;
            }
            while next < j && target - grid[next] >= min_len {
                if prev[next].is_finite() {
                    cands.push((next, usize::MAX));
                }
                next += 1;
            }
            cands.retain(|&(_, retire)| retire > target);
            let reference = prev[j];
            let mut best = f64::INFINITY;
            let mut best_i = NO_PRED;
            for cand in cands.iter_mut() {
                let i = cand.0;
                let v = prev[i] + prefix.cost(grid[i], target)?;
                if v < best {
                    best = v;
                    best_i = i as u32;
                }
                if prune && v > reference + PRUNE_MARGIN * (1.0 + v.abs().max(reference.abs())) {
                    cand.1 = cand.1.min(target + min_len);
                }
            }
            values[j] = best;
            back[j] = best_i;
        }
        backs.push(back);
        std::mem::swap(&mut prev, &mut values);
        if prev[last].is_finite() {
            cost[k - 1] = Some(prev[last]);
            argmin[k - 1] = Some(backtrack(grid, &backs, k, last));
        }
    }
    Ok(CostCurve { kmax, cost, argmin })
}

fn backtrack(grid: &[usize], backs: &[Vec<u32>], k: usize, last: usize) -> Partition {
    let mut ends = Vec::with_capacity(k);
    let mut j = last;
    for layer in (2..=k).rev() {
        ends.push(grid[j]);
        j = backs[layer - 2][j] as usize;
    }
    ends.push(grid[j]);
    ends.reverse();
    Partition::new(grid[last], ends).expect("backtracked partition is valid")
}

/// Maximum length accepted by [`brute_force_best`].
pub const BRUTE_FORCE_MAX_N: usize = 16;

/// Exhaustive minimum over all partitions with exactly `k` segments.
///
/// Ties are resolved like the dynamic program: the smallest last
/// change-point wins, then the smallest second-to-last, and so on.
pub fn brute_force_best(
    prefix: &PrefixStats,
    k: usize,
    min_len: usize,
) -> Result<(f64, Partition)> {
    let n = prefix.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::Argument(format!(
            "brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}"
        )));
    }
    if k == 0 || min_len == 0 || k * min_len > n {
        return Err(Error::Infeasible(format!(
            "no partition of {n} points into {k} segments of length >= {min_len}"
        )));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut ends = Vec::with_capacity(k);
    enumerate(prefix, n, k, min_len, 0, 0.0, &mut ends, &mut best)?;
    let (c, ends) = best.expect("at least one feasible partition");
    Ok((c, Partition::new(n, ends)?))
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    prefix: &PrefixStats,
    n: usize,
    k: usize,
    min_len: usize,
    start: usize,
    acc: f64,
    ends: &mut Vec<usize>,
    best: &mut Option<(f64, Vec<usize>)>,
) -> Result<()> {
    let remaining = k - ends.len();
    if remaining == 1 {
        if n - start < min_len {
            return Ok(());
        }
        let total = acc + prefix.cost(start, n)?;
        ends.push(n);
        let better = match best {
            None => true,
            Some((c, b)) => total < *c || (total == *c && ends.iter().rev().lt(b.iter().rev())),
        };
        if better {
            *best = Some((total, ends.clone()));
        }
        ends.pop();
        return Ok(());
    }
    let hi = n - (remaining - 1) * min_len;
    for end in start + min_len..=hi {
        let c = if ends.is_empty() {
            prefix.cost(start, end)?
        } else {
            acc + prefix.cost(start, end)?
        };
        ends.push(end);
        enumerate(prefix, n, k, min_len, end, c, ends, best)?;
        ends.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::FamilySpec;

    fn poisson(data: &[f64]) -> PrefixStats {
        PrefixStats::build(FamilySpec::Poisson, data).unwrap()
    }

    #[test]
    fn constant_poisson_single_segment() {
        let p = poisson(&[5.0; 4]);
        let curve = segment_neighborhood(&p, 1, 1, true).unwrap();
        let expected = 4.0 * (5.0 - 5.0 * 5.0_f64.ln());
        assert!((curve.cost(1).unwrap() - expected).abs() < 1e-12);
        assert_eq!(curve.argmin(1).unwrap().ends(), &[4]);
    }

    #[test]
    fn two_segment_step() {
        let p = poisson(&[0.0, 0.0, 9.0, 9.0]);
        let curve = segment_neighborhood(&p, 2, 1, false).unwrap();
        assert_eq!(curve.argmin(2).unwrap().ends(), &[2, 4]);
        // brute force over the three splits
        let splits: Vec<f64> = (1..4)
            .map(|s| p.cost(0, s).unwrap() + p.cost(s, 4).unwrap())
            .collect();
        let min = splits.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(curve.cost(2).unwrap(), min);
        assert_eq!(splits[1], min);
    }

    #[test]
    fn every_point_its_own_segment() {
        let data = [3.0, 1.0, 4.0, 1.0, 5.0];
        let p = poisson(&data);
        let curve = segment_neighborhood(&p, 5, 1, true).unwrap();
        assert_eq!(curve.argmin(5).unwrap().ends(), &[1, 2, 3, 4, 5]);
        let direct: f64 = (0..5)
            .map(|t| p.cost(t, t + 1).unwrap())
            .fold(0.0, |a, c| a + c);
        assert!((curve.cost(5).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn infeasible_request() {
        let p = poisson(&[1.0; 5]);
        assert!(matches!(
            segment_neighborhood(&p, 3, 2, true),
            Err(Error::Infeasible(_))
        ));
        let g = PrefixStats::build(FamilySpec::GaussianPositiveMean, &[1.0, 2.0, 3.0]).unwrap();
        assert!(segment_neighborhood(&g, 1, 1, true).is_err());
    }

    #[test]
    fn grid_restricted() {
        let p = poisson(&[0.0, 0.0, 9.0, 9.0]);
        let curve = dp_on_grid(&p, &[2], 2, 1).unwrap();
        assert_eq!(curve.argmin(2).unwrap().ends(), &[2, 4]);
        let full = segment_neighborhood(&p, 2, 1, true).unwrap();
        let off = dp_on_grid(&p, &[1], 2, 1).unwrap();
        assert!(off.cost(2).unwrap() > full.cost(2).unwrap());
        let all = dp_on_grid(&p, &[1, 2, 3], 2, 1).unwrap();
        assert_eq!(all, full);
        assert!(dp_on_grid(&p, &[], 2, 1).is_err());
        assert!(dp_on_grid(&p, &[2, 2], 2, 1).is_err());
        // a K larger than the grid allows is absent, not an error
        let sparse = dp_on_grid(&p, &[2], 3, 1).unwrap();
        assert_eq!(sparse.cost(3), None);
    }

    #[test]
    fn brute_force_trivial_cases() {
        let data = [2.0, 7.0, 1.0, 8.0, 2.0];
        let p = poisson(&data);
        let (c, part) = brute_force_best(&p, 1, 1).unwrap();
        assert_eq!(c, p.cost(0, 5).unwrap());
        assert_eq!(part.ends(), &[5]);
        let (c, part) = brute_force_best(&p, 5, 1).unwrap();
        let direct: f64 = (0..5)
            .map(|t| p.cost(t, t + 1).unwrap())
            .fold(0.0, |a, c| a + c);
        assert_eq!(c, direct);
        assert_eq!(part.k(), 5);
        assert!(brute_force_best(&poisson(&[1.0; 17]), 2, 1).is_err());
    }

    #[test]
    fn ties_resolve_to_smallest_last_change() {
        // all-zero data: every partition costs exactly zero
        let p = poisson(&[0.0; 6]);
        let curve = segment_neighborhood(&p, 3, 1, true).unwrap();
        assert_eq!(curve.argmin(3).unwrap().ends(), &[1, 2, 6]);
        let (_, bf) = brute_force_best(&p, 3, 1).unwrap();
        assert_eq!(bf.ends(), &[1, 2, 6]);
    }

    #[test]
    fn theoretical_grid_length() {
        assert_eq!(theoretical_min_len(1000, 1.0), 48);
        assert_eq!(theoretical_min_len(1, 1.0), 1);
    }
}
