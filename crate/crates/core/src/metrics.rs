//! Comparison of estimated and true segmentations.
//!
//! Divergences compare interior change-points only; the shared endpoint `n`
//! is excluded. A supremum over an empty break set is 0. When `m_B` has
//! breaks but `m_A` has none, the infimum is over an empty set and the
//! divergence is reported as `n`, an upper bound on any finite value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{FamilySpec, NaturalParam};
use crate::partition::Partition;
use crate::prefix::PrefixStats;

/// Piecewise-constant distribution along the sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseProfile {
    pub partition: Partition,
    pub theta_per_segment: Vec<NaturalParam>,
    pub spec: FamilySpec,
}

impl PiecewiseProfile {
    pub fn new(
        spec: FamilySpec,
        partition: Partition,
        theta_per_segment: Vec<NaturalParam>,
    ) -> Result<Self> {
        if theta_per_segment.len() != partition.k() {
            return Err(Error::Argument(format!(
                "{} parameters for {} segments",
                theta_per_segment.len(),
                partition.k()
            )));
        }
        for t in &theta_per_segment {
            spec.check_domain(&t.0)?;
        }
        Ok(PiecewiseProfile {
            partition,
            theta_per_segment,
            spec,
        })
    }

    /// Plug-in profile: the segment MLE on every segment of `partition`.
    pub fn fit(prefix: &PrefixStats, partition: &Partition) -> Result<Self> {
        let spec = *prefix.spec();
        let thetas = partition
            .segments()
            .map(|(a, b)| spec.inv_grad_log_partition(&prefix.segment_mean(a, b)))
            .collect::<Result<Vec<_>>>()?;
        PiecewiseProfile::new(spec, partition.clone(), thetas)
    }

    /// Constant profile over `n` points.
    pub fn constant(spec: FamilySpec, n: usize, theta: NaturalParam) -> Result<Self> {
        PiecewiseProfile::new(spec, Partition::whole(n), vec![theta])
    }
}

fn check_same_n(a: &Partition, b: &Partition) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::Argument(format!(
            "partitions cover different lengths ({} vs {})",
            a.n(),
            b.n()
        )));
    }
    Ok(())
}

/// `E(m_A‖m_B) = sup_{b ∈ m_B} inf_{a ∈ m_A} |a − b|`.
pub fn partition_divergence(m_a: &Partition, m_b: &Partition) -> Result<usize> {
    check_same_n(m_a, m_b)?;
    let a = m_a.breaks();
    let b = m_b.breaks();
    if b.is_empty() {
        return Ok(0);
    }
    if a.is_empty() {
        return Ok(m_a.n());
    }
    Ok(b.iter()
        .map(|&x| {
            let i = a.partition_point(|&v| v < x);
            let right = a.get(i).map(|&v| v - x);
            let left = i.checked_sub(1).map(|j| x - a[j]);
            right.into_iter().chain(left).min().expect("non-empty")
        })
        .max()
        .unwrap_or(0))
}

/// Hausdorff distance between the break sets.
pub fn hausdorff(m_a: &Partition, m_b: &Partition) -> Result<usize> {
    Ok(partition_divergence(m_a, m_b)?.max(partition_divergence(m_b, m_a)?))
}

/// Sums `f(θ_true, θ_est)·len` over the common refinement of the two profiles.
fn profile_sum(
    truth: &PiecewiseProfile,
    est: &PiecewiseProfile,
    f: impl Fn(&FamilySpec, &[f64], &[f64]) -> Result<f64>,
) -> Result<f64> {
    if truth.spec != est.spec {
        return Err(Error::Argument(format!(
            "family mismatch: {} vs {}",
            truth.spec.name(),
            est.spec.name()
        )));
    }
    check_same_n(&truth.partition, &est.partition)?;
    let te = truth.partition.ends();
    let ee = est.partition.ends();
    let (mut i, mut j, mut pos) = (0usize, 0usize, 0usize);
    let mut total = 0.0;
    while i < te.len() && j < ee.len() {
        let end = te[i].min(ee[j]);
        let v = f(
            &truth.spec,
            &truth.theta_per_segment[i].0,
            &est.theta_per_segment[j].0,
        )?;
        total += v * (end - pos) as f64;
        pos = end;
        if te[i] == end {
            i += 1;
        }
        if ee[j] == end {
            j += 1;
        }
    }
    Ok(total)
}

/// `Σ_t K(s_t, ŝ_t)`.
pub fn kl_profile_distance(truth: &PiecewiseProfile, est: &PiecewiseProfile) -> Result<f64> {
    profile_sum(truth, est, |spec, a, b| spec.kullback(a, b))
}

/// `Σ_t h²(s_t, ŝ_t)`.
pub fn hellinger_profile_distance(truth: &PiecewiseProfile, est: &PiecewiseProfile) -> Result<f64> {
    profile_sum(truth, est, |spec, a, b| spec.hellinger_sq(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, breaks: &[usize]) -> Partition {
        Partition::from_breaks(n, breaks).unwrap()
    }

    #[test]
    fn divergence_examples() {
        let a = p(30, &[10, 20]);
        let b = p(30, &[12]);
        assert_eq!(partition_divergence(&a, &a).unwrap(), 0);
        assert_eq!(partition_divergence(&a, &b).unwrap(), 2);
        assert_eq!(partition_divergence(&b, &a).unwrap(), 8);
        assert_eq!(partition_divergence(&a, &p(30, &[])).unwrap(), 0);
        assert_eq!(partition_divergence(&p(30, &[]), &a).unwrap(), 30);
        assert_eq!(hausdorff(&a, &b).unwrap(), 8);
        assert_eq!(hausdorff(&a, &a).unwrap(), 0);
        assert!(partition_divergence(&a, &p(31, &[12])).is_err());
    }

    #[test]
    fn subset_direction_is_zero() {
        let a = p(40, &[5, 17, 30]);
        let b = p(40, &[17]);
        assert_eq!(partition_divergence(&a, &b).unwrap(), 0);
        assert_eq!(
            hausdorff(&a, &b).unwrap(),
            partition_divergence(&b, &a).unwrap()
        );
    }

    fn expo(n: usize, breaks: &[usize], rates: &[f64]) -> PiecewiseProfile {
        PiecewiseProfile::new(
            FamilySpec::Exponential,
            p(n, breaks),
            rates.iter().map(|&r| NaturalParam::scalar(-r)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn kullback_profile() {
        let t = expo(1, &[], &[1.0]);
        let e = expo(1, &[], &[2.0]);
        assert_eq!(kl_profile_distance(&t, &t).unwrap(), 0.0);
        let single = kl_profile_distance(&t, &e).unwrap();
        assert!((single - (2.0 - 2.0_f64.ln() - 1.0)).abs() < 1e-12);
        let t3 = expo(3, &[], &[1.0]);
        let e3 = expo(3, &[], &[2.0]);
        assert!((kl_profile_distance(&t3, &e3).unwrap() - 3.0 * single).abs() < 1e-12);
    }

    #[test]
    fn hellinger_profile() {
        let t = expo(1, &[], &[1.0]);
        let e = expo(1, &[], &[3.0]);
        let h = hellinger_profile_distance(&t, &e).unwrap();
        assert!((h - (1.0 - 2.0 * 3.0_f64.sqrt() / 4.0)).abs() < 1e-12);
        let t2 = expo(2, &[], &[1.0]);
        let e2 = expo(2, &[1], &[3.0, 1.0]);
        assert!((hellinger_profile_distance(&t2, &e2).unwrap() - h).abs() < 1e-12);
    }

    #[test]
    fn family_mismatch() {
        let t = expo(2, &[], &[1.0]);
        let e =
            PiecewiseProfile::constant(FamilySpec::Poisson, 2, NaturalParam::scalar(0.0)).unwrap();
        assert!(kl_profile_distance(&t, &e).is_err());
    }
}
