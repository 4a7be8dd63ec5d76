use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::prefix::PrefixStats;

/// Chi-square fluctuation of the segment statistics around their expectation:
/// `Σ_J Σ_i (T^i_J − E^i_J)² / E^i_J`, with `E_J = |J|·expected[J]`.
pub fn chi_square(
    partition: &Partition,
    prefix: &PrefixStats,
    expected: &[Vec<f64>],
) -> Result<f64> {
    if partition.n() != prefix.n() {
        return Err(Error::Argument(format!(
            "partition covers {} points but the statistics cover {}",
            partition.n(),
            prefix.n()
        )));
    }
    if expected.len() != partition.k() {
        return Err(Error::Argument(format!(
            "{} expected mean vectors for {} segments",
            expected.len(),
            partition.k()
        )));
    }
    let mut total = 0.0;
    for ((start, end), mean) in partition.segments().zip(expected) {
        if mean.len() != prefix.dim() {
            return Err(Error::Argument(
                "expected mean has the wrong dimension".into(),
            ));
        }
        let len = (end - start) as f64;
        let sums = prefix.segment_sum(start, end);
        for (t, &m) in sums.iter().zip(mean) {
            if !(m > 0.0) {
                return Err(Error::Argument(format!(
                    "expected mean {m} must be positive"
                )));
            }
            let e = len * m;
            total += (t - e) * (t - e) / e;
        }
    }
    Ok(total)
}
