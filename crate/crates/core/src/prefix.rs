use crate::error::{Error, Result};
use crate::family::{FamilySpec, StatVec};

/// Cumulative sums of the sufficient statistic: `cum[t] = Σ_{u≤t} T(y_u)`.
#[derive(Debug, Clone)]
pub struct PrefixStats {
    spec: FamilySpec,
    n: usize,
    dim: usize,
    /// Row-major `(n + 1) × dim`.
    cum: Vec<f64>,
}

impl PrefixStats {
    /// Single pass over `data` with Neumaier-compensated running sums.
    pub fn build(spec: FamilySpec, data: &[f64]) -> Result<Self> {
        spec.validate()?;
        if data.is_empty() {
            return Err(Error::Argument("cannot segment an empty sequence".into()));
        }
        let dim = spec.dim();
        let n = data.len();
        let mut cum = vec![0.0; (n + 1) * dim];
        let mut sum = vec![0.0; dim];
        let mut comp = vec![0.0; dim];
        let mut stat = vec![0.0; dim];
        for (i, &y) in data.iter().enumerate() {
            spec.write_stat(y, &mut stat).map_err(|e| match e {
                Error::Support { family, value, .. } => Error::Support {
                    family,
                    value,
                    index: Some(i),
                },
                other => other,
            })?;
            for j in 0..dim {
                let s = sum[j];
                let x = stat[j];
                let t = s + x;
                comp[j] += if s.abs() >= x.abs() {
                    (s - t) + x
                } else {
                    (x - t) + s
                };
                sum[j] = t;
                cum[(i + 1) * dim + j] = t + comp[j];
            }
        }
        Ok(PrefixStats { spec, n, dim, cum })
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row `t` of the cumulative table.
    pub fn cum(&self, t: usize) -> &[f64] {
        &self.cum[t * self.dim..(t + 1) * self.dim]
    }

    /// `Σ_{t ∈ (start, end]} T(y_t)`.
    pub fn segment_sum(&self, start: usize, end: usize) -> StatVec {
        let a = self.cum(start);
        let b = self.cum(end);
        b.iter().zip(a).map(|(hi, lo)| hi - lo).collect()
    }

    /// Minimal contrast of the segment `(start, end]`.
    #[inline]
    pub fn cost(&self, start: usize, end: usize) -> Result<f64> {
        debug_assert!(start < end && end <= self.n);
        if self.dim == 1 {
            let s = self.cum[end] - self.cum[start];
            self.spec.segment_cost(&[s], end - start)
        } else {
            self.spec
                .segment_cost(&self.segment_sum(start, end), end - start)
        }
    }

    /// Mean statistic of the segment `(start, end]`.
    pub fn segment_mean(&self, start: usize, end: usize) -> Vec<f64> {
        let len = (end - start) as f64;
        self.segment_sum(start, end)
            .iter()
            .map(|s| s / len)
            .collect()
    }
}
