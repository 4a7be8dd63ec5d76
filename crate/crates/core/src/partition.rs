use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Segmentation of `{1..n}` stored as strictly increasing segment right
/// endpoints, the last of which is `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    n: usize,
    ends: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, ends: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("partition of an empty sequence".into()));
        }
        if ends.last() != Some(&n) {
            return Err(Error::Argument(format!(
                "partition ends must finish at n = {n}"
            )));
        }
        if ends[0] == 0 || ends.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument(
                "partition ends must be strictly increasing and positive".into(),
            ));
        }
        Ok(Partition { n, ends })
    }

    /// Single segment covering everything.
    pub fn whole(n: usize) -> Self {
        Partition { n, ends: vec![n] }
    }

    /// Builds a partition from interior change-points (segment ends before `n`).
    pub fn from_breaks(n: usize, breaks: &[usize]) -> Result<Self> {
        let mut ends = breaks.to_vec();
        ends.push(n);
        Partition::new(n, ends)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of segments.
    pub fn k(&self) -> usize {
        self.ends.len()
    }

    pub fn ends(&self) -> &[usize] {
        &self.ends
    }

    /// Interior change-points, i.e. every segment end except `n`.
    pub fn breaks(&self) -> &[usize] {
        &self.ends[..self.ends.len() - 1]
    }

    /// Segments as half-open `(start, end]` pairs in prefix coordinates.
    pub fn segments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        std::iter::once(0)
            .chain(self.ends.iter().copied())
            .zip(self.ends.iter().copied())
    }

    pub fn min_segment_len(&self) -> usize {
        self.segments().map(|(a, b)| b - a).min().unwrap_or(0)
    }

    /// Index of the segment containing the 1-based position `t`.
    pub fn segment_of(&self, t: usize) -> usize {
        self.ends.partition_point(|&e| e < t)
    }
}
