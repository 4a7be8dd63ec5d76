use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::family::FamilySpec;

/// Real number serialized with 12 significant digits; non-finite values
/// are written as `null`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Real(pub f64);

impl Real {
    pub fn rounded(self) -> f64 {
        if self.0.is_finite() {
            format!("{:.11e}", self.0)
                .parse()
                .expect("formatted float parses")
        } else {
            self.0
        }
    }
}

impl From<f64> for Real {
    fn from(v: f64) -> Self {
        Real(v)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rounded())
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.rounded())
        } else {
            s.serialize_none()
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Real(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN)))
    }
}

fn reals(v: &[f64]) -> Vec<Real> {
    v.iter().copied().map(Real).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDescriptor {
    /// `csv`, `fasta` or `simulate`.
    pub kind: String,
    pub source: String,
    pub n: usize,
    pub family: FamilySpec,
    /// Ambiguity symbols dropped while reading FASTA input.
    pub dropped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub k: usize,
    pub cost: Real,
    pub penalty: Real,
    pub penalized: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub k_hat: usize,
    pub beta_hat: Real,
    /// `fixed`, `dimension_jump` or `slope_fit`.
    pub method: String,
    /// Minimal multiplier found by calibration, when calibrated.
    pub beta_min: Option<Real>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentEstimate {
    /// Segment `(start, end]` in 1-based positions.
    pub start: usize,
    pub end: usize,
    /// Mean of the sufficient statistic.
    pub mean: Vec<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub natural: Option<Vec<Real>>,
    /// The mean lies on the boundary of the mean space, so no natural parameter exists.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub boundary: bool,
}

impl SegmentEstimate {
    pub fn new(start: usize, end: usize, mean: &[f64], natural: Option<&[f64]>) -> Self {
        SegmentEstimate {
            start,
            end,
            mean: reals(mean),
            natural: natural.map(reals),
            boundary: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Homogeneity chi-square of the selected segment sums against the overall mean.
    pub chi_square: Option<Real>,
    /// Candidate change-points when the hybrid search was used.
    pub candidates: Option<Vec<usize>>,
}

/// Output of a `segment` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub input: InputDescriptor,
    pub kmax: usize,
    pub min_len: usize,
    pub hybrid: bool,
    pub cost_curve: Vec<CurveRow>,
    pub selection: Selection,
    pub change_points: Vec<usize>,
    pub segments: Vec<SegmentEstimate>,
    pub diagnostics: Diagnostics,
}

impl ResultDocument {
    /// Canonical text: fixed key order, rounded reals, trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            path: "<json>".into(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    fn check(&self) -> Result<()> {
        if self.change_points.len() + 1 != self.selection.k_hat
            || self.segments.len() != self.selection.k_hat
        {
            return Err(Error::Argument(format!(
                "document has {} change-points and {} segments for k_hat = {}",
                self.change_points.len(),
                self.segments.len(),
                self.selection.k_hat
            )));
        }
        Ok(())
    }
}

pub fn write_result_json(doc: &ResultDocument, path: impl AsRef<Path>) -> Result<()> {
    doc.check()?;
    let path = path.as_ref();
    std::fs::write(path, doc.to_json()).map_err(|e| super::io_error(path, e))
}

pub fn read_result_json(path: impl AsRef<Path>) -> Result<ResultDocument> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| super::io_error(path, e))?;
    ResultDocument::from_json(&text).map_err(|e| match e {
        Error::Parse { line, message, .. } => Error::Parse {
            path: path.display().to_string(),
            line,
            message,
        },
        other => other,
    })
}
