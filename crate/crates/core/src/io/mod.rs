//! Input readers and result serialization.

mod document;
mod fasta;
mod series;

pub use document::{
    read_result_json, write_result_json, CurveRow, Diagnostics as DocumentDiagnostics,
    InputDescriptor, Real, ResultDocument, SegmentEstimate, Selection,
};
pub use fasta::{
    categories_to_letters, parse_fasta, read_fasta_categorical, AmbiguityPolicy, FastaSeries,
};
pub use series::{parse_series, read_series_csv};

use std::path::Path;

use crate::error::Error;

pub(crate) fn io_error(path: &Path, err: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: err.to_string(),
    }
}
