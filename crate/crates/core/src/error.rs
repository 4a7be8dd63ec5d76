use thiserror::Error;

/// Errors raised by the segmentation toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Observation outside the support of the family.
    #[error("{family}: observation {value} is outside the support{}", index_suffix(*.index))]
    Support {
        family: &'static str,
        value: f64,
        index: Option<usize>,
    },

    /// Natural parameter outside the natural domain.
    #[error("{family}: natural parameter {theta:?} is outside the domain")]
    Domain {
        family: &'static str,
        theta: Vec<f64>,
    },

    /// Mean vector on or outside the boundary of the image of the gradient map.
    #[error("{family}: mean {mu:?} is on or outside the boundary of the mean space")]
    Boundary { family: &'static str, mu: Vec<f64> },

    /// Invalid family nuisance parameter.
    #[error("invalid family parameter: {0}")]
    Family(String),

    /// Invalid argument to an operation.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Requested configuration cannot be satisfied (e.g. too many segments for the length).
    #[error("infeasible configuration: {0}")]
    Infeasible(String),

    /// Penalty calibration could not locate a usable slope.
    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("operation not implemented for {0}")]
    NotImplemented(&'static str),

    /// Input parsing failure with the 1-based line number.
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

fn index_suffix(index: Option<usize>) -> String {
    match index {
        Some(i) => format!(" (index {i})"),
        None => String::new(),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
