use std::path::Path;

use crate::error::{Error, Result};

/// Reads one observation per line. A non-numeric first line is taken as a
/// header; blank lines are ignored.
pub fn read_series_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| super::io_error(path, e))?;
    parse_series(&text, &path.display().to_string())
}

/// Parses series text; `origin` names the source in errors.
pub fn parse_series(text: &str, origin: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    let mut seen_content = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => {
                return Err(Error::Parse {
                    path: origin.to_string(),
                    line: i + 1,
                    message: format!("non-finite value {v}"),
                })
            }
            Err(_) if !seen_content => {}
            Err(_) => {
                return Err(Error::Parse {
                    path: origin.to_string(),
                    line: i + 1,
                    message: format!("cannot parse {line:?} as a number"),
                })
            }
        }
        seen_content = true;
    }
    if values.is_empty() {
        return Err(Error::Parse {
            path: origin.to_string(),
            line: 0,
            message: "no observations".into(),
        });
    }
    Ok(values)
}
