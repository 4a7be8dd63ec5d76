use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LETTERS: [char; 4] = ['A', 'C', 'G', 'T'];

/// What to do with symbols other than A, C, G, T.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmbiguityPolicy {
    #[default]
    Reject,
    Drop,
}

/// Nucleotides coded A→1, C→2, G→3, T→4, records concatenated in order.
#[derive(Debug, Clone, PartialEq)]
pub struct FastaSeries {
    pub values: Vec<f64>,
    pub records: usize,
    /// Ambiguity symbols removed under [`AmbiguityPolicy::Drop`].
    pub dropped: usize,
}

pub fn read_fasta_categorical(
    path: impl AsRef<Path>,
    policy: AmbiguityPolicy,
) -> Result<FastaSeries> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| super::io_error(path, e))?;
    parse_fasta(&text, &path.display().to_string(), policy)
}

pub fn parse_fasta(text: &str, origin: &str, policy: AmbiguityPolicy) -> Result<FastaSeries> {
    let mut values = Vec::new();
    let mut records = 0;
    let mut dropped = 0;
    // 1-based position in the concatenated sequence, ambiguity symbols included
    let mut position = 0usize;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('>') {
            records += 1;
            continue;
        }
        if line.starts_with(';') {
            continue;
        }
        if !line.is_empty() && records == 0 {
            return Err(Error::Parse {
                path: origin.to_string(),
                line: i + 1,
                message: "sequence data before the first '>' header".into(),
            });
        }
        for c in line.chars().filter(|c| !c.is_whitespace()) {
            position += 1;
            match c.to_ascii_uppercase() {
                'A' => values.push(1.0),
                'C' => values.push(2.0),
                'G' => values.push(3.0),
                'T' => values.push(4.0),
                other => match policy {
                    AmbiguityPolicy::Drop
                        if other.is_ascii_alphabetic() || other == '-' || other == '*' =>
                    {
                        dropped += 1
                    }
                    _ => {
                        return Err(Error::Parse {
                            path: origin.to_string(),
                            line: i + 1,
                            message: format!("symbol {c:?} at sequence position {position}"),
                        })
                    }
                },
            }
        }
    }
    if values.is_empty() {
        return Err(Error::Parse {
            path: origin.to_string(),
            line: 0,
            message: "no nucleotides".into(),
        });
    }
    Ok(FastaSeries {
        values,
        records,
        dropped,
    })
}

/// Inverse coding, 1..=4 back to uppercase letters.
pub fn categories_to_letters(values: &[f64]) -> Result<String> {
    values
        .iter()
        .map(|&v| {
            let i = v as usize;
            if v.fract() == 0.0 && (1..=4).contains(&i) {
                Ok(LETTERS[i - 1])
            } else {
                Err(Error::Argument(format!("{v} is not a nucleotide category")))
            }
        })
        .collect()
}
