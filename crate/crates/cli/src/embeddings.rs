//! word2vec text format.
//!
//! ```text
//! <count> <dim>
//! <token> <v1> ... <vdim>
//! ```
//!
//! Fields are separated by single spaces; tokens are UTF-8 without
//! embedded whitespace. Every load error names the offending line.

use std::fmt::Write as _;
use std::path::Path;

use embias_core::{EmbeddingSpace, Error};

use crate::error::{CliError, CliResult};

pub fn load_embeddings(path: &Path) -> CliResult<EmbeddingSpace> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_embeddings(&text).map_err(|(line, message)| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    })
}

/// Parses the format from memory. Errors carry a 1-based line number.
pub fn parse_embeddings(text: &str) -> Result<EmbeddingSpace, (usize, String)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or((1, "missing header line".to_string()))?;
    let fields: Vec<&str> = header.split(' ').collect();
    let parse_header = |s: &str| s.parse::<usize>().ok();
    let (count, dim) = match fields.as_slice() {
        [c, d] => match (parse_header(c), parse_header(d)) {
            (Some(c), Some(d)) if d > 0 => (c, d),
            _ => {
                return Err((
                    1,
                    format!("malformed header {header:?}: expected \"<count> <dim>\""),
                ))
            }
        },
        _ => {
            return Err((
                1,
                format!("malformed header {header:?}: expected \"<count> <dim>\""),
            ))
        }
    };
    let mut space = EmbeddingSpace::new(dim).map_err(|e| (1, e.to_string()))?;
    let mut last = 1;
    for (lineno, line) in lines {
        last = lineno;
        if line.is_empty() {
            // a trailing newline is fine; blank lines elsewhere are not
            continue;
        }
        let mut parts = line.split(' ');
        let token = parts.next().unwrap_or_default();
        if token.is_empty() {
            return Err((lineno, "empty token".into()));
        }
        let vector = parts
            .map(|p| {
                p.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| (lineno, format!("invalid component {p:?}")))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if vector.len() != dim {
            return Err((
                lineno,
                format!(
                    "token {token:?} has {} components, expected {dim}",
                    vector.len()
                ),
            ));
        }
        space.insert(token, vector).map_err(|e| {
            let msg = match e {
                Error::DuplicateToken(t) => format!("duplicate token {t:?}"),
                Error::DegenerateVector => format!("token {token:?} has a zero vector"),
                other => other.to_string(),
            };
            (lineno, msg)
        })?;
    }
    if space.len() != count {
        return Err((
            last,
            format!(
                "header declares {count} entries but the file has {}",
                space.len()
            ),
        ));
    }
    Ok(space)
}

/// Serializes in insertion order. Components use Rust's shortest
/// round-trip representation, so reloading reproduces every bit.
pub fn format_embeddings(space: &EmbeddingSpace) -> String {
    let mut out = format!("{} {}\n", space.len(), space.dim());
    for (token, v) in space.iter() {
        out.push_str(token);
        for x in v {
            let _ = write!(out, " {x:?}");
        }
        out.push('\n');
    }
    out
}

pub fn write_embeddings(space: &EmbeddingSpace, path: &Path) -> CliResult<()> {
    std::fs::write(path, format_embeddings(space)).map_err(|e| CliError::io(path, e))
}
