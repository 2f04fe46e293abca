//! JSON state files: `{"dims": [2, 2], "amps": [[re, im], ...]}` with the
//! amplitudes flattened row-major, subsystem 1 most significant.

use std::path::Path;

use serde::Deserialize;

use crate::tensor::{StateVector, C64};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    dims: Vec<usize>,
    amps: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{origin}:{line}:{column}: {message}")]
pub struct ParseError {
    pub origin: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// 1-based line and column of byte `offset`.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

pub fn parse_state(text: &str, origin: &str) -> Result<StateVector, ParseError> {
    let err_at = |offset: Option<usize>, message: String| {
        let (line, column) = offset.map_or((1, 1), |o| position(text, o));
        ParseError {
            origin: origin.to_string(),
            line,
            column,
            message,
        }
    };
    let file: StateFile = serde_json::from_str(text).map_err(|e| ParseError {
        origin: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string().split(" at line ").next().unwrap_or("").to_string(),
    })?;
    let amps_at = text.find("\"amps\"");
    let dims_at = text.find("\"dims\"");
    if file.dims.is_empty() || file.dims.contains(&0) {
        return Err(err_at(dims_at, "dims must be a nonempty list of positive integers".into()));
    }
    let expected = file
        .dims
        .iter()
        .try_fold(1usize, |a, &d| a.checked_mul(d))
        .ok_or_else(|| err_at(dims_at, "total dimension overflows".into()))?;
    if file.amps.len() != expected {
        return Err(err_at(
            amps_at,
            format!(
                "amps has {} entries but dims {:?} need {expected}",
                file.amps.len(),
                file.dims
            ),
        ));
    }
    if file.amps.iter().flatten().any(|x| !x.is_finite()) {
        return Err(err_at(amps_at, "amplitudes must be finite".into()));
    }
    let amps = file.amps.iter().map(|&[re, im]| C64::new(re, im)).collect();
    StateVector::new(file.dims, amps).map_err(|e| err_at(amps_at, e.to_string()))
}

pub fn read_state(path: &Path) -> Result<StateVector, ParseError> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| ParseError {
        origin: origin.clone(),
        line: 0,
        column: 0,
        message: e.to_string(),
    })?;
    parse_state(&text, &origin)
}
