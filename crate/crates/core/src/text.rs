//! Line-oriented text format for rotation lists.
//!
//! Each non-comment line holds one rotation: three whitespace-separated
//! numbers for an axis-angle vector, or nine for a row-major matrix.
//! Lines starting with `#` are comments. Numbers are written with 17
//! significant digits so they round-trip exactly.

use std::fmt::Write as _;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::rotation::{exp_map, AxisAngle, RotationMatrix};

/// Rotations and comment lines read from a rotation list.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RotationList {
    pub rotations: Vec<RotationMatrix>,
    /// Comment lines with the leading `#` and surrounding whitespace removed.
    pub comments: Vec<String>,
}

/// Formats one number with 17 significant digits.
pub fn format_number(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn format_axis_angle(r: &AxisAngle) -> String {
    let v = r.vector();
    format!(
        "{} {} {}",
        format_number(v.x),
        format_number(v.y),
        format_number(v.z)
    )
}

pub fn format_matrix(rot: &RotationMatrix) -> String {
    let mut out = String::new();
    for (i, value) in rot.to_rows().iter().flatten().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{}", format_number(*value));
    }
    out
}

/// Parses a rotation list; errors carry 1-based line numbers.
pub fn parse_rotations(text: &str) -> Result<RotationList> {
    let mut list = RotationList::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            list.comments.push(comment.trim().to_string());
            continue;
        }
        list.rotations.push(parse_line(trimmed, line)?);
    }
    Ok(list)
}

fn parse_line(line_text: &str, line: usize) -> Result<RotationMatrix> {
    let values = line_text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    line,
                    message: format!("invalid number {tok:?}"),
                })
        })
        .collect::<Result<Vec<f64>>>()?;
    let wrap = |e: Error| Error::Parse {
        line,
        message: e.to_string(),
    };
    match values.len() {
        3 => {
            let r = AxisAngle::new(Vector3::new(values[0], values[1], values[2])).map_err(wrap)?;
            Ok(exp_map(&r))
        }
        9 => RotationMatrix::new(Matrix3::from_row_slice(&values)).map_err(wrap),
        n => Err(Error::Parse {
            line,
            message: format!("expected 3 or 9 numbers, found {n}"),
        }),
    }
}
