//! Scalar values with optional multiples of π: `0.5`, `pi`, `-pi/2`, `3*pi/4`, `2pi`.

use crate::error::{CliError, Result};
use std::f64::consts::PI;

pub fn parse_value(text: &str) -> Result<f64> {
    let s = text.trim();
    let err = |why: &str| CliError::Config(format!("bad value `{text}`: {why}"));
    if s.is_empty() {
        return Err(err("empty"));
    }
    let (sign, body) = match s.as_bytes()[0] {
        b'-' => (-1.0, &s[1..]),
        b'+' => (1.0, &s[1..]),
        _ => (1.0, s),
    };
    let mut value = sign;
    let mut divide = false;
    let mut rest = body;
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let factor =
            parse_factor(rest[..end].trim()).ok_or_else(|| err("expected a number or pi"))?;
        if divide {
            value /= factor;
        } else {
            value *= factor;
        }
        if end == rest.len() {
            break;
        }
        divide = rest.as_bytes()[end] == b'/';
        rest = &rest[end + 1..];
    }
    if value.is_finite() {
        Ok(value)
    } else {
        Err(err("not finite"))
    }
}

fn parse_factor(s: &str) -> Option<f64> {
    let (number, pi) = match s.strip_suffix("pi").or_else(|| s.strip_suffix('π')) {
        Some(head) => (head.trim_end(), true),
        None => (s, false),
    };
    let scale = if number.is_empty() {
        if !pi {
            return None;
        }
        1.0
    } else {
        // Rejects `inf`, `nan` and friends that f64::from_str would take.
        let numeric = number
            .bytes()
            .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'e' | b'E' | b'+' | b'-'));
        let lead = number.as_bytes()[0];
        if !numeric || !(lead.is_ascii_digit() || lead == b'.') {
            return None;
        }
        number.parse::<f64>().ok()?
    };
    Some(if pi { scale * PI } else { scale })
}
