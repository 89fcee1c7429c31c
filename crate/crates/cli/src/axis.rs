//! Axis specs of the form `name=start:stop:count`.

use duplex_core::scan::{Axis, SweepParam};

use crate::error::{CliError, Result};
use crate::value::parse_value;

pub fn parse_axis(text: &str) -> Result<Axis> {
    let err = |why: String| CliError::Config(format!("bad axis `{text}`: {why}"));
    let (name, range) = text
        .split_once('=')
        .ok_or_else(|| err("expected name=start:stop:count".into()))?;
    let param: SweepParam = name
        .parse()
        .map_err(|e: duplex_core::Error| err(e.to_string()))?;
    let parts: Vec<&str> = range.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err(err("expected start:stop:count".into()));
    };
    let points = count.trim().parse::<usize>().map_err(|_| {
        err(format!(
            "point count `{}` is not a whole number",
            count.trim()
        ))
    })?;
    let axis = Axis::new(param, parse_value(start)?, parse_value(stop)?, points);
    axis.validate().map_err(|e| err(e.to_string()))?;
    Ok(axis)
}
