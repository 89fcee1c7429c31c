//! Flat `key = value` config files and the merged view of file plus flags.

use std::collections::BTreeMap;

use crate::error::{CliError, Result};
use crate::value::parse_value;

/// Every key a config file or flag may bind.
pub const KNOWN_KEYS: &[&str] = &[
    "omega-sigma",
    "omega-pi",
    "phi",
    "delta",
    "engine",
    "preset",
    "out",
    "format",
    "samples",
    "seed",
    "omega",
    "ratio",
    "ky",
    "axis",
    "points",
    "ky-min",
    "ky-max",
    "plot",
    "normalize",
    "separation",
    "screen-distance",
    "wave-number",
    "screen-min",
    "screen-max",
];

/// Keys that may be bound more than once.
const REPEATABLE: &[&str] = &["axis"];

pub fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}

/// Named values, each possibly repeated, in a stable order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bindings {
    values: BTreeMap<String, Vec<String>>,
}

impl Bindings {
    /// Adds one binding; `key` must already be normalized.
    pub fn push(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::Config(format!("unknown key `{key}`")));
        }
        let slot = self.values.entry(key.to_string()).or_default();
        if !slot.is_empty() && !REPEATABLE.contains(&key) {
            return Err(CliError::Config(format!("`{key}` given more than once")));
        }
        slot.push(value.into());
        Ok(())
    }

    /// Keys bound in `over` replace those here wholesale.
    pub fn overridden_by(mut self, over: Bindings) -> Bindings {
        for (k, v) in over.values {
            self.values.insert(k, v);
        }
        self
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values
            .get(key)
            .and_then(|v| v.last())
            .map(String::as_str)
    }

    pub fn all(&self, key: &str) -> &[String] {
        self.values.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn number(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key)
            .map(|v| parse_value(v).map_err(|e| CliError::Config(format!("{key}: {e}"))))
            .transpose()
    }

    pub fn required_number(&self, key: &str) -> Result<f64> {
        self.number(key)?
            .ok_or_else(|| CliError::Config(format!("missing required `{key}`")))
    }

    pub fn count(&self, key: &str) -> Result<Option<u64>> {
        self.raw(key)
            .map(|v| {
                v.trim()
                    .parse::<u64>()
                    .map_err(|_| CliError::Config(format!("{key}: `{v}` is not a whole number")))
            })
            .transpose()
    }

    pub fn switch(&self, key: &str) -> Result<bool> {
        match self.raw(key).map(str::trim) {
            None => Ok(false),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(other) => Err(CliError::Config(format!(
                "{key}: `{other}` is not a boolean"
            ))),
        }
    }

    /// Fails on the first bound key outside `allowed`.
    pub fn restrict(&self, command: &str, allowed: &[&str]) -> Result<()> {
        match self.keys().find(|k| !allowed.contains(k)) {
            Some(k) => Err(CliError::Config(format!(
                "`{k}` does not apply to `{command}`"
            ))),
            None => Ok(()),
        }
    }
}

/// Parses a config file body. Blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<Bindings> {
    let mut bindings = Bindings::default();
    for (n, line) in text.lines().enumerate() {
        let line_err = |message: String| CliError::ConfigLine {
            line: n + 1,
            message,
        };
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| line_err("expected `key = value`".into()))?;
        let key = normalize_key(key);
        let value = value.trim();
        if key.is_empty() {
            return Err(line_err("missing key".into()));
        }
        if value.is_empty() {
            return Err(line_err(format!("`{key}` has no value")));
        }
        bindings
            .push(&key, value)
            .map_err(|e| line_err(e.to_string()))?;
    }
    Ok(bindings)
}
