//! Flag-value syntax and JSON configuration documents.
//!
//! Lists are comma separated (`1,2,3`). Integer ranges are inclusive
//! (`2..7`). Real grids are `start:stop:step`, inclusive of `stop` when it
//! falls on the grid.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on the length of any parsed list or grid.
pub const MAX_LIST_LEN: usize = 1_000_000;

fn parse_number(s: &str) -> Result<f64> {
    let t = s.trim();
    let v: f64 = t
        .parse()
        .map_err(|_| Error::Parse(format!("'{t}' is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("'{t}' is not finite")));
    }
    Ok(v)
}

fn parse_count(s: &str) -> Result<usize> {
    let t = s.trim();
    t.parse()
        .map_err(|_| Error::Parse(format!("'{t}' is not a non-negative integer")))
}

/// Parses `1,2.5,3`.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Err(Error::Parse("empty list".into()));
    }
    let items: Vec<&str> = s.split(',').collect();
    if items.len() > MAX_LIST_LEN {
        return Err(Error::Parse("list too long".into()));
    }
    items.into_iter().map(parse_number).collect()
}

/// Parses `2..7` (inclusive), `6,10,15`, or a single integer.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    let t = s.trim();
    if let Some((a, b)) = t.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (lo, hi) = (parse_count(a)?, parse_count(b)?);
        if lo > hi {
            return Err(Error::Parse(format!("empty range '{t}'")));
        }
        if hi - lo >= MAX_LIST_LEN {
            return Err(Error::Parse(format!("range '{t}' too long")));
        }
        return Ok((lo..=hi).collect());
    }
    if t.is_empty() {
        return Err(Error::Parse("empty list".into()));
    }
    let items: Vec<&str> = t.split(',').collect();
    if items.len() > MAX_LIST_LEN {
        return Err(Error::Parse("list too long".into()));
    }
    items.into_iter().map(parse_count).collect()
}

/// Parses `start:stop:step` or falls back to a comma list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let t = s.trim();
    let parts: Vec<&str> = t.split(':').collect();
    match parts.len() {
        1 => parse_f64_list(t),
        3 => {
            let (start, stop, step) = (
                parse_number(parts[0])?,
                parse_number(parts[1])?,
                parse_number(parts[2])?,
            );
            if step <= 0.0 {
                return Err(Error::Parse(format!("grid step must be positive in '{t}'")));
            }
            if stop < start {
                return Err(Error::Parse(format!("grid stop below start in '{t}'")));
            }
            let count = ((stop - start) / step * (1.0 + 1e-12) + 1e-9).floor();
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(count < MAX_LIST_LEN as f64) {
                return Err(Error::Parse(format!("grid '{t}' too long")));
            }
            // start + k step, rounded to suppress accumulated noise.
            Ok((0..=count as usize)
                .map(|k| {
                    let v = start + k as f64 * step;
                    (v * 1e12).round() / 1e12
                })
                .collect())
        }
        _ => Err(Error::Parse(format!("grid '{t}' must be start:stop:step"))),
    }
}

/// A value in a configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConfigValue {
    Bool(bool),
    Int(u64),
    Float(f64),
    Text(String),
    List(Vec<f64>),
}

impl ConfigValue {
    /// The value in command-line flag syntax.
    pub fn to_flag_text(&self) -> String {
        match self {
            ConfigValue::Bool(b) => b.to_string(),
            ConfigValue::Int(i) => i.to_string(),
            ConfigValue::Float(f) => f.to_string(),
            ConfigValue::Text(s) => s.clone(),
            ConfigValue::List(v) => v.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
        }
    }
}

/// Keys accepted in configuration documents, in flag spelling.
pub const CONFIG_KEYS: &[&str] = &[
    "model", "a", "alpha", "p", "n", "budget", "reps", "seed", "method", "data", "out", "svg",
    "level", "approx", "clip", "sizes", "alpha-grid", "n-mc", "index", "study", "pf-method",
];

/// A parsed configuration document: flag name to flag text.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigDoc {
    pub values: BTreeMap<String, String>,
}

impl ConfigDoc {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Parses a JSON object whose keys mirror the command-line flags
/// (`alpha_grid` and `alpha-grid` are equivalent).
pub fn parse_config(text: &str) -> Result<ConfigDoc> {
    let raw: BTreeMap<String, ConfigValue> =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
    let mut values = BTreeMap::new();
    for (k, v) in raw {
        let key = k.replace('_', "-");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(Error::Parse(format!("config: unknown key '{k}'")));
        }
        if let ConfigValue::Float(f) = v {
            if !f.is_finite() {
                return Err(Error::Parse(format!("config: '{k}' is not finite")));
            }
        }
        if values.insert(key, v.to_flag_text()).is_some() {
            return Err(Error::Parse(format!("config: key '{k}' given twice")));
        }
    }
    Ok(ConfigDoc { values })
}
