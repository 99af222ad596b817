//! Reading observed input/output samples from CSV.
//!
//! The header row is mandatory and must read `x1,x2,...,xp,y`. Values use a
//! decimal point; every value must be finite.

use std::path::Path;

use crate::error::{Error, Result};
use crate::sampling::IidDesign;

fn expected_name(k: usize, p: usize) -> String {
    if k == p {
        "y".to_string()
    } else {
        format!("x{}", k + 1)
    }
}

/// Parses CSV text into a design.
pub fn parse_data_csv(text: &str) -> Result<IidDesign> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| Error::Parse(format!("cannot read header: {e}")))?
        .clone();
    let names: Vec<&str> = header.iter().collect();
    if names.iter().all(|n| n.is_empty()) {
        return Err(Error::Parse("missing header row".into()));
    }
    let p = names.len().saturating_sub(1);
    if p == 0 {
        let missing = if names[0] == "y" { "x1" } else { "y" };
        return Err(Error::Parse(format!("missing column '{missing}'")));
    }
    for (k, name) in names.iter().enumerate() {
        let want = expected_name(k, p);
        if *name != want {
            return Err(if names.contains(&want.as_str()) {
                Error::Parse(format!("column '{want}' out of order (found '{name}' at position {})", k + 1))
            } else {
                Error::Parse(format!("missing column '{want}' (found '{name}' at position {})", k + 1))
            });
        }
    }
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(format!("row {}: {e}", line + 2)))?;
        if rec.len() != p + 1 {
            return Err(Error::Parse(format!(
                "row {} has {} fields, expected {}",
                line + 2,
                rec.len(),
                p + 1
            )));
        }
        let mut vals = Vec::with_capacity(p + 1);
        for (k, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                Error::Parse(format!(
                    "row {}, column '{}': '{field}' is not a number",
                    line + 2,
                    expected_name(k, p)
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::Parse(format!(
                    "row {}, column '{}': value is not finite",
                    line + 2,
                    expected_name(k, p)
                )));
            }
            vals.push(v);
        }
        y.push(vals.pop().unwrap_or_default());
        rows.push(vals);
    }
    if rows.len() < 2 {
        return Err(Error::Parse(format!("need at least 2 data rows, found {}", rows.len())));
    }
    IidDesign::from_rows(rows, y)
}

pub fn read_data_csv(path: &Path) -> Result<IidDesign> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_data_csv(&text)
}
