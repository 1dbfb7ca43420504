//! Flat `key = value` text files: parameter ingestion and the
//! machine-readable report.
//!
//! Blank lines and lines starting with `#` are ignored. Keys may not repeat.

use crate::error::{Error, Result};
use crate::model::{ParamValues, PARAM_KEYS};

/// Parses `key = value` lines, preserving order.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: idx + 1, message };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected key=value, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(parse_err("empty key".into()));
        }
        if out.iter().any(|(k, _)| k == key) {
            return Err(parse_err(format!("duplicate key `{key}`")));
        }
        out.push((key.to_string(), value.to_string()));
    }
    Ok(out)
}

pub fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| Error::Parameter(format!("value `{value}` for `{key}` is not a number")))
}

/// Reads a complete parameter set. Every key must be present exactly once
/// and unknown keys are rejected.
pub fn parse_params(text: &str) -> Result<ParamValues> {
    let mut values = ParamValues::reference(0.0);
    let mut seen = [false; PARAM_KEYS.len()];
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let line_no = idx + 1;
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("expected key=value, got `{line}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let slot = PARAM_KEYS.iter().position(|k| *k == key).ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("unknown parameter key `{key}`"),
        })?;
        if seen[slot] {
            return Err(Error::Parse { line: line_no, message: format!("duplicate key `{key}`") });
        }
        seen[slot] = true;
        let v = parse_f64(key, value).map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
        values.set(key, v)?;
    }
    let missing: Vec<&str> = PARAM_KEYS.iter().zip(seen).filter(|(_, s)| !s).map(|(k, _)| *k).collect();
    if !missing.is_empty() {
        return Err(Error::Parameter(format!("missing parameter keys: {}", missing.join(", "))));
    }
    Ok(values)
}

/// Applies a `key=value` override.
pub fn apply_override(values: &mut ParamValues, assignment: &str) -> Result<()> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Parameter(format!("override `{assignment}` is not key=value")))?;
    let (key, value) = (key.trim(), value.trim());
    values.set(key, parse_f64(key, value)?)
}

/// Serializes a parameter set in canonical key order, full precision.
pub fn format_params(values: &ParamValues) -> String {
    PARAM_KEYS
        .iter()
        .map(|k| format!("{k} = {:?}\n", values.get(k).unwrap_or(f64::NAN)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_reference() {
        let v = ParamValues::reference(0.3);
        assert_eq!(parse_params(&format_params(&v)).unwrap(), v);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = format_params(&ParamValues::reference(0.8)).replace("g = 50.0", "g = 50.0 # trailing");
        // Trailing text after a value is not a number.
        assert!(matches!(parse_params(&text), Err(Error::Parse { .. })));
        let text = format!("# header\n\n{}", format_params(&ParamValues::reference(0.8)));
        assert_eq!(parse_params(&text).unwrap().epsilon, 0.8);
    }

    #[test]
    fn unknown_key_is_an_error() {
        let text = format!("{}sigma = 1\n", format_params(&ParamValues::reference(0.3)));
        match parse_params(&text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 14);
                assert!(message.contains("sigma"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_and_duplicate_keys() {
        assert!(matches!(parse_params("a = 1\n"), Err(Error::Parameter(_))));
        let text = format!("{}a = 2\n", format_params(&ParamValues::reference(0.3)));
        assert!(matches!(parse_params(&text), Err(Error::Parse { .. })));
    }

    #[test]
    fn overrides() {
        let mut v = ParamValues::reference(0.3);
        apply_override(&mut v, "epsilon=0.8").unwrap();
        assert_eq!(v.epsilon, 0.8);
        assert!(apply_override(&mut v, "bogus=1").is_err());
        assert!(apply_override(&mut v, "epsilon").is_err());
        assert!(apply_override(&mut v, "epsilon=x").is_err());
    }

    #[test]
    fn pairs_preserve_order_and_reject_garbage() {
        let p = parse_pairs("b=2\n# c\na = 1\n").unwrap();
        assert_eq!(p, vec![("b".into(), "2".into()), ("a".into(), "1".into())]);
        assert!(parse_pairs("novalue\n").is_err());
        assert!(parse_pairs("=3\n").is_err());
        assert!(parse_pairs("a=1\na=2\n").is_err());
    }
}
