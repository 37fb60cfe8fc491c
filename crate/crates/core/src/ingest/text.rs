use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A `Key: value [unit]` line of the normalized CPU-tool form.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Entry {
    pub key: String,
    pub value: f64,
    pub unit: Option<String>,
    pub line: usize,
}

#[derive(Debug, Default)]
pub(crate) struct KeyValueBlock {
    pub entries: Vec<Entry>,
    pub label: Option<String>,
    pub warnings: Vec<String>,
}

impl KeyValueBlock {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key.eq_ignore_ascii_case(key))
    }
}

const LABEL_KEYS: [&str; 3] = ["kernel", "label", "region"];

/// Parses the normalized CPU-tool text. Blank lines and `#` comments are
/// skipped; identical repeated keys collapse, conflicting ones are an error.
pub(crate) fn parse_key_values(input: &str, text: &str) -> Result<KeyValueBlock> {
    let mut block = KeyValueBlock::default();
    let mut seen: BTreeMap<String, f64> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, rest)) = line.split_once(':') else {
            block
                .warnings
                .push(format!("{input} line {line_no}: not a key:value line, ignored"));
            continue;
        };
        let key = key.trim();
        let rest = rest.trim();
        if LABEL_KEYS.iter().any(|k| key.eq_ignore_ascii_case(k)) {
            block.label = Some(rest.to_string());
            continue;
        }
        let mut parts = rest.split_whitespace();
        let value = parts
            .next()
            .ok_or_else(|| Error::malformed(input, format!("line {line_no}: {key:?} has no value")))?;
        let value: f64 = value.parse().map_err(|_| {
            Error::malformed(input, format!("line {line_no}: {key:?} value {value:?} is not a number"))
        })?;
        if !value.is_finite() {
            return Err(Error::malformed(input, format!("line {line_no}: {key:?} is not finite")));
        }
        let unit = parts.next().map(str::to_string);
        let norm = key.to_ascii_lowercase();
        if let Some(prev) = seen.get(&norm) {
            if *prev != value {
                return Err(Error::malformed(
                    input,
                    format!("line {line_no}: conflicting duplicate key {key:?} ({prev} vs {value})"),
                ));
            }
            continue;
        }
        seen.insert(norm, value);
        block.entries.push(Entry {
            key: key.to_string(),
            value,
            unit,
            line: line_no,
        });
    }
    Ok(block)
}

/// Multiplier turning a byte value with `unit` into bytes. Bare values are GB,
/// the shape the CPU tools print.
pub(crate) fn byte_scale(input: &str, entry: &Entry) -> Result<f64> {
    match entry.unit.as_deref().map(str::to_ascii_lowercase).as_deref() {
        None | Some("gb") | Some("gbytes") => Ok(1e9),
        Some("mb") | Some("mbytes") => Ok(1e6),
        Some("kb") | Some("kbytes") => Ok(1e3),
        Some("b") | Some("bytes") => Ok(1.0),
        Some(other) => Err(Error::malformed(
            input,
            format!("line {}: unknown byte unit {other:?}", entry.line),
        )),
    }
}

pub(crate) fn time_scale(input: &str, entry: &Entry) -> Result<f64> {
    match entry.unit.as_deref().map(str::to_ascii_lowercase).as_deref() {
        None | Some("s") | Some("sec") | Some("secs") | Some("seconds") => Ok(1.0),
        Some("ms") | Some("msec") => Ok(1e-3),
        Some("us") | Some("usec") => Ok(1e-6),
        Some(other) => Err(Error::malformed(
            input,
            format!("line {}: unknown time unit {other:?}", entry.line),
        )),
    }
}

/// `value × scale`, rounded to a whole count.
pub(crate) fn to_count(value: f64, scale: f64) -> f64 {
    (value * scale).round()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_units_comments_and_labels() {
        let b = parse_key_values(
            "t",
            "# header\nKernel: NumBandNgpown_kernel\nTime: 10.2243 secs\n\nL1 Bytes: 3 MB\n",
        )
        .unwrap();
        assert_eq!(b.label.as_deref(), Some("NumBandNgpown_kernel"));
        assert_eq!(b.entries.len(), 2);
        assert_eq!(b.get("time").unwrap().unit.as_deref(), Some("secs"));
        assert_eq!(byte_scale("t", b.get("L1 Bytes").unwrap()).unwrap(), 1e6);
    }

    #[test]
    fn duplicate_keys() {
        assert!(parse_key_values("t", "GFLOPS: 1\nGFLOPS: 1\n").is_ok());
        assert!(matches!(
            parse_key_values("t", "GFLOPS: 1\nGFLOPS: 2\n"),
            Err(Error::MalformedInput { .. })
        ));
    }

    #[test]
    fn non_numeric_value_is_malformed() {
        assert!(parse_key_values("t", "Time: soon\n").is_err());
    }
}
