use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::level::{canonical_level_order, MemoryLevel, Precision};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Canonical measurement every adapter and the simulator produce.
///
/// `seconds` is absent when the source provides no time basis (SDE + VTune
/// without a timed region); samples built from such a summary carry AI only.
/// `bytes` may be empty, in which case the summary carries a warning and
/// produces no samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MeasurementSummary<T> {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seconds: Option<T>,
    pub flops: BTreeMap<Precision, T>,
    pub bytes: BTreeMap<String, T>,
    /// Non-count values carried through verbatim (e.g. tensor utilization level).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, T>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl<T: Scalar> MeasurementSummary<T> {
    pub fn new(
        label: impl Into<String>,
        seconds: Option<T>,
        flops: BTreeMap<Precision, T>,
        bytes: BTreeMap<String, T>,
    ) -> Result<Self> {
        let summary = MeasurementSummary {
            label: label.into(),
            seconds,
            flops,
            bytes,
            metadata: BTreeMap::new(),
            warnings: Vec::new(),
        };
        summary.validate()?;
        Ok(summary)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(format!("summary {:?}: {msg}", self.label)));
        if let Some(s) = self.seconds {
            if !(s.is_finite() && s > T::zero()) {
                return bad(format!("seconds must be > 0, got {s}"));
            }
        }
        if self.flops.is_empty() {
            return bad("no FLOP counts".into());
        }
        for (p, v) in &self.flops {
            if !(v.is_finite() && *v >= T::zero()) {
                return bad(format!("{p} FLOPs must be finite and >= 0, got {v}"));
            }
        }
        for (level, v) in &self.bytes {
            if level.trim().is_empty() {
                return bad("empty memory level name".into());
            }
            if !(v.is_finite() && *v >= T::zero()) {
                return bad(format!("{level} bytes must be finite and >= 0, got {v}"));
            }
        }
        Ok(())
    }

    /// Levels present in `bytes`, nearest first, ranked from 0.
    pub fn hierarchy(&self) -> Vec<MemoryLevel> {
        let mut names: Vec<&String> = self.bytes.keys().collect();
        names.sort_by(|a, b| canonical_level_order(a, b));
        names
            .into_iter()
            .enumerate()
            .map(|(rank, name)| MemoryLevel::new(name.clone(), rank))
            .collect()
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    /// Pretty JSON with sorted keys; stable for identical summaries.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let summary: Self = serde_json::from_str(text)?;
        summary.validate()?;
        Ok(summary)
    }

    pub fn cast<U: Scalar>(&self) -> MeasurementSummary<U> {
        let conv = |v: &T| U::of(v.as_f64());
        MeasurementSummary {
            label: self.label.clone(),
            seconds: self.seconds.as_ref().map(conv),
            flops: self.flops.iter().map(|(k, v)| (*k, conv(v))).collect(),
            bytes: self.bytes.iter().map(|(k, v)| (k.clone(), conv(v))).collect(),
            metadata: self.metadata.iter().map(|(k, v)| (k.clone(), conv(v))).collect(),
            warnings: self.warnings.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary() -> MeasurementSummary<f64> {
        MeasurementSummary::new(
            "k",
            Some(2.0),
            BTreeMap::from([(Precision::Fp64, 10.0)]),
            BTreeMap::from([
                ("DDR".to_string(), 1.0),
                ("L1".to_string(), 8.0),
                ("MCDRAM".to_string(), 2.0),
                ("L2".to_string(), 4.0),
            ]),
        )
        .unwrap()
    }

    #[test]
    fn hierarchy_is_nearest_first() {
        let names: Vec<_> = summary().hierarchy().into_iter().map(|l| l.name).collect();
        assert_eq!(names, ["L1", "L2", "MCDRAM", "DDR"]);
    }

    #[test]
    fn rejects_invalid_counts() {
        let mut s = summary();
        s.seconds = Some(0.0);
        assert!(s.validate().is_err());
        let mut s = summary();
        s.flops.clear();
        assert!(s.validate().is_err());
        let mut s = summary();
        s.bytes.insert("L3".into(), -1.0);
        assert!(s.validate().is_err());
    }

    #[test]
    fn json_is_stable() {
        let s = summary();
        let text = s.to_json();
        let back = MeasurementSummary::<f64>::from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), text);
        assert!(text.contains("\"FP64\""));
    }
}
