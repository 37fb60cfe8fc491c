use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    attainable_for, build_samples_with, classify_bound, locality_check, BoundClass, MachineModel,
    MeasurementSummary, Precision, SampleOptions, DEFAULT_LOCALITY_FACTOR,
};
use crate::scalar::Scalar;

pub const REPORT_SCHEMA: &str = "roofline-report/1";

/// A sample is flagged above the roofline once it beats attainable by more
/// than this fraction.
pub const ABOVE_ROOFLINE_TOLERANCE: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReportOptions {
    pub locality_factor: f64,
    pub combined_total: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            locality_factor: DEFAULT_LOCALITY_FACTOR,
            combined_total: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct SampleReport<T> {
    pub level: String,
    /// `None` for the combined all-precision series.
    pub precision: Option<Precision>,
    pub ai: T,
    pub gflops: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attainable: Option<T>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub classification: Option<BoundClass<T>>,
    pub above_roofline: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct ReportEntry<T> {
    pub label: String,
    pub seconds: Option<T>,
    pub samples: Vec<SampleReport<T>>,
    pub locality_warnings: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct Report<T> {
    pub schema: &'static str,
    pub machine: String,
    pub entries: Vec<ReportEntry<T>>,
}

impl<T: Scalar> Report<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Classifies every sample of every summary against `machine`, one entry per
/// summary in input order. Missing ceilings are reported on the affected
/// sample instead of failing the whole report.
pub fn emit_report<T: Scalar>(
    machine: &MachineModel<T>,
    summaries: &[MeasurementSummary<T>],
    opts: ReportOptions,
) -> Result<Report<T>> {
    if summaries.is_empty() {
        return Err(Error::Report("at least one summary is required".into()));
    }
    let tolerance = T::of(1.0 + ABOVE_ROOFLINE_TOLERANCE);
    let mut entries = Vec::with_capacity(summaries.len());
    for summary in summaries {
        let set = build_samples_with(
            summary,
            SampleOptions {
                combined_total: opts.combined_total,
            },
        );
        let samples = set
            .samples
            .iter()
            .map(|s| {
                let attainable = attainable_for(machine, s.ai, s.precision, &s.level.name);
                let class = classify_bound(machine, s);
                match (attainable, class) {
                    (Ok(att), Ok(class)) => SampleReport {
                        level: s.level.name.clone(),
                        precision: s.precision,
                        ai: s.ai,
                        gflops: s.gflops,
                        attainable: Some(att),
                        classification: Some(class),
                        above_roofline: s.gflops.is_some_and(|g| g > att * tolerance),
                        error: None,
                    },
                    (Err(e), _) | (_, Err(e)) => SampleReport {
                        level: s.level.name.clone(),
                        precision: s.precision,
                        ai: s.ai,
                        gflops: s.gflops,
                        attainable: None,
                        classification: None,
                        above_roofline: false,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect();
        let mut warnings = summary.warnings.clone();
        warnings.extend(set.warnings);
        entries.push(ReportEntry {
            label: summary.label.clone(),
            seconds: summary.seconds,
            samples,
            locality_warnings: locality_check(summary, T::of(opts.locality_factor)),
            warnings,
        });
    }
    Ok(Report {
        schema: REPORT_SCHEMA,
        machine: machine.name().to_string(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::model::{Bound, Ceiling, MemoryLevel};
    use crate::{Machine, Summary};

    fn machine() -> Machine {
        MachineModel::new(
            "toy",
            vec![
                Ceiling::compute("FP64", Precision::Fp64, 100.0).unwrap(),
                Ceiling::bandwidth("HBM", "HBM", 10.0).unwrap(),
            ],
            vec![MemoryLevel::new("HBM", 0)],
        )
        .unwrap()
    }

    fn summary(label: &str, flops: f64, hbm: f64) -> Summary {
        MeasurementSummary::new(
            label,
            Some(1.0),
            BTreeMap::from([(Precision::Fp64, flops)]),
            BTreeMap::from([("HBM".to_string(), hbm)]),
        )
        .unwrap()
    }

    #[test]
    fn entries_follow_input_order() {
        let r = emit_report(&machine(), &[summary("b", 1e9, 1e9), summary("a", 1e9, 1e9)], ReportOptions::default())
            .unwrap();
        assert_eq!(r.entries.iter().map(|e| e.label.as_str()).collect::<Vec<_>>(), ["b", "a"]);
        assert!(r.to_json().contains(r#""schema": "roofline-report/1""#));
    }

    #[test]
    fn flags_points_above_the_roof() {
        // AI 1, 20 GFLOP/s against a 10 GB/s roof.
        let r = emit_report(&machine(), &[summary("k", 20e9, 20e9)], ReportOptions::default()).unwrap();
        let s = &r.entries[0].samples[0];
        assert!(s.above_roofline);
        assert_eq!(s.classification.as_ref().unwrap().bound, Bound::MemoryBound { level: "HBM".into() });
        // Within tolerance: 10.1 against 10.
        let r = emit_report(&machine(), &[summary("k", 10.1e9, 10.1e9)], ReportOptions::default()).unwrap();
        assert!(!r.entries[0].samples[0].above_roofline);
    }

    #[test]
    fn missing_ceiling_is_per_sample() {
        let s = MeasurementSummary::new(
            "k",
            Some(1.0),
            BTreeMap::from([(Precision::Fp32, 1e9)]),
            BTreeMap::from([("HBM".to_string(), 1e9), ("L2".to_string(), 1e9)]),
        )
        .unwrap();
        let r = emit_report(&machine(), &[s], ReportOptions::default()).unwrap();
        assert_eq!(r.entries[0].samples.len(), 2);
        assert!(r.entries[0].samples.iter().all(|s| s.error.is_some() && s.attainable.is_none()));
    }

    #[test]
    fn no_summaries() {
        assert!(emit_report(&machine(), &[], ReportOptions::default()).is_err());
    }
}
