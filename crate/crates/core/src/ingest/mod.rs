//! Adapters from exported profiler output to [`MeasurementSummary`].
//!
//! CPU tools (LIKWID, SDE, VTune) are read in a normalized `Key: value [unit]`
//! form; GPU tools (nvprof, Nsight Compute) as `metric,value[,unit]` CSV.
//! The accepted grammars are pinned by the fixtures under `fixtures/`.
//!
//! [`MeasurementSummary`]: crate::MeasurementSummary

mod coefficients;
mod cpu;
mod detect;
mod gpu;
mod text;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use coefficients::{CoefficientTable, MetricClass};
pub use cpu::{parse_likwid, parse_sde_vtune};
pub use detect::detect_adapter;
pub use gpu::{known_metrics, map_ncu2019, map_ncu2020, map_nvprof, parse_metric_csv, MetricCsv};

use crate::error::{Error, Result};
use crate::Summary;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdapterId {
    Likwid,
    SdeVtune,
    Nvprof,
    Ncu2019,
    Ncu2020,
}

impl AdapterId {
    pub const ALL: [AdapterId; 5] = [
        AdapterId::Likwid,
        AdapterId::SdeVtune,
        AdapterId::Nvprof,
        AdapterId::Ncu2019,
        AdapterId::Ncu2020,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AdapterId::Likwid => "likwid",
            AdapterId::SdeVtune => "sde_vtune",
            AdapterId::Nvprof => "nvprof",
            AdapterId::Ncu2019 => "ncu2019",
            AdapterId::Ncu2020 => "ncu2020",
        }
    }
}

impl fmt::Display for AdapterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AdapterId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AdapterId::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s) || (s == "sde" && *a == AdapterId::SdeVtune))
            .ok_or_else(|| Error::config("adapter", format!("unknown adapter {s:?}")))
    }
}

/// One named value exported by a GPU profiler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub name: String,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

impl MetricRecord {
    pub fn new(name: impl Into<String>, value: f64) -> Result<Self> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(Error::malformed("metric", "empty metric name"));
        }
        if !value.is_finite() {
            return Err(Error::malformed("metric", format!("{name}: non-finite value")));
        }
        Ok(MetricRecord {
            name,
            value,
            unit: None,
        })
    }
}

/// Inputs beside the primary text that some adapters need.
#[derive(Clone, Debug, Default)]
pub struct IngestOptions {
    /// Elapsed seconds for nvprof (required) or SDE + VTune (optional).
    pub seconds: Option<f64>,
    /// VTune text paired with an SDE primary input.
    pub vtune: Option<String>,
    /// Overrides any label carried by the input.
    pub label: Option<String>,
    pub coefficients: CoefficientTable,
}

/// Detects (unless given) the adapter and parses `text` into a summary.
pub fn ingest(text: &str, adapter: Option<AdapterId>, opts: &IngestOptions) -> Result<Summary> {
    let adapter = match adapter {
        Some(a) => a,
        None => detect_adapter(text)?,
    };
    let mut summary = match adapter {
        AdapterId::Likwid => parse_likwid(text)?,
        AdapterId::SdeVtune => {
            let mut s = parse_sde_vtune(text, opts.vtune.as_deref())?;
            if let Some(sec) = opts.seconds {
                if !(sec.is_finite() && sec > 0.0) {
                    return Err(Error::malformed("sde", format!("seconds must be > 0, got {sec}")));
                }
                s.seconds = Some(sec);
            }
            s
        }
        AdapterId::Nvprof | AdapterId::Ncu2019 | AdapterId::Ncu2020 => {
            let csv = parse_metric_csv(text)?;
            let mut s = match adapter {
                AdapterId::Nvprof => {
                    let seconds = opts.seconds.ok_or_else(|| {
                        Error::MissingTimeBasis(
                            "nvprof metrics carry no time; supply the kernel time in seconds".into(),
                        )
                    })?;
                    map_nvprof(&csv.records, seconds, &opts.coefficients)?
                }
                AdapterId::Ncu2019 => map_ncu2019(&csv.records, &opts.coefficients)?,
                _ => map_ncu2020(&csv.records, &opts.coefficients)?,
            };
            if let Some(label) = csv.label {
                s.label = label;
            }
            s
        }
    };
    if let Some(label) = &opts.label {
        summary.label = label.clone();
    }
    Ok(summary)
}
