use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit class of a GPU metric; each class has a default multiplier that
/// converts the raw metric into bytes (or FLOPs for tensor instructions).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricClass {
    /// nvprof global/local/atomic/L2/DRAM transaction, default 32 B.
    Transaction,
    /// nvprof shared load/store transaction, default 128 B.
    SharedTransaction,
    /// Nsight Compute sector, default 32 B.
    Sector,
    /// Nsight Compute L1 set access (atomics and reductions), default 32 B.
    SetAccess,
    /// Nsight Compute shared-memory wavefront, default 128 B.
    SharedWavefront,
    /// Tensor-pipe instruction, default 512 FLOPs.
    TensorInstruction,
    /// Already in bytes.
    Bytes,
}

impl MetricClass {
    pub const ALL: [MetricClass; 7] = [
        MetricClass::Transaction,
        MetricClass::SharedTransaction,
        MetricClass::Sector,
        MetricClass::SetAccess,
        MetricClass::SharedWavefront,
        MetricClass::TensorInstruction,
        MetricClass::Bytes,
    ];

    pub fn key(self) -> &'static str {
        match self {
            MetricClass::Transaction => "transaction",
            MetricClass::SharedTransaction => "shared_transaction",
            MetricClass::Sector => "sector",
            MetricClass::SetAccess => "set_access",
            MetricClass::SharedWavefront => "shared_wavefront",
            MetricClass::TensorInstruction => "tensor_instruction",
            MetricClass::Bytes => "bytes",
        }
    }

    pub fn default_multiplier(self) -> f64 {
        match self {
            MetricClass::Transaction | MetricClass::Sector | MetricClass::SetAccess => 32.0,
            MetricClass::SharedTransaction | MetricClass::SharedWavefront => 128.0,
            MetricClass::TensorInstruction => 512.0,
            MetricClass::Bytes => 1.0,
        }
    }
}

/// Multipliers keyed by exact metric name or by class key.
///
/// Lookup prefers an exact metric-name entry over its class entry, so
/// `{"sector": 64}` rescales every sector metric while
/// `{"dram__sectors_read.sum": 64}` touches one metric only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoefficientTable {
    entries: BTreeMap<String, f64>,
}

impl Default for CoefficientTable {
    fn default() -> Self {
        CoefficientTable {
            entries: MetricClass::ALL
                .iter()
                .map(|c| (c.key().to_string(), c.default_multiplier()))
                .collect(),
        }
    }
}

impl CoefficientTable {
    /// Merges `overrides` over `self`; every multiplier must be finite and > 0.
    pub fn merged(&self, overrides: &BTreeMap<String, f64>) -> Result<Self> {
        let mut entries = self.entries.clone();
        for (key, &v) in overrides {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(
                    format!("$.{key}"),
                    format!("coefficient must be > 0, got {v}"),
                ));
            }
            entries.insert(key.clone(), v);
        }
        Ok(CoefficientTable { entries })
    }

    /// Reads a JSON object of overrides and merges it over the defaults.
    pub fn from_json_overrides(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let overrides: BTreeMap<String, f64> = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::config(e.path().to_string(), e.inner().to_string()))?;
        CoefficientTable::default().merged(&overrides)
    }

    pub fn multiplier(&self, metric: &str, class: MetricClass) -> f64 {
        self.entries
            .get(metric)
            .or_else(|| self.entries.get(class.key()))
            .copied()
            .unwrap_or_else(|| class.default_multiplier())
    }

    pub fn entries(&self) -> &BTreeMap<String, f64> {
        &self.entries
    }
}
