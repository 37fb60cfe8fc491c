use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Ceiling, MachineModel, MemoryLevel, Precision};
use crate::scalar::Scalar;
use crate::Machine;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Measured,
    Vendor,
    #[default]
    File,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComputeEntry {
    pub label: String,
    pub precision: Precision,
    pub gflops: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandwidthEntry {
    pub label: String,
    pub level: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    pub gbs: f64,
}

/// On-disk ceilings file:
///
/// ```json
/// {"machine": "...", "compute": [{"label", "precision", "gflops"}],
///  "bandwidth": [{"label", "level", "rank", "gbs"}], "provenance": "file"}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CeilingsDocument {
    pub machine: String,
    pub compute: Vec<ComputeEntry>,
    pub bandwidth: Vec<BandwidthEntry>,
    #[serde(default)]
    pub provenance: Provenance,
}

impl CeilingsDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { "$".to_string() } else { format!("$.{path}") };
            Error::config(path, e.inner().to_string())
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ceilings serialize")
    }

    /// Builds the model. Without explicit ranks the hierarchy is ordered by
    /// descending bandwidth (fastest nearest); ties then require ranks.
    pub fn to_model<T: Scalar>(&self) -> Result<MachineModel<T>> {
        if self.machine.trim().is_empty() {
            return Err(Error::config("$.machine", "machine name is empty"));
        }
        if self.compute.is_empty() {
            return Err(Error::config("$.compute", "at least one compute ceiling is required"));
        }
        if self.bandwidth.is_empty() {
            return Err(Error::config("$.bandwidth", "at least one bandwidth ceiling is required"));
        }
        let mut ceilings = Vec::new();
        for (i, c) in self.compute.iter().enumerate() {
            if !(c.gflops.is_finite() && c.gflops > 0.0) {
                return Err(Error::config(format!("$.compute[{i}].gflops"), format!("must be > 0, got {}", c.gflops)));
            }
            ceilings.push(Ceiling::compute(c.label.clone(), c.precision, T::of(c.gflops))?);
        }
        for (i, b) in self.bandwidth.iter().enumerate() {
            if !(b.gbs.is_finite() && b.gbs > 0.0) {
                return Err(Error::config(format!("$.bandwidth[{i}].gbs"), format!("must be > 0, got {}", b.gbs)));
            }
            if b.level.trim().is_empty() {
                return Err(Error::config(format!("$.bandwidth[{i}].level"), "level is empty"));
            }
            if self.bandwidth[..i].iter().any(|o| o.level.eq_ignore_ascii_case(&b.level)) {
                return Err(Error::config(format!("$.bandwidth[{i}].level"), format!("duplicate level {:?}", b.level)));
            }
            ceilings.push(Ceiling::bandwidth(b.label.clone(), b.level.clone(), T::of(b.gbs))?);
        }

        let ranked = self.bandwidth.iter().filter(|b| b.rank.is_some()).count();
        let hierarchy: Vec<MemoryLevel> = if ranked == self.bandwidth.len() {
            let mut seen = vec![false; self.bandwidth.len()];
            for (i, b) in self.bandwidth.iter().enumerate() {
                let r = b.rank.unwrap_or_default();
                if r >= seen.len() || seen[r] {
                    return Err(Error::config(
                        format!("$.bandwidth[{i}].rank"),
                        "ranks must be unique and contiguous from 0",
                    ));
                }
                seen[r] = true;
            }
            self.bandwidth
                .iter()
                .map(|b| MemoryLevel::new(b.level.clone(), b.rank.unwrap_or_default()))
                .collect()
        } else if ranked == 0 {
            let mut order: Vec<usize> = (0..self.bandwidth.len()).collect();
            order.sort_by(|&a, &b| self.bandwidth[b].gbs.total_cmp(&self.bandwidth[a].gbs));
            for w in order.windows(2) {
                if self.bandwidth[w[0]].gbs == self.bandwidth[w[1]].gbs {
                    return Err(Error::config(
                        format!("$.bandwidth[{}].rank", w[1]),
                        format!(
                            "levels {:?} and {:?} have equal bandwidth; give explicit ranks",
                            self.bandwidth[w[0]].level, self.bandwidth[w[1]].level
                        ),
                    ));
                }
            }
            order
                .iter()
                .enumerate()
                .map(|(rank, &i)| MemoryLevel::new(self.bandwidth[i].level.clone(), rank))
                .collect()
        } else {
            return Err(Error::config("$.bandwidth", "either every bandwidth entry has a rank or none does"));
        };

        MachineModel::new(self.machine.clone(), ceilings, hierarchy)
    }

    /// Document for `model` with every rank explicit.
    pub fn from_model<T: Scalar>(model: &MachineModel<T>, provenance: Provenance) -> Self {
        let rank_of = |level: &str| {
            model
                .hierarchy()
                .iter()
                .find(|l| l.name.eq_ignore_ascii_case(level))
                .map(|l| l.rank)
        };
        CeilingsDocument {
            machine: model.name().to_string(),
            compute: model
                .compute_ceilings()
                .map(|c| ComputeEntry {
                    label: c.label.clone(),
                    precision: c.precision().expect("compute ceiling"),
                    gflops: c.value.as_f64(),
                })
                .collect(),
            bandwidth: model
                .bandwidth_ceilings()
                .map(|c| {
                    let level = c.level().expect("bandwidth ceiling");
                    BandwidthEntry {
                        label: c.label.clone(),
                        level: level.to_string(),
                        rank: rank_of(level),
                        gbs: c.value.as_f64(),
                    }
                })
                .collect(),
            provenance,
        }
    }
}

/// Parses and validates a ceilings document into an `f64` model.
pub fn load_ceilings(text: &str) -> Result<Machine> {
    CeilingsDocument::from_json(text)?.to_model()
}
