use serde::{Deserialize, Serialize};

use super::level::{MemoryLevel, Precision};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CeilingKind {
    Compute { precision: Precision },
    Bandwidth { level: String },
}

/// A horizontal (compute, GFLOP/s) or sloped (bandwidth, GB/s) roof.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Ceiling<T> {
    pub label: String,
    pub value: T,
    #[serde(flatten)]
    pub kind: CeilingKind,
}

impl<T: Scalar> Ceiling<T> {
    pub fn compute(label: impl Into<String>, precision: Precision, gflops: T) -> Result<Self> {
        Self::checked(label.into(), gflops, CeilingKind::Compute { precision })
    }

    pub fn bandwidth(label: impl Into<String>, level: impl Into<String>, gbs: T) -> Result<Self> {
        Self::checked(
            label.into(),
            gbs,
            CeilingKind::Bandwidth {
                level: level.into(),
            },
        )
    }

    fn checked(label: String, value: T, kind: CeilingKind) -> Result<Self> {
        if !(value.is_finite() && value > T::zero()) {
            return Err(Error::InvalidModel(format!(
                "ceiling {label:?} must be finite and > 0, got {value}"
            )));
        }
        Ok(Ceiling { label, value, kind })
    }

    pub fn precision(&self) -> Option<Precision> {
        match self.kind {
            CeilingKind::Compute { precision } => Some(precision),
            CeilingKind::Bandwidth { .. } => None,
        }
    }

    pub fn level(&self) -> Option<&str> {
        match &self.kind {
            CeilingKind::Bandwidth { level } => Some(level),
            CeilingKind::Compute { .. } => None,
        }
    }

    pub fn is_compute(&self) -> bool {
        matches!(self.kind, CeilingKind::Compute { .. })
    }
}

/// Compute and bandwidth ceilings of one machine plus its memory hierarchy.
///
/// Invariants (checked by [`MachineModel::new`]): at least one compute and
/// one bandwidth ceiling, every bandwidth level appears in the hierarchy,
/// hierarchy ranks are unique and contiguous from 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct MachineModel<T> {
    name: String,
    ceilings: Vec<Ceiling<T>>,
    hierarchy: Vec<MemoryLevel>,
}

impl<T: Scalar> MachineModel<T> {
    pub fn new(
        name: impl Into<String>,
        ceilings: Vec<Ceiling<T>>,
        mut hierarchy: Vec<MemoryLevel>,
    ) -> Result<Self> {
        let name = name.into();
        if !ceilings.iter().any(Ceiling::is_compute) {
            return Err(Error::InvalidModel(format!(
                "machine {name:?} has no compute ceiling"
            )));
        }
        if ceilings.iter().all(Ceiling::is_compute) {
            return Err(Error::InvalidModel(format!(
                "machine {name:?} has no bandwidth ceiling"
            )));
        }
        for c in &ceilings {
            if !(c.value.is_finite() && c.value > T::zero()) {
                return Err(Error::InvalidModel(format!(
                    "ceiling {:?} must be finite and > 0",
                    c.label
                )));
            }
        }
        hierarchy.sort_by_key(|l| l.rank);
        for (i, level) in hierarchy.iter().enumerate() {
            if level.rank != i {
                return Err(Error::InvalidModel(format!(
                    "hierarchy ranks must be unique and contiguous from 0 (level {:?} has rank {})",
                    level.name, level.rank
                )));
            }
        }
        for (i, a) in hierarchy.iter().enumerate() {
            if hierarchy[..i].iter().any(|b| b.name.eq_ignore_ascii_case(&a.name)) {
                return Err(Error::InvalidModel(format!(
                    "duplicate hierarchy level {:?}",
                    a.name
                )));
            }
        }
        for c in &ceilings {
            if let Some(level) = c.level() {
                if !hierarchy.iter().any(|l| l.name.eq_ignore_ascii_case(level)) {
                    return Err(Error::InvalidModel(format!(
                        "bandwidth ceiling {:?} refers to level {level:?} missing from the hierarchy",
                        c.label
                    )));
                }
            }
        }
        Ok(MachineModel {
            name,
            ceilings,
            hierarchy,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ceilings(&self) -> &[Ceiling<T>] {
        &self.ceilings
    }

    /// Levels ordered by rank, nearest first.
    pub fn hierarchy(&self) -> &[MemoryLevel] {
        &self.hierarchy
    }

    pub fn compute_ceilings(&self) -> impl Iterator<Item = &Ceiling<T>> {
        self.ceilings.iter().filter(|c| c.is_compute())
    }

    pub fn bandwidth_ceilings(&self) -> impl Iterator<Item = &Ceiling<T>> {
        self.ceilings.iter().filter(|c| !c.is_compute())
    }

    /// Highest compute ceiling for `precision`.
    pub fn compute_peak(&self, precision: Precision) -> Result<T> {
        self.compute_ceilings()
            .filter(|c| c.precision() == Some(precision))
            .map(|c| c.value)
            .fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |a| a.max(v))))
            .ok_or_else(|| Error::MissingCeiling {
                kind: "compute",
                what: format!("precision {precision} on machine {:?}", self.name),
            })
    }

    /// Highest compute ceiling of any precision.
    pub fn overall_compute_peak(&self) -> T {
        self.compute_ceilings()
            .map(|c| c.value)
            .fold(T::zero(), |a, v| a.max(v))
    }

    pub(crate) fn compute_peak_for(&self, precision: Option<Precision>) -> Result<T> {
        match precision {
            Some(p) => self.compute_peak(p),
            None => Ok(self.overall_compute_peak()),
        }
    }

    /// Highest bandwidth ceiling attached to `level` (matched case-insensitively).
    pub fn bandwidth_peak(&self, level: &str) -> Result<T> {
        self.bandwidth_ceilings()
            .filter(|c| c.level().is_some_and(|l| l.eq_ignore_ascii_case(level)))
            .map(|c| c.value)
            .fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |a| a.max(v))))
            .ok_or_else(|| Error::MissingCeiling {
                kind: "bandwidth",
                what: format!("level {level} on machine {:?}", self.name),
            })
    }

    /// Converts every ceiling to another scalar type.
    pub fn cast<U: Scalar>(&self) -> MachineModel<U> {
        MachineModel {
            name: self.name.clone(),
            ceilings: self
                .ceilings
                .iter()
                .map(|c| Ceiling {
                    label: c.label.clone(),
                    value: U::of(c.value.as_f64()),
                    kind: c.kind.clone(),
                })
                .collect(),
            hierarchy: self.hierarchy.clone(),
        }
    }
}
