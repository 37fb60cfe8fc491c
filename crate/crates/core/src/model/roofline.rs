use serde::{Deserialize, Serialize};

use super::level::{canonical_level_order, MemoryLevel, Precision};
use super::machine_model::MachineModel;
use super::summary::MeasurementSummary;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Farther-over-nearer byte ratio above which [`locality_check`] warns.
pub const DEFAULT_LOCALITY_FACTOR: f64 = 1.0;

/// One plotted point of a hierarchical Roofline.
///
/// `precision == None` marks the combined series summed over all precisions
/// (only produced when [`SampleOptions::combined_total`] is set).
/// `gflops` is absent when the summary has no time basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RooflineSample<T> {
    pub label: String,
    pub level: MemoryLevel,
    pub precision: Option<Precision>,
    pub ai: T,
    pub gflops: Option<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "bound", rename_all = "snake_case")]
pub enum Bound {
    MemoryBound { level: String },
    ComputeBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BoundClass<T> {
    #[serde(flatten)]
    pub bound: Bound,
    /// Attainable over achieved throughput; absent without a time basis.
    pub headroom: Option<T>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SampleOptions {
    /// Also emit one series with FLOPs summed over every precision.
    pub combined_total: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet<T> {
    pub samples: Vec<RooflineSample<T>>,
    pub warnings: Vec<String>,
}

/// FLOPs per byte moved at `level`.
pub fn arithmetic_intensity<T: Scalar>(flops: T, bytes: T, level: &str) -> Result<T> {
    if bytes == T::zero() {
        return Err(Error::DivisionByZero {
            level: level.to_string(),
        });
    }
    Ok(flops / bytes)
}

/// `min(peak GFLOP/s, peak GB/s × ai)` for the given precision and level.
pub fn attainable_performance<T: Scalar>(
    machine: &MachineModel<T>,
    ai: T,
    precision: Precision,
    level: &str,
) -> Result<T> {
    attainable_for(machine, ai, Some(precision), level)
}

pub(crate) fn attainable_for<T: Scalar>(
    machine: &MachineModel<T>,
    ai: T,
    precision: Option<Precision>,
    level: &str,
) -> Result<T> {
    let peak = machine.compute_peak_for(precision)?;
    let bw = machine.bandwidth_peak(level)?;
    Ok(peak.min(bw * ai))
}

/// AI where the bandwidth and compute roofs meet.
pub fn ridge_point<T: Scalar>(
    machine: &MachineModel<T>,
    precision: Precision,
    level: &str,
) -> Result<T> {
    ridge_for(machine, Some(precision), level)
}

pub(crate) fn ridge_for<T: Scalar>(
    machine: &MachineModel<T>,
    precision: Option<Precision>,
    level: &str,
) -> Result<T> {
    let peak = machine.compute_peak_for(precision)?;
    let bw = machine.bandwidth_peak(level)?;
    Ok(peak / bw)
}

pub fn build_samples<T: Scalar>(summary: &MeasurementSummary<T>) -> SampleSet<T> {
    build_samples_with(summary, SampleOptions::default())
}

/// One sample per (precision with FLOPs > 0) × (level with bytes > 0).
///
/// Throughput is `flops / seconds / 1e9` and therefore identical across levels
/// of the same precision; only AI varies.
pub fn build_samples_with<T: Scalar>(
    summary: &MeasurementSummary<T>,
    opts: SampleOptions,
) -> SampleSet<T> {
    let mut warnings = Vec::new();
    let giga = T::of(1e9);

    let mut series: Vec<(Option<Precision>, T)> = Vec::new();
    for (&p, &flops) in &summary.flops {
        if flops > T::zero() {
            series.push((Some(p), flops));
        } else {
            warnings.push(format!("{}: no {p} FLOPs, series skipped", summary.label));
        }
    }
    if opts.combined_total && !series.is_empty() {
        let total = series.iter().fold(T::zero(), |acc, (_, f)| acc + *f);
        series.push((None, total));
    }

    let mut levels = Vec::new();
    for level in summary.hierarchy() {
        if summary.bytes[&level.name] > T::zero() {
            levels.push(level);
        } else {
            warnings.push(format!(
                "{}: zero bytes at {}, level skipped",
                summary.label, level.name
            ));
        }
    }
    if summary.bytes.is_empty() {
        warnings.push(format!("{}: no memory-level bytes", summary.label));
    }
    if summary.seconds.is_none() && !series.is_empty() {
        warnings.push(format!(
            "{}: no time basis, throughput omitted",
            summary.label
        ));
    }

    let mut samples = Vec::with_capacity(series.len() * levels.len());
    for (precision, flops) in &series {
        let gflops = summary.seconds.map(|s| *flops / s / giga);
        for level in &levels {
            let bytes = summary.bytes[&level.name];
            samples.push(RooflineSample {
                label: summary.label.clone(),
                level: level.clone(),
                precision: *precision,
                ai: *flops / bytes,
                gflops,
            });
        }
    }
    SampleSet { samples, warnings }
}

/// Compute-bound iff `ai >= ridge` (the ridge itself counts as compute-bound).
pub fn classify_bound<T: Scalar>(
    machine: &MachineModel<T>,
    sample: &RooflineSample<T>,
) -> Result<BoundClass<T>> {
    let ridge = ridge_for(machine, sample.precision, &sample.level.name)?;
    let attainable = attainable_for(machine, sample.ai, sample.precision, &sample.level.name)?;
    let bound = if sample.ai >= ridge {
        Bound::ComputeBound
    } else {
        Bound::MemoryBound {
            level: sample.level.name.clone(),
        }
    };
    Ok(BoundClass {
        bound,
        headroom: sample.gflops.map(|g| attainable / g),
    })
}

/// Warns for each adjacent level pair whose farther level moved more than
/// `factor` times the bytes of the nearer one. Never fails: write-allocate
/// traffic can legitimately invert the ordering.
pub fn locality_check<T: Scalar>(summary: &MeasurementSummary<T>, factor: T) -> Vec<String> {
    let mut names: Vec<&String> = summary.bytes.keys().collect();
    names.sort_by(|a, b| canonical_level_order(a, b));
    names
        .windows(2)
        .filter_map(|pair| {
            let (near, far) = (pair[0], pair[1]);
            let (nb, fb) = (summary.bytes[near], summary.bytes[far]);
            (fb > nb * factor).then(|| {
                format!(
                    "{}: {far} bytes ({fb}) exceed {near} bytes ({nb}) by more than {factor}x",
                    summary.label
                )
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::model::Ceiling;

    fn machine(peak: f64, bw: f64) -> MachineModel<f64> {
        MachineModel::new(
            "toy",
            vec![
                Ceiling::compute("peak", Precision::Fp64, peak).unwrap(),
                Ceiling::bandwidth("bw", "HBM", bw).unwrap(),
            ],
            vec![MemoryLevel::new("HBM", 0)],
        )
        .unwrap()
    }

    fn sample(ai: f64, gflops: f64) -> RooflineSample<f64> {
        RooflineSample {
            label: "s".into(),
            level: MemoryLevel::new("HBM", 0),
            precision: Some(Precision::Fp64),
            ai,
            gflops: Some(gflops),
        }
    }

    #[test]
    fn intensity_examples() {
        assert_eq!(arithmetic_intensity(100.0, 50.0, "L1").unwrap(), 2.0);
        let err = arithmetic_intensity(1.0, 0.0, "DDR").unwrap_err();
        assert!(matches!(err, Error::DivisionByZero { ref level } if level == "DDR"));
    }

    #[test]
    fn attainable_examples() {
        let m = machine(100.0, 50.0);
        let at = |ai| attainable_performance(&m, ai, Precision::Fp64, "HBM").unwrap();
        assert_eq!(at(1.0), 50.0);
        assert_eq!(at(2.0), 100.0);
        assert_eq!(at(10.0), 100.0);
        assert!(matches!(
            attainable_performance(&m, 1.0, Precision::Fp32, "HBM"),
            Err(Error::MissingCeiling { kind: "compute", .. })
        ));
        assert!(matches!(
            attainable_performance(&m, 1.0, Precision::Fp64, "L2"),
            Err(Error::MissingCeiling { kind: "bandwidth", .. })
        ));
    }

    #[test]
    fn ridge_examples() {
        assert_eq!(ridge_point(&machine(100.0, 50.0), Precision::Fp64, "HBM").unwrap(), 2.0);
        assert_eq!(ridge_point(&machine(75.0, 75.0), Precision::Fp64, "HBM").unwrap(), 1.0);
        let r = ridge_point(&machine(7000.0, 900.0), Precision::Fp64, "HBM").unwrap();
        assert!((r - 7.78).abs() < 0.005);
    }

    #[test]
    fn classification() {
        let m = machine(7000.0, 900.0);
        let c = classify_bound(&m, &sample(13.0, 500.0)).unwrap();
        assert_eq!(c.bound, Bound::ComputeBound);
        assert_eq!(c.headroom, Some(14.0));

        let m = machine(100.0, 50.0);
        assert_eq!(classify_bound(&m, &sample(2.0, 10.0)).unwrap().bound, Bound::ComputeBound);
        let c = classify_bound(&m, &sample(0.1, 1.0)).unwrap();
        assert_eq!(c.bound, Bound::MemoryBound { level: "HBM".into() });
        assert!((c.headroom.unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn zero_flops_yield_no_samples() {
        let s = MeasurementSummary::new(
            "z",
            Some(1.0),
            BTreeMap::from([(Precision::Fp64, 0.0)]),
            BTreeMap::from([("L1".to_string(), 10.0)]),
        )
        .unwrap();
        let set = build_samples(&s);
        assert!(set.samples.is_empty());
        assert_eq!(set.warnings.len(), 1);
    }

    #[test]
    fn zero_byte_level_is_skipped() {
        let s = MeasurementSummary::new(
            "z",
            Some(1.0),
            BTreeMap::from([(Precision::Fp64, 10.0)]),
            BTreeMap::from([("L1".to_string(), 10.0), ("DDR".to_string(), 0.0)]),
        )
        .unwrap();
        let set = build_samples(&s);
        assert_eq!(set.samples.len(), 1);
        assert!(set.warnings[0].contains("DDR"));
    }

    #[test]
    fn mixed_precision_series_and_combined_flag() {
        let s = MeasurementSummary::new(
            "mix",
            Some(1.0),
            BTreeMap::from([(Precision::Fp64, 2e9), (Precision::Fp32, 6e9)]),
            BTreeMap::from([("L1".to_string(), 1e9), ("HBM".to_string(), 0.5e9)]),
        )
        .unwrap();
        assert_eq!(build_samples(&s).samples.len(), 4);
        let set = build_samples_with(&s, SampleOptions { combined_total: true });
        let combined: Vec<_> = set.samples.iter().filter(|x| x.precision.is_none()).collect();
        assert_eq!(combined.len(), 2);
        assert_eq!(combined[0].gflops, Some(8.0));
        assert_eq!(combined[1].ai, 16.0);
    }

    #[test]
    fn locality_examples() {
        let mk = |bytes: &[(&str, f64)]| {
            MeasurementSummary::new(
                "l",
                Some(1.0),
                BTreeMap::from([(Precision::Fp64, 1.0)]),
                bytes.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            )
            .unwrap()
        };
        assert_eq!(locality_check(&mk(&[("L1", 10.0), ("L2", 20.0)]), 1.0).len(), 1);
        assert!(locality_check(&mk(&[("L1", 10.0), ("L2", 20.0)]), 2.5).is_empty());
        assert!(locality_check(&mk(&[("L1", 10.0)]), 1.0).is_empty());
    }

    #[test]
    fn works_in_f32() {
        let m = machine(100.0, 50.0).cast::<f32>();
        assert_eq!(attainable_performance(&m, 1.0f32, Precision::Fp64, "HBM").unwrap(), 50.0f32);
        assert_eq!(ridge_point(&m, Precision::Fp64, "HBM").unwrap(), 2.0f32);
    }
}
