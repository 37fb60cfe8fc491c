use std::collections::BTreeMap;

use super::ceilings::{BandwidthEntry, CeilingsDocument, ComputeEntry, Provenance};
use crate::error::{Error, Result};
use crate::model::Precision;

/// Relative gap from the current plateau's median that starts a new plateau.
/// Cache-boundary drops are typically 2x or more; sweep noise stays well
/// under this.
pub const PLATEAU_GAP: f64 = 0.25;

#[derive(Clone, Debug, PartialEq)]
pub struct Plateau {
    /// Working-set sizes in this plateau, ascending.
    pub sizes: Vec<usize>,
    /// Best bandwidth observed in the plateau, GB/s.
    pub gbs: f64,
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Splits a sweep (ascending sizes) into runs whose points stay within
/// [`PLATEAU_GAP`] of the run's median.
pub fn find_plateaus(sweep: &BTreeMap<usize, f64>) -> Vec<Plateau> {
    let mut plateaus: Vec<(Vec<usize>, Vec<f64>)> = Vec::new();
    for (&size, &gbs) in sweep {
        let start_new = match plateaus.last() {
            None => true,
            Some((_, values)) => {
                let m = median(values);
                (gbs - m).abs() / m > PLATEAU_GAP
            }
        };
        if start_new {
            plateaus.push((vec![size], vec![gbs]));
        } else if let Some((sizes, values)) = plateaus.last_mut() {
            sizes.push(size);
            values.push(gbs);
        }
    }
    plateaus
        .into_iter()
        .map(|(sizes, values)| Plateau {
            sizes,
            gbs: values.iter().copied().fold(f64::MIN, f64::max),
        })
        .collect()
}

/// Turns a bandwidth sweep and compute peaks into a measured ceilings
/// document. Plateaus are named L1, L2, … by descending bandwidth and the
/// slowest is always DRAM.
pub fn fit_ceilings(
    machine: &str,
    sweep: &BTreeMap<usize, f64>,
    peaks: &BTreeMap<Precision, f64>,
) -> Result<CeilingsDocument> {
    if sweep.values().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Bench("sweep contains non-positive bandwidth".into()));
    }
    let mut plateaus = find_plateaus(sweep);
    if plateaus.is_empty() {
        return Err(Error::Bench("sweep has no plateau".into()));
    }
    if peaks.is_empty() {
        return Err(Error::Bench("no compute peaks to attach".into()));
    }
    plateaus.sort_by(|a, b| b.gbs.total_cmp(&a.gbs));
    let n = plateaus.len();
    let bandwidth = plateaus
        .iter()
        .enumerate()
        .map(|(rank, p)| {
            let level = if rank + 1 == n {
                "DRAM".to_string()
            } else {
                format!("L{}", rank + 1)
            };
            BandwidthEntry {
                label: format!(
                    "{level} ({}-{} B)",
                    p.sizes[0],
                    p.sizes[p.sizes.len() - 1]
                ),
                level,
                rank: Some(rank),
                gbs: p.gbs,
            }
        })
        .collect();
    let compute = peaks
        .iter()
        .map(|(&precision, &gflops)| ComputeEntry {
            label: format!("{precision} multiply-add"),
            precision,
            gflops,
        })
        .collect();
    let doc = CeilingsDocument {
        machine: machine.to_string(),
        compute,
        bandwidth,
        provenance: Provenance::Measured,
    };
    doc.to_model::<f64>()?;
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn peaks() -> BTreeMap<Precision, f64> {
        BTreeMap::from([(Precision::Fp64, 50.0)])
    }

    fn step_sweep() -> BTreeMap<usize, f64> {
        (10..=24)
            .map(|p| (1usize << p, if 1usize << p < 1 << 20 { 100.0 } else { 10.0 }))
            .collect()
    }

    #[test]
    fn step_gives_two_plateaus() {
        let doc = fit_ceilings("host", &step_sweep(), &peaks()).unwrap();
        assert_eq!(doc.bandwidth.len(), 2);
        assert_eq!(doc.bandwidth[0].level, "L1");
        assert_eq!(doc.bandwidth[0].gbs, 100.0);
        assert_eq!(doc.bandwidth[1].level, "DRAM");
        assert_eq!(doc.bandwidth[1].gbs, 10.0);
        assert_eq!(doc.provenance, Provenance::Measured);
        let plateaus = find_plateaus(&step_sweep());
        assert_eq!(*plateaus[1].sizes.first().unwrap(), 1 << 20);
    }

    #[test]
    fn flat_sweep_is_dram() {
        let flat: BTreeMap<usize, f64> = (10..20).map(|p| (1usize << p, 42.0)).collect();
        let doc = fit_ceilings("host", &flat, &peaks()).unwrap();
        assert_eq!(doc.bandwidth.len(), 1);
        assert_eq!(doc.bandwidth[0].level, "DRAM");
    }

    #[test]
    fn errors() {
        assert!(matches!(fit_ceilings("h", &BTreeMap::new(), &peaks()), Err(Error::Bench(_))));
        assert!(matches!(fit_ceilings("h", &step_sweep(), &BTreeMap::new()), Err(Error::Bench(_))));
    }

    /// Noise within ±10% must not change plateau membership relative to the
    /// 3-point median-filtered sweep.
    #[test]
    fn noisy_sweep_matches_median_filtered() {
        let base = step_sweep();
        let noise = [0.08, -0.09, 0.1, -0.05, 0.02, -0.1, 0.07, 0.0, -0.08, 0.09, -0.03, 0.05, -0.1, 0.1, 0.04];
        let noisy: BTreeMap<usize, f64> = base
            .iter()
            .zip(noise)
            .map(|((&s, &v), e)| (s, v * (1.0 + e)))
            .collect();
        let vals: Vec<f64> = noisy.values().copied().collect();
        let smoothed: BTreeMap<usize, f64> = noisy
            .keys()
            .enumerate()
            .map(|(i, &s)| {
                let lo = i.saturating_sub(1);
                let hi = (i + 2).min(vals.len());
                (s, median(&vals[lo..hi]))
            })
            .collect();
        let sizes = |m: &BTreeMap<usize, f64>| -> Vec<Vec<usize>> {
            find_plateaus(m).into_iter().map(|p| p.sizes).collect()
        };
        assert_eq!(sizes(&noisy), sizes(&smoothed));
        assert_eq!(sizes(&noisy).len(), 2);
    }
}
