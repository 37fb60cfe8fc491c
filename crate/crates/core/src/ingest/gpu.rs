use std::collections::BTreeMap;

use super::coefficients::{CoefficientTable, MetricClass};
use super::{AdapterId, MetricRecord};
use crate::error::{Error, Result};
use crate::model::Precision;
use crate::{MeasurementSummary, Summary};

#[derive(Clone, Copy, Debug)]
enum Role {
    /// FLOP instruction count; FMA carries weight 2.
    Flop(Precision, f64),
    TensorInstructions,
    Cycles,
    CyclesPerSecond,
    Bytes(&'static str, MetricClass),
    /// Recorded as metadata, never converted (nvprof tensor utilization is a 0-10 level).
    Metadata,
}

type MetricTable = &'static [(&'static str, Role)];

const L1: &str = "L1";
const L2: &str = "L2";
const HBM: &str = "HBM";

const NVPROF: MetricTable = &[
    ("flop_count_dp", Role::Flop(Precision::Fp64, 1.0)),
    ("flop_count_sp", Role::Flop(Precision::Fp32, 1.0)),
    ("flop_count_hp", Role::Flop(Precision::Fp16, 1.0)),
    ("tensor_precision_fu_utilization", Role::Metadata),
    ("gld_transactions", Role::Bytes(L1, MetricClass::Transaction)),
    ("gst_transactions", Role::Bytes(L1, MetricClass::Transaction)),
    ("atomic_transactions", Role::Bytes(L1, MetricClass::Transaction)),
    ("local_load_transactions", Role::Bytes(L1, MetricClass::Transaction)),
    ("local_store_transactions", Role::Bytes(L1, MetricClass::Transaction)),
    ("shared_load_transactions", Role::Bytes(L1, MetricClass::SharedTransaction)),
    ("shared_store_transactions", Role::Bytes(L1, MetricClass::SharedTransaction)),
    ("l2_read_transactions", Role::Bytes(L2, MetricClass::Transaction)),
    ("l2_write_transactions", Role::Bytes(L2, MetricClass::Transaction)),
    ("dram_read_transactions", Role::Bytes(HBM, MetricClass::Transaction)),
    ("dram_write_transactions", Role::Bytes(HBM, MetricClass::Transaction)),
];

/// Time, FLOP and tensor rows shared verbatim by both Nsight Compute tables.
const NCU_COMMON: MetricTable = &[
    ("sm__cycles_elapsed.avg", Role::Cycles),
    ("sm__cycles_elapsed.avg.per_second", Role::CyclesPerSecond),
    ("sm__sass_thread_inst_executed_op_dadd_pred_on.sum", Role::Flop(Precision::Fp64, 1.0)),
    ("sm__sass_thread_inst_executed_op_dmul_pred_on.sum", Role::Flop(Precision::Fp64, 1.0)),
    ("sm__sass_thread_inst_executed_op_dfma_pred_on.sum", Role::Flop(Precision::Fp64, 2.0)),
    ("sm__sass_thread_inst_executed_op_fadd_pred_on.sum", Role::Flop(Precision::Fp32, 1.0)),
    ("sm__sass_thread_inst_executed_op_fmul_pred_on.sum", Role::Flop(Precision::Fp32, 1.0)),
    ("sm__sass_thread_inst_executed_op_ffma_pred_on.sum", Role::Flop(Precision::Fp32, 2.0)),
    ("sm__sass_thread_inst_executed_op_hadd_pred_on.sum", Role::Flop(Precision::Fp16, 1.0)),
    ("sm__sass_thread_inst_executed_op_hmul_pred_on.sum", Role::Flop(Precision::Fp16, 1.0)),
    ("sm__sass_thread_inst_executed_op_hfma_pred_on.sum", Role::Flop(Precision::Fp16, 2.0)),
    ("sm__inst_executed_pipe_tensor.sum", Role::TensorInstructions),
];

const NCU2019_BYTES: MetricTable = &[
    ("l1tex__t_sectors_pipe_lsu_mem_global_op_ld.sum", Role::Bytes(L1, MetricClass::Sector)),
    ("l1tex__t_bytes_pipe_lsu_mem_global_op_st.sum", Role::Bytes(L1, MetricClass::Bytes)),
    ("l1tex__t_set_accesses_pipe_lsu_mem_global_op_atom.sum", Role::Bytes(L1, MetricClass::SetAccess)),
    ("l1tex__t_set_accesses_pipe_lsu_mem_global_op_red.sum", Role::Bytes(L1, MetricClass::SetAccess)),
    ("l1tex__t_set_accesses_pipe_tex_mem_surface_op_atom.sum", Role::Bytes(L1, MetricClass::SetAccess)),
    ("l1tex__t_set_accesses_pipe_tex_mem_surface_op_red.sum", Role::Bytes(L1, MetricClass::SetAccess)),
    ("l1tex__t_sectors_pipe_lsu_mem_local_op_ld.sum", Role::Bytes(L1, MetricClass::Sector)),
    ("l1tex__t_sectors_pipe_lsu_mem_local_op_st.sum", Role::Bytes(L1, MetricClass::Sector)),
    ("l1tex__data_pipe_lsu_wavefronts_mem_shared_op_ld.sum", Role::Bytes(L1, MetricClass::SharedWavefront)),
    ("l1tex__data_pipe_lsu_wavefronts_mem_shared_op_st.sum", Role::Bytes(L1, MetricClass::SharedWavefront)),
    ("lts__t_sectors_op_read.sum", Role::Bytes(L2, MetricClass::Sector)),
    ("lts__t_sectors_op_write.sum", Role::Bytes(L2, MetricClass::Sector)),
    ("lts__t_sectors_op_atom.sum", Role::Bytes(L2, MetricClass::Sector)),
    ("lts__t_sectors_op_red.sum", Role::Bytes(L2, MetricClass::Sector)),
    ("dram__sectors_read.sum", Role::Bytes(HBM, MetricClass::Sector)),
    ("dram__sectors_write.sum", Role::Bytes(HBM, MetricClass::Sector)),
];

const NCU2020_BYTES: MetricTable = &[
    ("l1tex__t_bytes.sum", Role::Bytes(L1, MetricClass::Bytes)),
    ("lts__t_bytes.sum", Role::Bytes(L2, MetricClass::Bytes)),
    ("dram__bytes.sum", Role::Bytes(HBM, MetricClass::Bytes)),
];

/// Metric names an adapter maps, in table order (empty for CPU adapters).
pub fn known_metrics(adapter: AdapterId) -> Vec<&'static str> {
    tables(adapter)
        .iter()
        .flat_map(|t| t.iter().map(|(n, _)| *n))
        .collect()
}

/// Metric names that only the given GPU adapter uses (excludes the shared
/// Nsight Compute time/FLOP rows).
pub(crate) fn signature_names(adapter: AdapterId) -> Vec<&'static str> {
    match adapter {
        AdapterId::Nvprof => NVPROF.iter().map(|(n, _)| *n).collect(),
        AdapterId::Ncu2019 => NCU2019_BYTES.iter().map(|(n, _)| *n).collect(),
        AdapterId::Ncu2020 => NCU2020_BYTES.iter().map(|(n, _)| *n).collect(),
        AdapterId::Likwid | AdapterId::SdeVtune => Vec::new(),
    }
}

pub(crate) fn shared_ncu_names() -> Vec<&'static str> {
    NCU_COMMON.iter().map(|(n, _)| *n).collect()
}

fn tables(adapter: AdapterId) -> Vec<MetricTable> {
    match adapter {
        AdapterId::Nvprof => vec![NVPROF],
        AdapterId::Ncu2019 => vec![NCU_COMMON, NCU2019_BYTES],
        AdapterId::Ncu2020 => vec![NCU_COMMON, NCU2020_BYTES],
        AdapterId::Likwid | AdapterId::SdeVtune => Vec::new(),
    }
}

/// Records read from a `metric,value[,unit]` export.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricCsv {
    pub records: Vec<MetricRecord>,
    /// From a `# kernel: NAME` (or `# label: NAME`) comment line.
    pub label: Option<String>,
}

/// Parses the normalized GPU metric CSV. A leading `metric,value` header,
/// `#` comments, quoted fields and thousands separators inside quoted values
/// are accepted.
pub fn parse_metric_csv(text: &str) -> Result<MetricCsv> {
    const INPUT: &str = "metric csv";
    let mut out = MetricCsv::default();
    for line in text.lines() {
        let Some(comment) = line.trim().strip_prefix('#') else {
            continue;
        };
        if let Some((key, value)) = comment.split_once(':') {
            let key = key.trim();
            if key.eq_ignore_ascii_case("kernel") || key.eq_ignore_ascii_case("label") {
                out.label = Some(value.trim().to_string());
            }
        }
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    for (idx, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::malformed(INPUT, e.to_string()))?;
        let line = row.position().map_or(idx + 1, |p| p.line() as usize);
        if row.iter().all(str::is_empty) {
            continue;
        }
        if row.len() < 2 {
            return Err(Error::malformed(INPUT, format!("line {line}: expected metric,value")));
        }
        let name = &row[0];
        let raw = row[1].replace(',', "");
        let value: f64 = match raw.parse() {
            Ok(v) => v,
            Err(_) if out.records.is_empty() && name.eq_ignore_ascii_case("metric") => continue,
            Err(_) => {
                return Err(Error::malformed(
                    INPUT,
                    format!("line {line}: value {:?} of {name} is not a number", &row[1]),
                ))
            }
        };
        let mut record = MetricRecord::new(name, value)
            .map_err(|e| Error::malformed(INPUT, format!("line {line}: {e}")))?;
        record.unit = row.get(2).filter(|u| !u.is_empty()).map(str::to_string);
        out.records.push(record);
    }
    Ok(out)
}

/// Maps nvprof metrics. `seconds` comes from the GPU kernel summary, which the
/// metric export does not carry.
pub fn map_nvprof(records: &[MetricRecord], seconds: f64, coeffs: &CoefficientTable) -> Result<Summary> {
    if !(seconds.is_finite() && seconds > 0.0) {
        return Err(Error::malformed("nvprof", format!("seconds must be > 0, got {seconds}")));
    }
    map_records(AdapterId::Nvprof, records, Some(seconds), coeffs)
}

/// Maps Nsight Compute 2019 metrics: FLOPs are add + mul + 2 × fma per
/// precision; bytes come from sectors, set accesses and wavefronts through the
/// coefficient table.
pub fn map_ncu2019(records: &[MetricRecord], coeffs: &CoefficientTable) -> Result<Summary> {
    map_records(AdapterId::Ncu2019, records, None, coeffs)
}

/// Maps Nsight Compute 2020 metrics: same time and FLOP rules as
/// [`map_ncu2019`], bytes taken verbatim per level.
pub fn map_ncu2020(records: &[MetricRecord], coeffs: &CoefficientTable) -> Result<Summary> {
    map_records(AdapterId::Ncu2020, records, None, coeffs)
}

fn map_records(
    adapter: AdapterId,
    records: &[MetricRecord],
    seconds: Option<f64>,
    coeffs: &CoefficientTable,
) -> Result<Summary> {
    let input = adapter.as_str();
    if records.is_empty() {
        return Err(Error::malformed(input, "no metric records"));
    }
    let mut values: BTreeMap<&str, f64> = BTreeMap::new();
    for r in records {
        if r.value < 0.0 || !r.value.is_finite() {
            return Err(Error::malformed(input, format!("{}: invalid value {}", r.name, r.value)));
        }
        if let Some(prev) = values.insert(&r.name, r.value) {
            if prev != r.value {
                return Err(Error::malformed(
                    input,
                    format!("conflicting duplicate metric {}: {prev} vs {}", r.name, r.value),
                ));
            }
        }
    }

    let tables = tables(adapter);
    let lookup = |name: &str| {
        tables
            .iter()
            .flat_map(|t| t.iter())
            .find(|(n, _)| *n == name)
            .map(|(_, role)| *role)
    };

    let mut warnings = Vec::new();
    let mut flops: BTreeMap<Precision, f64> = BTreeMap::new();
    let mut bytes: BTreeMap<String, f64> = BTreeMap::new();
    let mut metadata = BTreeMap::new();
    let mut cycles = None;
    let mut rate = None;
    for (&name, &value) in &values {
        match lookup(name) {
            None => warnings.push(format!("{input}: unknown metric {name} ignored")),
            Some(Role::Flop(p, weight)) => *flops.entry(p).or_default() += weight * value,
            Some(Role::TensorInstructions) => {
                let k = coeffs.multiplier(name, MetricClass::TensorInstruction);
                *flops.entry(Precision::Tensor).or_default() += k * value;
            }
            Some(Role::Cycles) => cycles = Some(value),
            Some(Role::CyclesPerSecond) => rate = Some(value),
            Some(Role::Bytes(level, class)) => {
                *bytes.entry(level.to_string()).or_default() += coeffs.multiplier(name, class) * value;
            }
            Some(Role::Metadata) => {
                metadata.insert(name.to_string(), value);
            }
        }
    }

    let seconds = match seconds {
        Some(s) => s,
        None => {
            let (Some(c), Some(r)) = (cycles, rate) else {
                return Err(Error::MissingTimeBasis(format!(
                    "{input}: need both sm__cycles_elapsed.avg and sm__cycles_elapsed.avg.per_second"
                )));
            };
            if c <= 0.0 || r <= 0.0 {
                return Err(Error::MissingTimeBasis(format!(
                    "{input}: cycle count and rate must be > 0 (got {c}, {r})"
                )));
            }
            c / r
        }
    };
    if flops.is_empty() {
        return Err(Error::malformed(input, "no FLOP metrics"));
    }
    if bytes.is_empty() {
        warnings.push(format!("{input}: no memory-level byte metrics"));
    }

    let mut summary = MeasurementSummary::new(input, Some(seconds), flops, bytes)?;
    summary.metadata = metadata;
    summary.warnings = warnings;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recs(pairs: &[(&str, f64)]) -> Vec<MetricRecord> {
        pairs.iter().map(|(n, v)| MetricRecord::new(*n, *v).unwrap()).collect()
    }

    const CYCLES: [(&str, f64); 2] = [
        ("sm__cycles_elapsed.avg", 2e9),
        ("sm__cycles_elapsed.avg.per_second", 1e9),
    ];

    #[test]
    fn nvprof_example() {
        let s = map_nvprof(
            &recs(&[
                ("flop_count_dp", 1000.0),
                ("dram_read_transactions", 10.0),
                ("dram_write_transactions", 5.0),
            ]),
            1.0,
            &CoefficientTable::default(),
        )
        .unwrap();
        assert_eq!(s.flops[&Precision::Fp64], 1000.0);
        assert_eq!(s.bytes["HBM"], 480.0);
        assert_eq!(s.seconds, Some(1.0));
    }

    #[test]
    fn nvprof_shared_and_tensor_metadata() {
        let s = map_nvprof(
            &recs(&[
                ("flop_count_sp", 10.0),
                ("shared_load_transactions", 1.0),
                ("gld_transactions", 1.0),
                ("tensor_precision_fu_utilization", 7.0),
            ]),
            1.0,
            &CoefficientTable::default(),
        )
        .unwrap();
        assert_eq!(s.bytes["L1"], 160.0);
        assert!(!s.flops.contains_key(&Precision::Tensor));
        assert_eq!(s.metadata["tensor_precision_fu_utilization"], 7.0);
    }

    #[test]
    fn nvprof_errors() {
        let t = CoefficientTable::default();
        assert!(matches!(map_nvprof(&[], 1.0, &t), Err(Error::MalformedInput { .. })));
        assert!(map_nvprof(&recs(&[("flop_count_dp", -1.0)]), 1.0, &t).is_err());
        let s = map_nvprof(&recs(&[("flop_count_dp", 1.0), ("bogus", 1.0)]), 1.0, &t).unwrap();
        assert!(s.bytes.is_empty());
        assert_eq!(s.warnings.len(), 2);
    }

    #[test]
    fn ncu2019_time_flops_bytes() {
        let t = CoefficientTable::default();
        let mut r = CYCLES.to_vec();
        r.extend([
            ("sm__sass_thread_inst_executed_op_dadd_pred_on.sum", 100.0),
            ("sm__sass_thread_inst_executed_op_dmul_pred_on.sum", 50.0),
            ("sm__sass_thread_inst_executed_op_dfma_pred_on.sum", 25.0),
            ("lts__t_sectors_op_read.sum", 4.0),
            ("lts__t_sectors_op_write.sum", 0.0),
            ("lts__t_sectors_op_atom.sum", 0.0),
            ("lts__t_sectors_op_red.sum", 0.0),
            ("l1tex__t_bytes_pipe_lsu_mem_global_op_st.sum", 100.0),
            ("l1tex__data_pipe_lsu_wavefronts_mem_shared_op_ld.sum", 1.0),
            ("sm__inst_executed_pipe_tensor.sum", 2.0),
        ]);
        let s = map_ncu2019(&recs(&r), &t).unwrap();
        assert_eq!(s.seconds, Some(2.0));
        assert_eq!(s.flops[&Precision::Fp64], 200.0);
        assert_eq!(s.flops[&Precision::Tensor], 1024.0);
        assert_eq!(s.bytes["L2"], 128.0);
        assert_eq!(s.bytes["L1"], 228.0);
    }

    #[test]
    fn ncu_missing_time_basis() {
        let t = CoefficientTable::default();
        let r = recs(&[
            ("sm__cycles_elapsed.avg", 1.0),
            ("sm__sass_thread_inst_executed_op_dadd_pred_on.sum", 1.0),
        ]);
        assert!(matches!(map_ncu2019(&r, &t), Err(Error::MissingTimeBasis(_))));
        assert!(matches!(map_ncu2020(&r, &t), Err(Error::MissingTimeBasis(_))));
    }

    #[test]
    fn ncu2020_verbatim_bytes() {
        let t = CoefficientTable::default();
        let mut r = CYCLES.to_vec();
        r.extend([
            ("sm__sass_thread_inst_executed_op_dfma_pred_on.sum", 1.0),
            ("dram__bytes.sum", 1000.0),
        ]);
        let s = map_ncu2020(&recs(&r), &t).unwrap();
        assert_eq!(s.bytes["HBM"], 1000.0);
        assert_eq!(s.flops[&Precision::Fp64], 2.0);
    }

    #[test]
    fn csv_grammar() {
        let csv = parse_metric_csv(
            "# kernel: NumBandNgpown_kernel\nmetric,value\n\"dram__bytes.sum\",\"1,000\",byte\nflop_count_dp, 5\n",
        )
        .unwrap();
        assert_eq!(csv.label.as_deref(), Some("NumBandNgpown_kernel"));
        assert_eq!(csv.records.len(), 2);
        assert_eq!(csv.records[0].value, 1000.0);
        assert_eq!(csv.records[0].unit.as_deref(), Some("byte"));
        assert!(parse_metric_csv("dram__bytes.sum\n").is_err());
        assert!(parse_metric_csv("dram__bytes.sum,lots\n").is_err());
    }
}
