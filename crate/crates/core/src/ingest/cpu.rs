use std::collections::BTreeMap;

use super::text::{byte_scale, parse_key_values, time_scale, to_count, KeyValueBlock};
use crate::error::{Error, Result};
use crate::model::{is_known_level, Precision};
use crate::{MeasurementSummary, Summary};

/// Levels the four LIKWID groups (FLOPS_DP, HBM_CACHE, L2, DATA) report.
/// Each slot lists accepted spellings.
const LIKWID_LEVELS: [&[&str]; 4] = [&["L1"], &["L2"], &["MCDRAM", "HBM"], &["DDR", "DRAM"]];

/// Parses a LIKWID result block:
///
/// ```text
/// Time: 10.2243 secs
/// GFLOPS: 5051.923
/// MCDRAM Bytes: 742.8158 GB
/// ```
///
/// `GFLOPS` is the total count in giga-operations over the timed run, not a
/// rate; FP64 FLOPs are `GFLOPS × 1e9`.
pub fn parse_likwid(text: &str) -> Result<Summary> {
    const INPUT: &str = "likwid";
    if text.trim().is_empty() {
        return Err(Error::malformed(INPUT, "empty input"));
    }
    let block = parse_key_values(INPUT, text)?;
    let time = block
        .get("Time")
        .ok_or_else(|| Error::malformed(INPUT, "missing Time line"))?;
    let seconds = time.value * time_scale(INPUT, time)?;
    if seconds <= 0.0 {
        return Err(Error::malformed(INPUT, format!("Time must be > 0, got {seconds}")));
    }
    let gflops = block
        .get("GFLOPS")
        .ok_or_else(|| Error::malformed(INPUT, "missing GFLOPS line"))?;
    if gflops.value < 0.0 {
        return Err(Error::malformed(INPUT, "GFLOPS must be >= 0"));
    }

    let mut warnings = block.warnings.clone();
    let bytes = collect_level_bytes(INPUT, &block, &["Time", "GFLOPS"], &mut warnings)?;
    for slot in LIKWID_LEVELS {
        if !bytes.keys().any(|k| slot.iter().any(|s| k.eq_ignore_ascii_case(s))) {
            warnings.push(format!("likwid: no {} Bytes line, level omitted", slot[0]));
        }
    }

    let flops = BTreeMap::from([(Precision::Fp64, to_count(gflops.value, 1e9))]);
    let label = block.label.clone().unwrap_or_else(|| INPUT.to_string());
    let mut summary = MeasurementSummary::new(label, Some(seconds), flops, bytes)?;
    summary.warnings = warnings;
    Ok(summary)
}

/// Merges an SDE block (`GFLOPS`, `L1 Bytes`, optional `Time`) with a VTune
/// block (`DDR Bytes`, `MCDRAM Bytes`). Bare byte values are GB.
///
/// `vtune == None` yields an L1-only summary with a warning; an empty string
/// for either input is malformed.
pub fn parse_sde_vtune(sde_text: &str, vtune_text: Option<&str>) -> Result<Summary> {
    if sde_text.trim().is_empty() {
        return Err(Error::malformed("sde", "empty SDE input"));
    }
    let sde = parse_key_values("sde", sde_text)?;
    let gflops = sde
        .get("GFLOPS")
        .ok_or_else(|| Error::malformed("sde", "missing GFLOPS line"))?;
    if gflops.value < 0.0 {
        return Err(Error::malformed("sde", "GFLOPS must be >= 0"));
    }
    let seconds = match sde.get("Time") {
        Some(t) => {
            let s = t.value * time_scale("sde", t)?;
            if s <= 0.0 {
                return Err(Error::malformed("sde", format!("Time must be > 0, got {s}")));
            }
            Some(s)
        }
        None => None,
    };

    let mut warnings = sde.warnings.clone();
    let mut bytes = collect_level_bytes("sde", &sde, &["Time", "GFLOPS"], &mut warnings)?;
    let mut label = sde.label.clone();

    match vtune_text {
        None => warnings.push("sde_vtune: no VTune input, only SDE levels present".into()),
        Some(v) if v.trim().is_empty() => {
            return Err(Error::malformed("vtune", "empty VTune input"));
        }
        Some(v) => {
            let vtune = parse_key_values("vtune", v)?;
            warnings.extend(vtune.warnings.iter().cloned());
            for entry in &vtune.entries {
                if let Some(other) = sde.get(&entry.key) {
                    if other.value != entry.value {
                        return Err(Error::malformed(
                            "sde_vtune",
                            format!(
                                "conflicting duplicate key {:?}: SDE {} vs VTune {}",
                                entry.key, other.value, entry.value
                            ),
                        ));
                    }
                }
            }
            let vbytes = collect_level_bytes("vtune", &vtune, &["Time", "GFLOPS"], &mut warnings)?;
            for (level, v) in vbytes {
                if let Some(prev) = bytes.get(&level) {
                    if *prev != v {
                        return Err(Error::malformed(
                            "sde_vtune",
                            format!("conflicting {level} bytes: {prev} vs {v}"),
                        ));
                    }
                }
                bytes.insert(level, v);
            }
            if label.is_none() {
                label = vtune.label.clone();
            }
        }
    }

    let flops = BTreeMap::from([(Precision::Fp64, to_count(gflops.value, 1e9))]);
    let label = label.unwrap_or_else(|| "sde_vtune".to_string());
    let mut summary = MeasurementSummary::new(label, seconds, flops, bytes)?;
    summary.warnings = warnings;
    Ok(summary)
}

/// Collects `<LEVEL> Bytes` entries; other keys (except `skip`) are warned
/// about and ignored.
fn collect_level_bytes(
    input: &str,
    block: &KeyValueBlock,
    skip: &[&str],
    warnings: &mut Vec<String>,
) -> Result<BTreeMap<String, f64>> {
    let mut bytes = BTreeMap::new();
    for entry in &block.entries {
        if skip.iter().any(|k| entry.key.eq_ignore_ascii_case(k)) {
            continue;
        }
        let level = entry
            .key
            .strip_suffix(" Bytes")
            .or_else(|| entry.key.strip_suffix(" bytes"))
            .map(str::trim);
        let Some(level) = level.filter(|l| !l.is_empty()) else {
            warnings.push(format!("{input}: unknown key {:?} ignored", entry.key));
            continue;
        };
        if entry.value < 0.0 {
            return Err(Error::malformed(
                input,
                format!("line {}: negative byte count for {level}", entry.line),
            ));
        }
        if !is_known_level(level) {
            warnings.push(format!("{input}: unrecognized memory level {level:?} kept verbatim"));
        }
        bytes.insert(level.to_string(), to_count(entry.value, byte_scale(input, entry)?));
    }
    Ok(bytes)
}
