use std::collections::BTreeSet;

use super::gpu::{shared_ncu_names, signature_names};
use super::AdapterId;
use crate::error::{Error, Result};

/// Identifies the input format from signature metric names and keys.
///
/// GPU formats are tried in the order ncu2020, ncu2019, nvprof (the first
/// whose byte/transaction metrics appear wins); CPU formats in the order
/// likwid (`Time` and `GFLOPS` keys), sde_vtune (`GFLOPS` without `Time`, or
/// bare `<LEVEL> Bytes` keys). Input matching both a GPU and a CPU format, or
/// only the Nsight Compute time/FLOP rows, is ambiguous.
pub fn detect_adapter(text: &str) -> Result<AdapterId> {
    if text.trim().is_empty() {
        return Err(Error::malformed("input", "empty input"));
    }
    let mut names = BTreeSet::new();
    let mut keys = BTreeSet::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((first, _)) = line.split_once(',') {
            names.insert(first.trim().trim_matches('"').to_string());
        } else if let Some((key, value)) = line.split_once(':') {
            let numeric = value
                .split_whitespace()
                .next()
                .is_some_and(|v| v.parse::<f64>().is_ok());
            if numeric {
                keys.insert(key.trim().to_ascii_lowercase());
            }
        }
    }

    let gpu = [AdapterId::Ncu2020, AdapterId::Ncu2019, AdapterId::Nvprof]
        .into_iter()
        .find(|a| signature_names(*a).iter().any(|n| names.contains(*n)));

    let has = |k: &str| keys.contains(k);
    let level_bytes = keys.iter().any(|k| k.ends_with(" bytes"));
    let cpu = if has("gflops") && has("time") {
        Some(AdapterId::Likwid)
    } else if has("gflops") || level_bytes {
        Some(AdapterId::SdeVtune)
    } else {
        None
    };

    match (gpu, cpu) {
        (Some(g), Some(c)) => Err(Error::UnrecognizedFormat {
            candidates: vec![g.to_string(), c.to_string()],
        }),
        (Some(a), None) | (None, Some(a)) => Ok(a),
        (None, None) if shared_ncu_names().iter().any(|n| names.contains(*n)) => {
            Err(Error::UnrecognizedFormat {
                candidates: vec![AdapterId::Ncu2019.to_string(), AdapterId::Ncu2020.to_string()],
            })
        }
        (None, None) => Err(Error::UnrecognizedFormat { candidates: vec![] }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signatures() {
        assert_eq!(detect_adapter("dram__bytes.sum,1000\n").unwrap(), AdapterId::Ncu2020);
        assert_eq!(detect_adapter("dram_read_transactions,10\n").unwrap(), AdapterId::Nvprof);
        assert_eq!(detect_adapter("lts__t_sectors_op_read.sum,4\n").unwrap(), AdapterId::Ncu2019);
        assert_eq!(detect_adapter("Time: 1 secs\nGFLOPS: 2\n").unwrap(), AdapterId::Likwid);
        assert_eq!(detect_adapter("GFLOPS: 2\nL1 Bytes: 3\n").unwrap(), AdapterId::SdeVtune);
        assert_eq!(detect_adapter("DDR Bytes: 0.7\n").unwrap(), AdapterId::SdeVtune);
    }

    #[test]
    fn priority_within_gpu_family() {
        let both = "dram__bytes.sum,1\ndram__sectors_read.sum,1\n";
        assert_eq!(detect_adapter(both).unwrap(), AdapterId::Ncu2020);
    }

    #[test]
    fn unrecognized_and_ambiguous() {
        let err = detect_adapter("The quick brown fox jumps over the lazy dog.\n").unwrap_err();
        assert!(matches!(err, Error::UnrecognizedFormat { ref candidates } if candidates.is_empty()));

        let err = detect_adapter("sm__cycles_elapsed.avg,1\n").unwrap_err();
        assert!(matches!(err, Error::UnrecognizedFormat { ref candidates } if candidates.len() == 2));

        let err = detect_adapter("dram__bytes.sum,1\nGFLOPS: 2\n").unwrap_err();
        assert!(err.to_string().contains("likwid") || err.to_string().contains("sde_vtune"));
    }
}
