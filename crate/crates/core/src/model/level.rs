use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Floating-point precision class of a FLOP count or compute ceiling.
///
/// `Tensor` counts are only ever produced from tensor-pipe instruction counts
/// multiplied by an explicit coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Precision {
    #[serde(rename = "FP64")]
    Fp64,
    #[serde(rename = "FP32")]
    Fp32,
    #[serde(rename = "FP16")]
    Fp16,
    #[serde(rename = "TENSOR")]
    Tensor,
}

impl Precision {
    pub const ALL: [Precision; 4] = [
        Precision::Fp64,
        Precision::Fp32,
        Precision::Fp16,
        Precision::Tensor,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Precision::Fp64 => "FP64",
            Precision::Fp32 => "FP32",
            Precision::Fp16 => "FP16",
            Precision::Tensor => "TENSOR",
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fp64" | "double" | "dp" => Ok(Precision::Fp64),
            "fp32" | "single" | "sp" => Ok(Precision::Fp32),
            "fp16" | "half" | "hp" => Ok(Precision::Fp16),
            "tensor" => Ok(Precision::Tensor),
            _ => Err(Error::config("precision", format!("unknown precision {s:?}"))),
        }
    }
}

/// One level of a memory hierarchy. Rank 0 is closest to compute.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MemoryLevel {
    pub name: String,
    pub rank: usize,
}

impl MemoryLevel {
    pub fn new(name: impl Into<String>, rank: usize) -> Self {
        MemoryLevel {
            name: name.into(),
            rank,
        }
    }
}

impl fmt::Display for MemoryLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn level_class(name: &str) -> u8 {
    match name.to_ascii_uppercase().as_str() {
        "L1" => 0,
        "L2" => 1,
        "L3" => 2,
        "LLC" => 3,
        "HBM" | "MCDRAM" => 4,
        "DDR" | "DRAM" | "MEMORY" => 5,
        _ => 6,
    }
}

/// Orders level names nearest-first: L1, L2, L3, LLC, HBM/MCDRAM,
/// DDR/DRAM, then unknown names alphabetically.
pub fn canonical_level_order(a: &str, b: &str) -> Ordering {
    level_class(a)
        .cmp(&level_class(b))
        .then_with(|| a.cmp(b))
}

pub(crate) fn is_known_level(name: &str) -> bool {
    level_class(name) < 6
}
