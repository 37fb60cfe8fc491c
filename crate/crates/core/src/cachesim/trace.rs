use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AccessKind {
    Read,
    Write,
}

/// One load or store. Accesses crossing a line boundary are split per line
/// by the simulator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AccessEvent {
    pub address: u64,
    pub size: u32,
    pub kind: AccessKind,
}

pub type AccessTrace = Vec<AccessEvent>;

impl AccessEvent {
    pub const MAX_SIZE: u32 = 64;

    pub fn new(address: u64, size: u32, kind: AccessKind) -> Result<Self> {
        if size == 0 || size > Self::MAX_SIZE {
            return Err(Error::config(
                "event.size",
                format!("access size must be 1..={}, got {size}", Self::MAX_SIZE),
            ));
        }
        if address.checked_add(size as u64 - 1).is_none() {
            return Err(Error::config("event.address", "access overflows the address space"));
        }
        Ok(AccessEvent { address, size, kind })
    }

    pub fn read(address: u64, size: u32) -> Self {
        AccessEvent::new(address, size, AccessKind::Read).expect("valid read")
    }

    pub fn write(address: u64, size: u32) -> Self {
        AccessEvent::new(address, size, AccessKind::Write).expect("valid write")
    }

    pub fn is_write(&self) -> bool {
        self.kind == AccessKind::Write
    }
}

/// Parses a trace file: one `R|W <hex-address> <size>` event per line.
/// Blank lines and `#` comments are skipped.
pub fn parse_trace(text: &str) -> Result<AccessTrace> {
    let mut trace = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| Error::malformed("trace", format!("line {}: {msg}", idx + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [kind, addr, size] = fields[..] else {
            return Err(bad(format!("expected `R|W <hex-address> <size>`, got {line:?}")));
        };
        let kind = match kind {
            "R" | "r" => AccessKind::Read,
            "W" | "w" => AccessKind::Write,
            other => return Err(bad(format!("unknown access kind {other:?}"))),
        };
        let hex = addr.trim_start_matches("0x").trim_start_matches("0X");
        let address =
            u64::from_str_radix(hex, 16).map_err(|_| bad(format!("bad hex address {addr:?}")))?;
        let size: u32 = size.parse().map_err(|_| bad(format!("bad size {size:?}")))?;
        trace.push(AccessEvent::new(address, size, kind).map_err(|e| bad(e.to_string()))?);
    }
    Ok(trace)
}

pub fn write_trace(trace: &[AccessEvent]) -> String {
    let mut out = String::with_capacity(trace.len() * 16);
    for e in trace {
        let k = if e.is_write() { 'W' } else { 'R' };
        let _ = writeln!(out, "{k} {:x} {}", e.address, e.size);
    }
    out
}
