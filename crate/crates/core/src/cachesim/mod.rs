//! Trace-driven, inclusive, write-back/write-allocate LRU cache hierarchy
//! simulator and the synthetic workloads it runs.
//!
//! Simulated byte counts are qualitative: there are no prefetchers, victim
//! caches or timing. They are checked by ordering properties and against the
//! stack-distance oracle, not against hardware measurements.

mod config;
mod oracle;
mod sim;
mod trace;
mod workloads;

pub use config::{CacheLevelConfig, HierarchyConfig, WritePolicy};
pub use oracle::stack_distance_oracle;
pub use sim::{simulate, LevelStats, MemoryStats, SimResult, Simulator};
pub use trace::{parse_trace, write_trace, AccessEvent, AccessKind, AccessTrace};
pub use workloads::{
    flops_for_gpp, gen_gpp_trace, gen_stream_triad, GppLayout, GppParams,
    GPP_FLOPS_PER_ITERATION, MAX_TRACE_EVENTS,
};
