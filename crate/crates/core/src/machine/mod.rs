//! Machine ceilings: the JSON ceilings file and a small ERT-style
//! micro-benchmark that measures them on the host.

mod bench;
mod ceilings;
mod fit;

pub use bench::{
    bench_bandwidth_sweep, bench_compute_peak, check_timer_resolution, timer_resolution,
    BandwidthSweep, BenchConfig, ComputePeaks, MONOTONE_NOISE_TOLERANCE, THREADS_ENV,
};
pub use ceilings::{load_ceilings, BandwidthEntry, CeilingsDocument, ComputeEntry, Provenance};
pub use fit::{find_plateaus, fit_ceilings, Plateau, PLATEAU_GAP};
