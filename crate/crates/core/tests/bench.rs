use std::time::Duration;

use hroofline::machine::{bench_bandwidth_sweep, bench_compute_peak, BenchConfig, MONOTONE_NOISE_TOLERANCE};
use hroofline::Precision;

fn config(threads: usize) -> BenchConfig {
    BenchConfig {
        working_set_sizes: vec![1 << 14, 1 << 18, 1 << 24],
        flops_ladder: vec![8, 16],
        trials: 3,
        min_duration: Duration::from_millis(20),
        threads,
    }
}

#[test]
fn doubling_threads_does_not_lose_throughput() {
    let one = bench_compute_peak(&config(1)).unwrap().gflops[&Precision::Fp64];
    let two = bench_compute_peak(&config(2)).unwrap().gflops[&Precision::Fp64];
    assert!(two >= one * 0.9, "1 thread {one:.2} GFLOP/s, 2 threads {two:.2} GFLOP/s");
}

#[test]
fn smallest_working_set_is_fastest() {
    let sweep = bench_bandwidth_sweep(&config(1)).unwrap();
    let smallest = *sweep.points.values().next().unwrap();
    let best = sweep.points.values().cloned().fold(0.0, f64::max);
    assert!(
        smallest >= best * (1.0 - MONOTONE_NOISE_TOLERANCE),
        "{:?}",
        sweep.points
    );
}
