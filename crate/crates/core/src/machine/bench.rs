use std::collections::BTreeMap;
use std::hint::black_box;
use std::sync::Barrier;
use std::thread;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::model::Precision;
use crate::scalar::Scalar;

/// Environment variable read for the worker count.
pub const THREADS_ENV: &str = "ROOFLINE_THREADS";

/// Relative rise between consecutive sweep points tolerated before the sweep
/// is reported as non-monotone.
pub const MONOTONE_NOISE_TOLERANCE: f64 = 0.15;

/// Independent accumulators per worker, enough to hide FMA latency.
const LANES: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    /// Total bytes per sweep point, ascending.
    pub working_set_sizes: Vec<usize>,
    /// FLOPs per accumulator per iteration for the compute kernel.
    pub flops_ladder: Vec<u32>,
    pub trials: u32,
    pub min_duration: Duration,
    pub threads: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            working_set_sizes: (12..=28).map(|p| 1usize << p).collect(),
            flops_ladder: vec![2, 4, 8, 16, 32, 64],
            trials: 3,
            min_duration: Duration::from_millis(20),
            threads: Self::threads_from_env(),
        }
    }
}

impl BenchConfig {
    /// `ROOFLINE_THREADS` if set to a positive integer, else the host's
    /// available parallelism.
    pub fn threads_from_env() -> usize {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&n: &usize| n > 0)
            .unwrap_or_else(|| thread::available_parallelism().map_or(1, |n| n.get()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 3 {
            return Err(Error::config("bench.trials", format!("must be >= 3, got {}", self.trials)));
        }
        if self.threads == 0 {
            return Err(Error::config("bench.threads", "must be >= 1"));
        }
        if self.min_duration.is_zero() {
            return Err(Error::config("bench.min_duration", "must be > 0"));
        }
        if self.working_set_sizes.contains(&0) {
            return Err(Error::config("bench.working_set_sizes", "sizes must be > 0"));
        }
        if self.working_set_sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("bench.working_set_sizes", "sizes must be strictly ascending"));
        }
        Ok(())
    }
}

/// Smallest non-zero step observed between successive clock reads.
pub fn timer_resolution() -> Duration {
    let mut best = Duration::MAX;
    for _ in 0..1000 {
        let a = Instant::now();
        let mut b = Instant::now();
        while b == a {
            b = Instant::now();
        }
        best = best.min(b - a);
    }
    best
}

/// Fails unless `min_duration` spans at least 100 clock ticks.
pub fn check_timer_resolution(resolution: Duration, min_duration: Duration) -> Result<()> {
    if resolution.saturating_mul(100) > min_duration {
        return Err(Error::Bench(format!(
            "timer resolution {resolution:?} is too coarse for a {min_duration:?} minimum duration"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComputePeaks {
    /// Best rate over all trials per precision.
    pub gflops: BTreeMap<Precision, f64>,
    /// Each trial's best rate over the ladder, per precision.
    pub trials: BTreeMap<Precision, Vec<f64>>,
    pub ladder: Vec<u32>,
    pub threads: usize,
}

fn fma_kernel<T: Scalar>(iterations: u64, pairs: u32) -> T {
    let mut acc = [T::one(); LANES];
    let a = black_box(T::of(0.999_999));
    let b = black_box(T::of(1e-7));
    for _ in 0..iterations {
        for _ in 0..pairs {
            for x in acc.iter_mut() {
                *x = *x * a + b;
            }
        }
    }
    acc.iter().fold(T::zero(), |s, &x| s + x)
}

/// Runs `work(iterations)` on every thread between a shared start barrier
/// and the final join; returns wall time.
fn timed_parallel<F>(threads: usize, work: F) -> Duration
where
    F: Fn() + Sync,
{
    let barrier = Barrier::new(threads + 1);
    thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| {
                barrier.wait();
                work();
            });
        }
        barrier.wait();
        let start = Instant::now();
        // scope joins every worker before returning
        start
    })
    .elapsed()
}

/// Doubles `iterations` until one run lasts at least `min`.
fn calibrate(min: Duration, mut run: impl FnMut(u64) -> Duration) -> (u64, Duration) {
    let mut iterations = 64;
    loop {
        let elapsed = run(iterations);
        if elapsed >= min || iterations > u64::MAX / 4 {
            return (iterations, elapsed);
        }
        iterations *= 2;
    }
}

fn compute_trial<T: Scalar>(config: &BenchConfig) -> f64 {
    let mut best: f64 = 0.0;
    for &flops in &config.flops_ladder {
        let pairs = (flops / 2).max(1);
        let (iterations, elapsed) = calibrate(config.min_duration, |n| {
            timed_parallel(config.threads, || {
                black_box(fma_kernel::<T>(black_box(n), pairs));
            })
        });
        let total = iterations as f64 * pairs as f64 * 2.0 * LANES as f64 * config.threads as f64;
        best = best.max(total / elapsed.as_secs_f64() / 1e9);
    }
    best
}

/// Peak GFLOP/s for FP64 and FP32 from a multiply-add chain ladder on
/// in-register data. Reports the maximum over trials.
pub fn bench_compute_peak(config: &BenchConfig) -> Result<ComputePeaks> {
    config.validate()?;
    if config.flops_ladder.is_empty() {
        return Err(Error::config("bench.flops_ladder", "ladder is empty"));
    }
    if config.flops_ladder.iter().any(|&f| f < 2) {
        return Err(Error::config("bench.flops_ladder", "entries must be >= 2"));
    }
    check_timer_resolution(timer_resolution(), config.min_duration)?;

    let mut gflops = BTreeMap::new();
    let mut trials = BTreeMap::new();
    for precision in [Precision::Fp64, Precision::Fp32] {
        let rates: Vec<f64> = (0..config.trials)
            .map(|_| match precision {
                Precision::Fp32 => compute_trial::<f32>(config),
                _ => compute_trial::<f64>(config),
            })
            .collect();
        let best = rates.iter().copied().fold(0.0, f64::max);
        if !(best.is_finite() && best > 0.0) {
            return Err(Error::Bench(format!("{precision} measurement produced {best}")));
        }
        gflops.insert(precision, best);
        trials.insert(precision, rates);
    }
    Ok(ComputePeaks {
        gflops,
        trials,
        ladder: config.flops_ladder.clone(),
        threads: config.threads,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BandwidthSweep {
    /// Working-set bytes → GB/s.
    pub points: BTreeMap<usize, f64>,
    /// Non-monotone steps beyond the noise tolerance (reported, not fatal).
    pub warnings: Vec<String>,
}

fn stream_pass(x: &mut [f64], y: &[f64], s: f64) {
    for (xi, yi) in x.iter_mut().zip(y) {
        *xi = *xi * s + *yi;
    }
}

/// Streaming read-modify-write sweep (`x[i] = x[i] * s + y[i]`) over each
/// working-set size, split across workers that own their buffers.
/// GB/s = bytes touched / elapsed, best of `trials`.
pub fn bench_bandwidth_sweep(config: &BenchConfig) -> Result<BandwidthSweep> {
    config.validate()?;
    if config.working_set_sizes.is_empty() {
        return Err(Error::config("bench.working_set_sizes", "no sizes"));
    }
    check_timer_resolution(timer_resolution(), config.min_duration)?;

    let mut points = BTreeMap::new();
    for &size in &config.working_set_sizes {
        let per_thread = (size / config.threads / 16).max(1);
        let mut buffers: Vec<(Vec<f64>, Vec<f64>)> = (0..config.threads)
            .map(|_| (vec![1.0; per_thread], vec![0.5; per_thread]))
            .collect();
        let s = black_box(0.999_999);
        let mut best: f64 = 0.0;
        for _ in 0..config.trials {
            let (passes, elapsed) = calibrate(config.min_duration, |n| {
                let barrier = Barrier::new(config.threads + 1);
                thread::scope(|scope| {
                    for (x, y) in buffers.iter_mut() {
                        let barrier = &barrier;
                        scope.spawn(move || {
                            barrier.wait();
                            for _ in 0..n {
                                stream_pass(x, y, s);
                                black_box(&mut *x);
                            }
                        });
                    }
                    barrier.wait();
                    Instant::now()
                })
                .elapsed()
            });
            let bytes = passes as f64 * per_thread as f64 * 24.0 * config.threads as f64;
            best = best.max(bytes / elapsed.as_secs_f64() / 1e9);
        }
        if !(best.is_finite() && best > 0.0) {
            return Err(Error::Bench(format!("bandwidth at {size} B produced {best}")));
        }
        points.insert(size, best);
    }

    let warnings = monotonicity_warnings(&points);
    Ok(BandwidthSweep { points, warnings })
}

pub(crate) fn monotonicity_warnings(points: &BTreeMap<usize, f64>) -> Vec<String> {
    let v: Vec<(&usize, &f64)> = points.iter().collect();
    v.windows(2)
        .filter(|w| *w[1].1 > *w[0].1 * (1.0 + MONOTONE_NOISE_TOLERANCE))
        .map(|w| {
            format!(
                "bandwidth rises from {:.1} GB/s at {} B to {:.1} GB/s at {} B",
                w[0].1, w[0].0, w[1].1, w[1].0
            )
        })
        .collect()
}
