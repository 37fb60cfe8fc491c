//! Hierarchical Roofline analysis.
//!
//! The crate turns exported profiler output (LIKWID, SDE + VTune, nvprof,
//! Nsight Compute 2019/2020) into per-memory-level arithmetic intensity and
//! throughput samples, places them under machine ceilings, simulates cache
//! traffic for synthetic workloads and renders charts and reports.
//!
//! The Roofline math in [`model`] is generic over the floating-point scalar
//! (see [`Scalar`]); the aliases below fix it to `f64` or `f32`.

pub mod cachesim;
pub mod error;
pub mod ingest;
pub mod machine;
pub mod model;
pub mod report;
mod scalar;

pub use error::{Error, Result};
pub use model::{
    arithmetic_intensity, attainable_performance, build_samples, build_samples_with,
    classify_bound, locality_check, ridge_point, Bound, BoundClass, Ceiling, CeilingKind,
    MachineModel, MeasurementSummary, MemoryLevel, Precision, RooflineSample, SampleOptions,
    SampleSet,
};
pub use scalar::Scalar;

/// Machine model with `f64` ceilings.
pub type Machine = MachineModel<f64>;
/// Machine model with `f32` ceilings.
pub type MachineF32 = MachineModel<f32>;
/// Measurement summary with `f64` counts. Every adapter produces this.
pub type Summary = MeasurementSummary<f64>;
/// Measurement summary with `f32` counts.
pub type SummaryF32 = MeasurementSummary<f32>;
/// Roofline sample in `f64`.
pub type Sample = RooflineSample<f64>;
/// Roofline sample in `f32`.
pub type SampleF32 = RooflineSample<f32>;
