//! The Roofline model: ceilings, arithmetic intensity, attainable
//! performance, bound classification and hierarchy sanity checks.
//!
//! Everything here is pure and immutable after construction.

mod level;
mod machine_model;
mod roofline;
mod summary;

pub use level::{canonical_level_order, MemoryLevel, Precision};
pub(crate) use level::is_known_level;
pub use machine_model::{Ceiling, CeilingKind, MachineModel};
pub use roofline::{
    arithmetic_intensity, attainable_performance, build_samples, build_samples_with,
    classify_bound, locality_check, ridge_point, Bound, BoundClass, RooflineSample,
    SampleOptions, SampleSet, DEFAULT_LOCALITY_FACTOR,
};
pub(crate) use roofline::attainable_for;
pub use summary::MeasurementSummary;
