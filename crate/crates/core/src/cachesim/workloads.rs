use super::trace::{AccessEvent, AccessTrace};
use crate::error::{Error, Result};

/// Largest trace any generator will emit.
pub const MAX_TRACE_EVENTS: u64 = 10_000_000;

/// FLOPs per innermost GPP iteration, counted on complex-double arithmetic
/// (complex add/sub = 2, complex multiply = 6, real × complex = 2):
///
/// * `wdiff = wx(iw) - wtilde`: 2
/// * `delw = wtilde * conj(wdiff) / |wdiff|^2`: |.|^2 = 3, reciprocal = 1,
///   complex multiply = 6, scale = 2 (12)
/// * `sch_array = aqsntemp * delw * eps * 0.5`: two complex multiplies plus
///   a scale (14), then `× vcoul` (2): 16
/// * `ssx_array = delw * eps * vcoul`: complex multiply plus scale (8)
/// * reductions into `achtemp(iw)` and `asxtemp(iw)`: 4
/// * branch tests on `|wdiff|^2` and `|delw|^2` (one `|.|^2`): 3 + 1 = 4
///
/// Total 46. Override through [`flops_for_gpp`]'s argument when a measured
/// count for a specific build is available.
pub const GPP_FLOPS_PER_ITERATION: u64 = 46;

const COMPLEX_DOUBLE: u64 = 16;
/// Array bases are padded to this boundary so no two arrays share a line.
const ARRAY_ALIGN: u64 = 4096;
const EVENTS_PER_GPP_ITERATION: u64 = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GppParams {
    pub nbands: u64,
    pub ngpown: u64,
    pub ncouls: u64,
    pub nw: u64,
}

impl GppParams {
    pub fn new(nbands: u64, ngpown: u64, ncouls: u64, nw: u64) -> Self {
        GppParams {
            nbands,
            ngpown,
            ncouls,
            nw,
        }
    }

    /// Innermost-iteration count, checked against overflow and the event cap.
    pub fn iterations(&self) -> Result<u64> {
        let dims = [
            ("nbands", self.nbands),
            ("ngpown", self.ngpown),
            ("ncouls", self.ncouls),
            ("nw", self.nw),
        ];
        if let Some((name, _)) = dims.iter().find(|(_, v)| *v == 0) {
            return Err(Error::config(format!("gpp.{name}"), "must be >= 1"));
        }
        let too_big = || {
            Error::config(
                "gpp",
                format!("trace would exceed the desk-scale cap of {MAX_TRACE_EVENTS} events"),
            )
        };
        let iters = dims
            .iter()
            .try_fold(1u64, |acc, (_, v)| acc.checked_mul(*v))
            .ok_or_else(too_big)?;
        if iters.checked_mul(EVENTS_PER_GPP_ITERATION).is_none_or(|n| n > MAX_TRACE_EVENTS) {
            return Err(too_big());
        }
        Ok(iters)
    }
}

/// Base addresses of the GPP arrays, laid out in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GppLayout {
    pub wtilde_array: u64,
    pub aqsntemp: u64,
    pub eps: u64,
    pub achtemp: u64,
    pub asxtemp: u64,
}

fn align_up(v: u64) -> u64 {
    v.div_ceil(ARRAY_ALIGN) * ARRAY_ALIGN
}

impl GppLayout {
    pub fn new(p: &GppParams) -> Self {
        let wtilde_array = 0;
        let aqsntemp = align_up(wtilde_array + p.ncouls * p.ngpown * COMPLEX_DOUBLE);
        let eps = align_up(aqsntemp + p.ncouls * p.nbands * COMPLEX_DOUBLE);
        let achtemp = align_up(eps + p.ncouls * p.ngpown * COMPLEX_DOUBLE);
        let asxtemp = align_up(achtemp + p.nw * COMPLEX_DOUBLE);
        GppLayout {
            wtilde_array,
            aqsntemp,
            eps,
            achtemp,
            asxtemp,
        }
    }
}

/// Memory accesses of the GPP loop nest, nesting band → igp → ig → iw.
///
/// Each innermost iteration loads `wtilde_array(ig,igp)`, `aqsntemp(ig,band)`
/// and `eps(ig,igp)` (16 B complex doubles, `ig` fastest) and then
/// reads and writes `achtemp(iw)` and `asxtemp(iw)`.
pub fn gen_gpp_trace(p: &GppParams) -> Result<AccessTrace> {
    let iters = p.iterations()?;
    let layout = GppLayout::new(p);
    let elem = |base: u64, i: u64| base + i * COMPLEX_DOUBLE;
    let size = COMPLEX_DOUBLE as u32;
    let mut trace = Vec::with_capacity((iters * EVENTS_PER_GPP_ITERATION) as usize);
    for band in 0..p.nbands {
        for igp in 0..p.ngpown {
            for ig in 0..p.ncouls {
                for iw in 0..p.nw {
                    trace.push(AccessEvent::read(elem(layout.wtilde_array, ig + p.ncouls * igp), size));
                    trace.push(AccessEvent::read(elem(layout.aqsntemp, ig + p.ncouls * band), size));
                    trace.push(AccessEvent::read(elem(layout.eps, ig + p.ncouls * igp), size));
                    for base in [layout.achtemp, layout.asxtemp] {
                        trace.push(AccessEvent::read(elem(base, iw), size));
                        trace.push(AccessEvent::write(elem(base, iw), size));
                    }
                }
            }
        }
    }
    Ok(trace)
}

/// FLOPs of the GPP loop nest: iterations × `flops_per_iteration`
/// (see [`GPP_FLOPS_PER_ITERATION`]).
pub fn flops_for_gpp(p: &GppParams, flops_per_iteration: u64) -> Result<u64> {
    let iters = p.iterations()?;
    iters
        .checked_mul(flops_per_iteration)
        .ok_or_else(|| Error::config("gpp", "FLOP count overflows"))
}

/// STREAM triad `a[i] = b[i] + s * c[i]` over three disjoint 8 B arrays:
/// read `b[i]`, read `c[i]`, write `a[i]`.
pub fn gen_stream_triad(n: u64) -> Result<AccessTrace> {
    if n == 0 {
        return Err(Error::config("triad.n", "must be >= 1"));
    }
    if n.checked_mul(3).is_none_or(|e| e > MAX_TRACE_EVENTS) {
        return Err(Error::config(
            "triad.n",
            format!("trace would exceed the desk-scale cap of {MAX_TRACE_EVENTS} events"),
        ));
    }
    let a = 0;
    let b = align_up(a + 8 * n);
    let c = align_up(b + 8 * n);
    let mut trace = Vec::with_capacity(3 * n as usize);
    for i in 0..n {
        trace.push(AccessEvent::read(b + 8 * i, 8));
        trace.push(AccessEvent::read(c + 8 * i, 8));
        trace.push(AccessEvent::write(a + 8 * i, 8));
    }
    Ok(trace)
}
