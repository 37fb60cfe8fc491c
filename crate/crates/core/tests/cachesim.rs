mod common;

use common::fixture;
use hroofline::cachesim::{
    flops_for_gpp, gen_gpp_trace, gen_stream_triad, parse_trace, simulate, stack_distance_oracle,
    AccessEvent, AccessKind, CacheLevelConfig, GppParams, HierarchyConfig, GPP_FLOPS_PER_ITERATION,
};
use hroofline::Error;
use proptest::prelude::*;

fn fixture_hierarchy() -> HierarchyConfig {
    HierarchyConfig::from_json(&fixture("hierarchy.json")).unwrap()
}

fn single(lines: u32) -> HierarchyConfig {
    HierarchyConfig::new(vec![CacheLevelConfig::fully_associative("C", lines, 64)])
}

fn event() -> impl Strategy<Value = AccessEvent> {
    (0u64..4096, 1u32..=16, any::<bool>()).prop_map(|(addr, size, write)| {
        let kind = if write { AccessKind::Write } else { AccessKind::Read };
        AccessEvent::new(addr, size, kind).unwrap()
    })
}

proptest! {
    #[test]
    fn fully_associative_matches_oracle(trace in prop::collection::vec(event(), 0..400), lines in 1u32..32) {
        let r = simulate(&trace, &single(lines)).unwrap();
        prop_assert_eq!(r.levels[0].misses, stack_distance_oracle(&trace, lines as usize, 64));
    }

    #[test]
    fn more_capacity_never_misses_more(trace in prop::collection::vec(event(), 0..400), lines in 1u32..32) {
        let small = simulate(&trace, &single(lines)).unwrap();
        let big = simulate(&trace, &single(lines * 2)).unwrap();
        prop_assert!(big.levels[0].misses <= small.levels[0].misses);
    }

    #[test]
    fn simulation_is_deterministic(trace in prop::collection::vec(event(), 0..300)) {
        let h = fixture_hierarchy();
        prop_assert_eq!(simulate(&trace, &h).unwrap(), simulate(&trace, &h).unwrap());
    }

    #[test]
    fn traffic_is_conserved(trace in prop::collection::vec(event(), 1..300)) {
        let r = simulate(&trace, &HierarchyConfig::new(vec![
            CacheLevelConfig::new("L1", 512, 2, 64),
            CacheLevelConfig::new("L2", 2048, 4, 64),
        ])).unwrap();
        // Everything L1 lets through (fills and writebacks) arrives at L2, and
        // everything L2 lets through reaches memory.
        prop_assert_eq!(r.levels[1].accesses, r.levels[0].misses + r.levels[0].writebacks);
        prop_assert_eq!(r.memory.reads, r.levels[1].misses);
        prop_assert_eq!(r.memory.writes, r.levels[1].writebacks);
    }
}

#[test]
fn triad_moves_32_bytes_per_element() {
    let n = 100_000;
    let r = simulate(&gen_stream_triad(n).unwrap(), &fixture_hierarchy()).unwrap();
    let want = 32.0 * n as f64;
    assert!((r.memory_bytes() as f64 / want - 1.0).abs() < 0.05, "{}", r.memory_bytes());
    assert_eq!(r.requested_bytes, 24 * n);
}

#[test]
fn gpp_traffic_shrinks_down_the_hierarchy() {
    let p = GppParams::new(2, 2, 512, 2);
    let r = simulate(&gen_gpp_trace(&p).unwrap(), &fixture_hierarchy()).unwrap();
    let bytes = r.roofline_bytes();
    assert!(bytes["L1"] > bytes["L2"], "{bytes:?}");
    assert!(bytes["L2"] > bytes["DRAM"], "{bytes:?}");
    assert_eq!(flops_for_gpp(&p, GPP_FLOPS_PER_ITERATION).unwrap(), 2 * 2 * 512 * 2 * 46);
}

#[test]
fn workload_errors() {
    assert!(matches!(gen_stream_triad(0), Err(Error::Config { .. })));
    assert!(matches!(gen_gpp_trace(&GppParams::new(0, 2, 2, 2)), Err(Error::Config { .. })));
    assert!(matches!(
        gen_gpp_trace(&GppParams::new(512, 2, 32768, 20)),
        Err(Error::Config { .. })
    ));
}

#[test]
fn trace_fixture() {
    let trace = parse_trace(&fixture("sample.trace")).unwrap();
    assert_eq!(trace.len(), 5);
    let r = simulate(&trace, &fixture_hierarchy()).unwrap();
    // 0x1000 line, 0x2000 line, then 0x203c spills into the 0x2040 line.
    assert_eq!(r.levels[0].misses, 3);
    assert_eq!(r.memory.writes, 2);
}

#[test]
fn summary_from_simulation() {
    let r = simulate(&gen_stream_triad(1000).unwrap(), &fixture_hierarchy()).unwrap();
    let s = r
        .to_summary("simulated", [(hroofline::Precision::Fp64, 2000.0)].into())
        .unwrap();
    assert_eq!(s.seconds, None);
    assert_eq!(s.bytes["L1"], 24_000.0);
    assert_eq!(s.hierarchy().iter().map(|l| l.name.as_str()).collect::<Vec<_>>(), ["L1", "L2", "DRAM"]);
}
