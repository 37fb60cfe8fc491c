mod common;

use std::process::Command;

use common::{fixture, fixture_path};
use hroofline::ingest::parse_likwid;
use hroofline::machine::load_ceilings;
use hroofline::report::{emit_report, run, ReportOptions};
use hroofline::Summary;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str], stdin: &str) -> Outcome {
    let mut argv = vec!["hroofline"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn path(name: &str) -> String {
    fixture_path(name).to_string_lossy().into_owned()
}

#[test]
fn no_arguments_is_usage_error() {
    let o = cli(&[], "");
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("Usage"), "{}", o.stderr);
}

#[test]
fn unknown_flag_is_usage_error_and_help_succeeds() {
    assert_eq!(cli(&["ingest", "--bogus"], "").code, 2);
    let help = cli(&["--help"], "");
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("simulate"));
}

#[test]
fn ingest_likwid_matches_library() {
    let o = cli(&["ingest", &path("likwid_gpp.txt")], "");
    assert_eq!(o.code, 0, "{}", o.stderr);
    let parsed = Summary::from_json(&o.stdout).unwrap();
    assert_eq!(parsed, parse_likwid(&fixture("likwid_gpp.txt")).unwrap());
}

#[test]
fn ingest_sde_with_vtune_and_label() {
    let o = cli(
        &["ingest", &path("sde_gpp.txt"), "--vtune", &path("vtune_gpp.txt"), "--label", "gpp", "--seconds", "10"],
        "",
    );
    assert_eq!(o.code, 0, "{}", o.stderr);
    let s = Summary::from_json(&o.stdout).unwrap();
    assert_eq!(s.label, "gpp");
    assert_eq!(s.seconds, Some(10.0));
    assert_eq!(s.bytes.len(), 3);
}

#[test]
fn ingest_nvprof_without_time_is_typed_error() {
    let o = cli(&["ingest", &path("nvprof_synthetic.csv")], "");
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("time"), "{}", o.stderr);
}

#[test]
fn plot_with_unreadable_ceilings_names_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let out = dir.path().join("c.svg");
    let o = cli(
        &[
            "plot",
            "--ceilings",
            missing.to_str().unwrap(),
            "--summary",
            &path("likwid_gpp.txt"),
            "--out",
            out.to_str().unwrap(),
        ],
        "",
    );
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains(missing.to_str().unwrap()), "{}", o.stderr);
}

#[test]
fn ingest_piped_into_report_equals_library_pipeline() {
    let summary = cli(&["ingest", &path("likwid_gpp.txt")], "");
    assert_eq!(summary.code, 0);
    let report = cli(&["report", "--ceilings", &path("knl_ceilings.json"), "--summary", "-"], &summary.stdout);
    assert_eq!(report.code, 0, "{}", report.stderr);

    let machine = load_ceilings(&fixture("knl_ceilings.json")).unwrap();
    let direct = emit_report(
        &machine,
        &[parse_likwid(&fixture("likwid_gpp.txt")).unwrap()],
        ReportOptions::default(),
    )
    .unwrap();
    assert_eq!(report.stdout, format!("{}\n", direct.to_json()));
}

#[test]
fn plot_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("s.json");
    let out = dir.path().join("c.svg");
    let o = cli(&["ingest", &path("likwid_gpp.txt"), "--out", summary.to_str().unwrap()], "");
    assert_eq!(o.code, 0);
    let o = cli(
        &[
            "plot",
            "--ceilings",
            &path("knl_ceilings.json"),
            "--summary",
            summary.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
        "",
    );
    assert_eq!(o.code, 0, "{}", o.stderr);
    let svg = std::fs::read_to_string(out).unwrap();
    assert_eq!(svg.matches("class=\"marker\"").count(), 4);
}

#[test]
fn simulate_workloads() {
    let o = cli(&["simulate", "--workload", "triad", "--hierarchy", &path("hierarchy.json"), "--n", "1000"], "");
    assert_eq!(o.code, 0, "{}", o.stderr);
    let s = Summary::from_json(&o.stdout).unwrap();
    assert_eq!(s.label, "simulated");
    assert_eq!(s.flops[&hroofline::Precision::Fp64], 2000.0);

    let o = cli(&["simulate", "--workload", "gpp", "--hierarchy", &path("hierarchy.json")], "");
    assert_eq!(o.code, 0, "{}", o.stderr);
    let s = Summary::from_json(&o.stdout).unwrap();
    assert_eq!(s.flops[&hroofline::Precision::Fp64], (2 * 2 * 512 * 2 * 46) as f64);

    let o = cli(
        &["simulate", "--workload", "trace", "--hierarchy", &path("hierarchy.json"), "--trace", &path("sample.trace"), "--flops", "10"],
        "",
    );
    assert_eq!(o.code, 0, "{}", o.stderr);

    let o = cli(&["simulate", "--workload", "trace", "--hierarchy", &path("hierarchy.json")], "");
    assert_eq!(o.code, 1);
    assert_eq!(cli(&["simulate", "--workload", "nope", "--hierarchy", "x"], "").code, 2);
}

#[test]
fn section_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("roofline.section");
    let o = cli(&["section", "--precision", "fp64", "--out", out.to_str().unwrap()], "");
    assert_eq!(o.code, 0, "{}", o.stderr);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("SpeedOfLight_HierarchicalDoubleRooflineChart"));
    let o = cli(&["section", "--precision", "tensor", "--out", out.to_str().unwrap()], "");
    assert_eq!(o.code, 1);
}

#[test]
fn bench_writes_loadable_ceilings() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ceilings.json");
    let o = cli(
        &["bench", "--out", out.to_str().unwrap(), "--threads", "1", "--min-ms", "2", "--max-bytes", "1048576"],
        "",
    );
    assert_eq!(o.code, 0, "{}", o.stderr);
    let machine = load_ceilings(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(machine.bandwidth_peak("DRAM").unwrap() > 0.0);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_hroofline");
    assert_eq!(Command::new(bin).status().unwrap().code(), Some(2));
    let out = Command::new(bin).args(["ingest", &path("likwid_gpp.txt")]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(Summary::from_json(&String::from_utf8(out.stdout).unwrap()).is_ok());
    let out = Command::new(bin).args(["ingest", "/definitely/missing.txt"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("/definitely/missing.txt"));
}
