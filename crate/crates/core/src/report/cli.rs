//! `hroofline` command line. [`run`] takes explicit streams so the whole
//! front end is testable in-process.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use super::chart::{render_chart, ChartSpec};
use super::json::{emit_report, ReportOptions};
use super::section::{emit_section_file, SectionFileSpec};
use crate::cachesim::{
    flops_for_gpp, gen_gpp_trace, gen_stream_triad, parse_trace, simulate, GppParams, HierarchyConfig,
    GPP_FLOPS_PER_ITERATION,
};
use crate::error::{Error, Result};
use crate::ingest::{ingest, AdapterId, CoefficientTable, IngestOptions};
use crate::machine::{bench_bandwidth_sweep, bench_compute_peak, fit_ceilings, load_ceilings, BenchConfig};
use crate::model::{build_samples_with, Precision, SampleOptions, DEFAULT_LOCALITY_FACTOR};
use crate::Summary;

#[derive(Parser, Debug)]
#[command(name = "hroofline", version, about = "Hierarchical Roofline analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalize profiler output into a summary JSON document.
    Ingest(IngestArgs),
    /// Render summaries against machine ceilings as an SVG chart.
    Plot(PlotArgs),
    /// Classify summaries against machine ceilings; JSON report.
    Report(ReportArgs),
    /// Simulate a workload through a cache hierarchy; summary JSON.
    Simulate(SimulateArgs),
    /// Measure this machine's compute and bandwidth ceilings.
    Bench(BenchArgs),
    /// Write an Nsight Compute section file for a hierarchical Roofline.
    Section(SectionArgs),
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// Profiler output (`-` for stdin).
    file: String,
    #[arg(long)]
    adapter: Option<AdapterId>,
    /// Kernel time, required for nvprof.
    #[arg(long)]
    seconds: Option<f64>,
    /// VTune output paired with an SDE input.
    #[arg(long)]
    vtune: Option<PathBuf>,
    #[arg(long)]
    label: Option<String>,
    /// JSON object of byte-coefficient overrides.
    #[arg(long)]
    coefficients: Option<PathBuf>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[arg(long)]
    ceilings: PathBuf,
    /// Summary JSON (`-` for stdin); repeatable.
    #[arg(long, required = true, num_args = 1..)]
    summary: Vec<String>,
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long, default_value = "Hierarchical Roofline")]
    title: String,
    /// Add a series summed over all precisions.
    #[arg(long)]
    combined: bool,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long)]
    ceilings: PathBuf,
    #[arg(long, required = true, num_args = 1..)]
    summary: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_LOCALITY_FACTOR)]
    locality_factor: f64,
    #[arg(long)]
    combined: bool,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Workload {
    Gpp,
    Triad,
    Trace,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    workload: Workload,
    #[arg(long)]
    hierarchy: PathBuf,
    /// Trace file for `--workload trace`.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Triad length.
    #[arg(long, default_value_t = 100_000)]
    n: u64,
    #[arg(long, default_value_t = 2)]
    nbands: u64,
    #[arg(long, default_value_t = 2)]
    ngpown: u64,
    #[arg(long, default_value_t = 512)]
    ncouls: u64,
    #[arg(long, default_value_t = 2)]
    nw: u64,
    #[arg(long, default_value_t = GPP_FLOPS_PER_ITERATION)]
    flops_per_iteration: u64,
    /// FP64 FLOPs attributed to a `trace` workload.
    #[arg(long)]
    flops: Option<f64>,
    #[arg(long, default_value = "simulated")]
    label: String,
    /// Also write per-level simulator counters as JSON.
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Sweep working-set sizes to find every cache plateau; otherwise only
    /// one large working set is timed and reported as DRAM.
    #[arg(long)]
    sweep: bool,
    #[arg(long, short)]
    out: PathBuf,
    /// Worker threads (defaults to ROOFLINE_THREADS, then all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = 3)]
    trials: u32,
    /// Minimum timed duration per measurement in milliseconds.
    #[arg(long, default_value_t = 20)]
    min_ms: u64,
    /// Largest working set in bytes.
    #[arg(long, default_value_t = 1 << 28)]
    max_bytes: usize,
    #[arg(long, default_value = "localhost")]
    machine: String,
}

#[derive(Args, Debug)]
struct SectionArgs {
    #[arg(long, default_value = "fp64")]
    precision: Precision,
    #[arg(long, short)]
    out: PathBuf,
}

fn read_path(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_path(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
    stdin_used: bool,
}

impl Io<'_> {
    /// Reads a file, or stdin for `-` (at most once per invocation).
    fn read(&mut self, arg: &str) -> Result<String> {
        if arg != "-" {
            return read_path(Path::new(arg));
        }
        if self.stdin_used {
            return Err(Error::config("-", "stdin can only be read once"));
        }
        self.stdin_used = true;
        let mut text = String::new();
        self.stdin.read_to_string(&mut text).map_err(|source| Error::Io {
            path: PathBuf::from("<stdin>"),
            source,
        })?;
        Ok(text)
    }

    fn emit(&mut self, out: Option<&Path>, text: &str) -> Result<()> {
        match out {
            Some(p) => write_path(p, text),
            None => self.stdout.write_all(text.as_bytes()).map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
        }
    }

    fn warn(&mut self, messages: &[String]) {
        for m in messages {
            let _ = writeln!(self.stderr, "warning: {m}");
        }
    }

    fn summaries(&mut self, args: &[String]) -> Result<Vec<Summary>> {
        args.iter()
            .map(|a| {
                let text = self.read(a)?;
                Summary::from_json(&text).map_err(|e| match e {
                    Error::Io { .. } => e,
                    other => Error::config(a.clone(), other.to_string()),
                })
            })
            .collect()
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn cmd_ingest(io: &mut Io, a: IngestArgs) -> Result<()> {
    let text = io.read(&a.file)?;
    let mut opts = IngestOptions {
        seconds: a.seconds,
        label: a.label,
        ..IngestOptions::default()
    };
    if let Some(p) = &a.vtune {
        opts.vtune = Some(read_path(p)?);
    }
    if let Some(p) = &a.coefficients {
        opts.coefficients = CoefficientTable::from_json_overrides(&read_path(p)?)?;
    }
    let summary = ingest(&text, a.adapter, &opts)?;
    io.warn(&summary.warnings);
    io.emit(a.out.as_deref(), &with_newline(summary.to_json()))
}

fn cmd_plot(io: &mut Io, a: PlotArgs) -> Result<()> {
    let machine = load_ceilings(&read_path(&a.ceilings)?)?;
    let summaries = io.summaries(&a.summary)?;
    let mut samples = Vec::new();
    for s in &summaries {
        let set = build_samples_with(s, SampleOptions { combined_total: a.combined });
        io.warn(&set.warnings);
        samples.extend(set.samples);
    }
    let svg = render_chart(&ChartSpec::new(a.title, Some(machine), samples))?;
    write_path(&a.out, &svg)
}

fn cmd_report(io: &mut Io, a: ReportArgs) -> Result<()> {
    let machine = load_ceilings(&read_path(&a.ceilings)?)?;
    let summaries = io.summaries(&a.summary)?;
    let report = emit_report(
        &machine,
        &summaries,
        ReportOptions {
            locality_factor: a.locality_factor,
            combined_total: a.combined,
        },
    )?;
    io.emit(a.out.as_deref(), &with_newline(report.to_json()))
}

fn cmd_simulate(io: &mut Io, a: SimulateArgs) -> Result<()> {
    let hierarchy = HierarchyConfig::from_json(&read_path(&a.hierarchy)?)?;
    let (trace, flops) = match a.workload {
        Workload::Gpp => {
            let p = GppParams::new(a.nbands, a.ngpown, a.ncouls, a.nw);
            (gen_gpp_trace(&p)?, flops_for_gpp(&p, a.flops_per_iteration)? as f64)
        }
        Workload::Triad => (gen_stream_triad(a.n)?, 2.0 * a.n as f64),
        Workload::Trace => {
            let path = a
                .trace
                .as_deref()
                .ok_or_else(|| Error::config("--trace", "required for --workload trace"))?;
            (parse_trace(&read_path(path)?)?, a.flops.unwrap_or(0.0))
        }
    };
    let result = simulate(&trace, &hierarchy)?;
    if let Some(p) = &a.stats {
        write_path(p, &with_newline(serde_json::to_string_pretty(&result)?))?;
    }
    let mut summary = result.to_summary(&a.label, BTreeMap::from([(Precision::Fp64, flops)]))?;
    if flops == 0.0 {
        summary.warn("no FLOPs attributed to the trace; pass --flops to plot it");
    }
    io.warn(&summary.warnings);
    io.emit(a.out.as_deref(), &with_newline(summary.to_json()))
}

fn cmd_bench(io: &mut Io, a: BenchArgs) -> Result<()> {
    let mut config = BenchConfig {
        trials: a.trials,
        min_duration: Duration::from_millis(a.min_ms),
        ..BenchConfig::default()
    };
    if let Some(t) = a.threads {
        config.threads = t;
    }
    config.working_set_sizes = if a.sweep {
        config.working_set_sizes.into_iter().filter(|&s| s <= a.max_bytes).collect()
    } else {
        vec![a.max_bytes]
    };
    let peaks = bench_compute_peak(&config)?;
    let sweep = bench_bandwidth_sweep(&config)?;
    io.warn(&sweep.warnings);
    let doc = fit_ceilings(&a.machine, &sweep.points, &peaks.gflops)?;
    write_path(&a.out, &with_newline(doc.to_json()))
}

fn cmd_section(a: SectionArgs) -> Result<()> {
    let text = emit_section_file(&SectionFileSpec::hierarchical(a.precision)?)?;
    write_path(&a.out, &text)
}

/// Runs one invocation. Exit codes: 0 success, 1 typed error (message on
/// `stderr`), 2 usage error.
pub fn run<I, S>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    if args.len() <= 1 {
        let _ = write!(stderr, "{}", Cli::command().render_usage());
        let _ = writeln!(stderr, "\n\nRun with --help for the list of subcommands.");
        return 2;
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let mut io = Io {
        stdin,
        stdout,
        stderr,
        stdin_used: false,
    };
    let outcome = match cli.command {
        Command::Ingest(a) => cmd_ingest(&mut io, a),
        Command::Plot(a) => cmd_plot(&mut io, a),
        Command::Report(a) => cmd_report(&mut io, a),
        Command::Simulate(a) => cmd_simulate(&mut io, a),
        Command::Bench(a) => cmd_bench(&mut io, a),
        Command::Section(a) => cmd_section(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {e}");
            1
        }
    }
}

/// Process entry point over the real standard streams.
pub fn cli_main<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    run(args, &mut io::stdin().lock(), &mut io::stdout().lock(), &mut io::stderr().lock())
}
