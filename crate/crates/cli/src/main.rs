//! `tspbound`: generate instances, build instrumented tours, and report
//! ratios against exact optima.
//!
//! Exit codes: 0 success, 1 usage, 2 data error, 3 size limit.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use tspbound::heuristics::Heuristic;
use tspbound::oracle::OracleError;
use tspbound::sweep::{describe, report_for, run_sweep, InstanceKind, SweepConfig, SweepError};
use tspbound::{
    emit_tsplib, emit_tsplib_coords, harmonic_vs_log, parse_tsplib, report_to_json,
    trace_from_json, trace_to_json, validate_trace, BoundReport, Execution, Instance,
};

#[derive(Parser)]
#[command(name = "tspbound", version, about = "Instrumented constructive TSP heuristics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded random instance as a TSPLIB file.
    Gen {
        #[arg(long, value_parser = clap::value_parser!(u64).range(3..))]
        n: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Kind::Euclidean)]
        kind: Kind,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a tour and write its construction trace as JSON.
    Solve {
        #[arg(long, value_parser = parse_heuristic)]
        heuristic: Heuristic,
        #[arg(long)]
        instance: PathBuf,
        /// Start vertex for nearest neighbour.
        #[arg(long, default_value_t = 0)]
        start: usize,
        /// Try every start vertex and keep the lightest tour (nearest neighbour only).
        #[arg(long)]
        all_starts: bool,
        /// Trace destination; stdout when omitted.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Compare a trace with the exact optimum.
    Report {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Generate, solve and report over a range of sizes; one CSV row per run.
    Sweep {
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_parser = parse_heuristic)]
        heuristic: Heuristic,
        #[arg(long)]
        csv_out: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Euclidean)]
        kind: Kind,
        #[arg(long, default_value_t = 0)]
        start: usize,
        /// Permit sizes below 5, where H_n exceeds log2(n).
        #[arg(long)]
        allow_small: bool,
        /// Run on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Tabulate H_n against log2(n).
    CheckHarmonic {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n_max: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Euclidean,
    Metric,
}

impl From<Kind> for InstanceKind {
    fn from(kind: Kind) -> Self {
        match kind {
            Kind::Euclidean => InstanceKind::Euclidean,
            Kind::Metric => InstanceKind::Metric,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn parse_heuristic(s: &str) -> Result<Heuristic, String> {
    s.parse().map_err(|e: tspbound::heuristics::HeuristicError| e.to_string())
}

/// Error with a chosen exit code.
struct Exit {
    code: u8,
    error: anyhow::Error,
}

fn classify(error: anyhow::Error) -> Exit {
    let limit = error.chain().any(|cause| {
        matches!(
            cause.downcast_ref::<OracleError>(),
            Some(OracleError::UnsupportedSize { .. })
        ) || matches!(
            cause.downcast_ref::<SweepError>(),
            Some(SweepError::Oracle(OracleError::UnsupportedSize { .. }))
        )
    });
    let usage = error.chain().any(|cause| {
        matches!(
            cause.downcast_ref::<SweepError>(),
            Some(SweepError::InvalidRange { .. })
        )
    });
    let code = if limit {
        3
    } else if usage {
        1
    } else {
        2
    };
    Exit { code, error }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            let exit = classify(err);
            eprintln!("error: {:#}", exit.error);
            ExitCode::from(exit.code)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Gen { n, seed, kind, out } => gen(n as usize, seed, kind.into(), &out),
        Command::Solve {
            heuristic,
            instance,
            start,
            all_starts,
            trace_out,
        } => solve(heuristic, &instance, start, all_starts, trace_out.as_deref()),
        Command::Report {
            trace,
            instance,
            format,
        } => report(&trace, &instance, format),
        Command::Sweep {
            n_min,
            n_max,
            count,
            seed,
            heuristic,
            csv_out,
            kind,
            start,
            allow_small,
            sequential,
        } => {
            let config = SweepConfig {
                n_min,
                n_max,
                count,
                seed,
                heuristic,
                kind: kind.into(),
                start,
                allow_small,
            };
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::default()
            };
            sweep(&config, exec, &csv_out)
        }
        Command::CheckHarmonic { n_max } => check_harmonic(n_max as usize),
    }
}

fn is_broken_pipe(error: &anyhow::Error) -> bool {
    error
        .chain()
        .any(|cause| matches!(cause.downcast_ref::<io::Error>(), Some(e) if e.kind() == io::ErrorKind::BrokenPipe))
}

/// Writes to stdout, surfacing a closed pipe as an error instead of a panic.
fn emit(text: std::fmt::Arguments) -> Result<()> {
    let mut out = io::stdout().lock();
    out.write_fmt(text)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn load_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_tsplib(&text).with_context(|| format!("parsing {}", path.display()))
}

fn gen(n: usize, seed: u64, kind: InstanceKind, out: &Path) -> Result<()> {
    let inst = kind.generate(n, seed)?;
    let text = emit_tsplib_coords(&inst).unwrap_or_else(|| emit_tsplib(&inst));
    fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
    emit(format_args!("{} n={}", inst.name(), inst.n()))?;
    Ok(())
}

fn solve(
    heuristic: Heuristic,
    instance: &Path,
    start: usize,
    all_starts: bool,
    trace_out: Option<&Path>,
) -> Result<()> {
    let inst = load_instance(instance)?;
    let trace = if all_starts {
        if heuristic != Heuristic::NearestNeighbor {
            bail!("--all-starts only applies to nn");
        }
        let starts: Vec<usize> = (0..inst.n()).collect();
        let traces = Execution::default().map(&starts, |&s| heuristic.run(&inst, s));
        let mut best = None;
        for (s, trace) in traces.into_iter().enumerate() {
            let trace = trace?;
            eprintln!("start={s} final_weight={}", trace.final_weight);
            if best.as_ref().is_none_or(|b: &tspbound::Trace| trace.final_weight < b.final_weight) {
                best = Some(trace);
            }
        }
        best.expect("n >= 3")
    } else {
        heuristic.run(&inst, start)?
    };
    let violations = validate_trace(&trace, &inst)?;
    if !violations.is_empty() {
        bail!("constructed trace failed validation: {}", describe(&violations));
    }
    let json = trace_to_json(&trace);
    match trace_out {
        Some(path) => {
            fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
            emit(format_args!(
                "heuristic={} instance={} n={} final_weight={}",
                trace.heuristic, trace.instance_name, trace.n, trace.final_weight
            ))?;
        }
        None => emit(format_args!("{json}"))?,
    }
    Ok(())
}

fn report(trace_path: &Path, instance: &Path, format: Format) -> Result<()> {
    let inst = load_instance(instance)?;
    let text = fs::read_to_string(trace_path)
        .with_context(|| format!("reading {}", trace_path.display()))?;
    let trace = trace_from_json(&text).with_context(|| format!("parsing {}", trace_path.display()))?;
    let eval = report_for(&inst, trace)?;
    match format {
        Format::Json => emit(format_args!("{}", report_to_json(&eval.report)))?,
        Format::Csv => emit(format_args!("{}\n{}", BoundReport::csv_header(), eval.report.csv_row()))?,
    }
    Ok(())
}

fn sweep(config: &SweepConfig, exec: Execution, csv_out: &Path) -> Result<()> {
    let result = run_sweep(config, exec)?;
    fs::write(csv_out, result.to_csv()).with_context(|| format!("writing {}", csv_out.display()))?;
    emit(format_args!("{}", result.summary))?;
    Ok(())
}

fn check_harmonic(n_max: usize) -> Result<()> {
    let rows = harmonic_vs_log(n_max);
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    writeln!(out, "n\tH_n\tlog2_n\tholds")?;
    for row in &rows {
        writeln!(out, "{}\t{:.12}\t{:.12}\t{}", row.n, row.harmonic, row.log2n, row.holds)?;
    }
    let failing: Vec<String> = rows
        .iter()
        .filter(|r| !r.holds)
        .map(|r| r.n.to_string())
        .collect();
    if failing.is_empty() {
        writeln!(out, "failing: none")?;
    } else {
        writeln!(out, "failing: {}", failing.join(" "))?;
    }
    out.flush()?;
    Ok(())
}
