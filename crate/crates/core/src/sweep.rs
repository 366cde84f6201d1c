//! Batch runs: generate, construct, solve exactly, report.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bounds::{build_report, BoundError, BoundReport, CHAIN_MIN_N};
use crate::exec::Execution;
use crate::generate::{gen_random_euclidean, gen_random_metric, instance_seed};
use crate::heuristics::{Heuristic, HeuristicError};
use crate::instance::{Instance, InstanceError, MIN_VERTICES};
use crate::oracle::{optimum, OracleError, OracleResult, HELD_KARP_MAX};
use crate::trace::{validate_trace, Trace, TraceError, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SweepError {
    #[error("invalid size range {n_min}..={n_max}: need {min} <= n-min <= n-max <= {max}")]
    InvalidRange {
        n_min: usize,
        n_max: usize,
        min: usize,
        max: usize,
    },
    #[error("unknown instance kind {0:?} (expected euclidean or metric)")]
    UnknownKind(String),
    #[error("trace for {instance} failed validation: {first}")]
    InvalidTrace { instance: String, first: String },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Heuristic(#[from] HeuristicError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstanceKind {
    Euclidean,
    Metric,
}

impl InstanceKind {
    pub fn generate(&self, n: usize, seed: u64) -> Result<Instance, InstanceError> {
        match self {
            InstanceKind::Euclidean => gen_random_euclidean(n, seed),
            InstanceKind::Metric => gen_random_metric(n, seed),
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InstanceKind::Euclidean => "euclidean",
            InstanceKind::Metric => "metric",
        })
    }
}

impl FromStr for InstanceKind {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euclidean" => Ok(InstanceKind::Euclidean),
            "metric" => Ok(InstanceKind::Metric),
            other => Err(SweepError::UnknownKind(other.to_string())),
        }
    }
}

/// Everything produced by one construction run on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub trace: Trace,
    pub oracle: OracleResult,
    pub report: BoundReport,
}

/// Runs `heuristic`, checks the trace, solves exactly and builds the report.
pub fn evaluate(inst: &Instance, heuristic: Heuristic, start: usize) -> Result<Evaluation, SweepError> {
    let trace = heuristic.run(inst, start)?;
    report_for(inst, trace)
}

/// Validates an existing trace against `inst` and reports on it.
pub fn report_for(inst: &Instance, trace: Trace) -> Result<Evaluation, SweepError> {
    let violations = validate_trace(&trace, inst)?;
    if let Some(first) = violations.first() {
        return Err(SweepError::InvalidTrace {
            instance: inst.name().to_string(),
            first: first.to_string(),
        });
    }
    let oracle = optimum(inst, false)?;
    let report = build_report(&trace, &oracle)?;
    Ok(Evaluation {
        trace,
        oracle,
        report,
    })
}

/// Describes every violation, for error messages.
pub fn describe(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(Violation::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub count: usize,
    pub seed: u64,
    pub heuristic: Heuristic,
    pub kind: InstanceKind,
    pub start: usize,
    /// Permits `n_min` below 5, where `H_n > log2(n)`.
    pub allow_small: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), SweepError> {
        let min = if self.allow_small { MIN_VERTICES } else { CHAIN_MIN_N };
        if self.n_min < min || self.n_min > self.n_max || self.n_max > HELD_KARP_MAX {
            return Err(SweepError::InvalidRange {
                n_min: self.n_min,
                n_max: self.n_max,
                min,
                max: HELD_KARP_MAX,
            });
        }
        Ok(())
    }

    /// `(n, index, seed)` for every run, in output order.
    pub fn jobs(&self) -> Vec<(usize, usize, u64)> {
        (self.n_min..=self.n_max)
            .flat_map(|n| (0..self.count).map(move |k| (n, k)))
            .map(|(n, k)| (n, k, instance_seed(self.seed, n, k)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRun {
    pub n: usize,
    pub index: usize,
    pub seed: u64,
    pub report: BoundReport,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSummary {
    pub total: usize,
    pub pr_holds: usize,
    pub thelog_holds: usize,
    pub max_ratio: f64,
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pr_holds={}/{} thelog_holds={}/{} max_ratio={:.6}",
            self.pr_holds, self.total, self.thelog_holds, self.total, self.max_ratio
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub runs: Vec<SweepRun>,
    pub summary: SweepSummary,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = BoundReport::csv_header();
        out.push('\n');
        for run in &self.runs {
            out.push_str(&run.report.csv_row());
            out.push('\n');
        }
        out
    }
}

/// Runs every job, in parallel when `exec` allows. Rows come back in
/// `(n, index)` order whatever the completion order.
pub fn run_sweep(config: &SweepConfig, exec: Execution) -> Result<SweepResult, SweepError> {
    config.validate()?;
    let jobs = config.jobs();
    let runs = exec
        .map(&jobs, |&(n, index, seed)| {
            let inst = config.kind.generate(n, seed)?;
            let eval = evaluate(&inst, config.heuristic, config.start.min(n - 1))?;
            Ok(SweepRun {
                n,
                index,
                seed,
                report: eval.report,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>, SweepError>>()?;
    let summary = SweepSummary {
        total: runs.len(),
        pr_holds: runs.iter().filter(|r| r.report.pr_holds).count(),
        thelog_holds: runs.iter().filter(|r| r.report.thelog_holds).count(),
        max_ratio: runs.iter().map(|r| r.report.ratio).fold(0.0, f64::max),
    };
    Ok(SweepResult { runs, summary })
}
