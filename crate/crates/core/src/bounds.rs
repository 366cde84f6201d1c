//! Ratio and bound accounting for a finished construction.
//!
//! Given a trace and the exact optimum, a [`BoundReport`] records the
//! performance ratio `final / opt` next to the quantities that are supposed
//! to bound it:
//!
//! * `pr_sum`, the sum of relative increments `delta_a / w_before`;
//! * the average-arc condition per step (`delta_a / w_before <= m / i`);
//! * `m_max * H_n` and `m_max * log2(n)`.
//!
//! `pr_holds` and `thelog_holds` are observations. Nothing here assumes
//! they are true.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::Weight;
use crate::oracle::OracleResult;
use crate::trace::{check_avarc, AvArcVerdict, Trace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("harmonic number needs n >= 1")]
    ZeroHarmonic,
    #[error("trace has n = {trace} but oracle tour has {oracle} vertices")]
    InstanceMismatch { trace: usize, oracle: usize },
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `H_n = 1 + 1/2 + ... + 1/n`, accurate to within a few ulps.
pub fn harmonic(n: usize) -> Result<f64, BoundError> {
    if n == 0 {
        return Err(BoundError::ZeroHarmonic);
    }
    let mut acc = CompensatedSum::default();
    for i in (1..=n).rev() {
        acc.add(1.0 / i as f64);
    }
    Ok(acc.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrSum {
    /// Sum of `delta_a / w_before` over steps with `w_before > 0`.
    pub total: f64,
    /// Same sum restricted to steps with `i >= 2`.
    pub paper_domain_total: f64,
    /// Steps left out because `w_before = 0`.
    pub excluded: usize,
}

pub fn pr_sum(trace: &Trace) -> PrSum {
    let mut total = CompensatedSum::default();
    let mut restricted = CompensatedSum::default();
    let mut excluded = 0;
    for step in &trace.steps {
        if step.w_before <= 0 {
            excluded += 1;
            continue;
        }
        let term = step.delta_a as f64 / step.w_before as f64;
        total.add(term);
        if step.i >= 2 {
            restricted.add(term);
        }
    }
    PrSum {
        total: total.value(),
        paper_domain_total: restricted.value(),
        excluded,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub instance: String,
    pub heuristic: String,
    pub n: usize,
    pub opt: Weight,
    #[serde(rename = "final")]
    pub final_weight: Weight,
    pub ratio: f64,
    pub pr_sum: f64,
    pub pr_sum_i_ge_2: f64,
    pub pr_excluded: usize,
    pub pr_holds: bool,
    pub avarc_all: bool,
    pub avarc_violations: Vec<usize>,
    pub m_steps: Vec<usize>,
    pub m_max: usize,
    pub harmonic: f64,
    pub log2n: f64,
    pub bound_harmonic: f64,
    /// The computed bound `xi = m_max * log2(n)`.
    pub bound_log: f64,
    pub thelog_holds: bool,
    pub chain_applicable: bool,
}

/// Smallest `n` with `H_n <= log2(n)`.
pub const CHAIN_MIN_N: usize = 5;

/// Column order of [`BoundReport::csv_row`].
pub const CSV_COLUMNS: [&str; 15] = [
    "instance",
    "heuristic",
    "n",
    "opt",
    "final",
    "ratio",
    "pr_sum",
    "pr_holds",
    "avarc_all",
    "m_max",
    "harmonic",
    "log2n",
    "bound_log",
    "thelog_holds",
    "chain_applicable",
];

pub fn build_report(trace: &Trace, oracle: &OracleResult) -> Result<BoundReport, BoundError> {
    if trace.n != oracle.tour.len() {
        return Err(BoundError::InstanceMismatch {
            trace: trace.n,
            oracle: oracle.tour.len(),
        });
    }
    let n = trace.n;
    let ratio = match (trace.final_weight, oracle.value) {
        (0, 0) => 1.0,
        (_, 0) => f64::INFINITY,
        (f, o) => f as f64 / o as f64,
    };
    let pr = pr_sum(trace);
    let avarc_violations: Vec<usize> = trace
        .steps
        .iter()
        .enumerate()
        .filter(|(_, s)| check_avarc(s) == AvArcVerdict::Violated)
        .map(|(k, _)| k)
        .collect();
    let avarc_all = avarc_violations.is_empty();
    let m_steps: Vec<usize> = trace.steps.iter().map(|s| s.m).collect();
    let m_max = trace.m_max();
    let harmonic = harmonic(n.max(1))?;
    let log2n = (n as f64).log2();
    let bound_harmonic = m_max as f64 * harmonic;
    let bound_log = m_max as f64 * log2n;
    Ok(BoundReport {
        instance: trace.instance_name.clone(),
        heuristic: trace.heuristic.clone(),
        n,
        opt: oracle.value,
        final_weight: trace.final_weight,
        ratio,
        pr_sum: pr.total,
        pr_sum_i_ge_2: pr.paper_domain_total,
        pr_excluded: pr.excluded,
        pr_holds: ratio <= pr.total,
        avarc_all,
        avarc_violations,
        m_steps,
        m_max,
        harmonic,
        log2n,
        bound_harmonic,
        bound_log,
        thelog_holds: ratio <= bound_log,
        chain_applicable: avarc_all && n >= CHAIN_MIN_N,
    })
}

impl BoundReport {
    pub fn csv_header() -> String {
        CSV_COLUMNS.join(",")
    }

    pub fn csv_row(&self) -> String {
        [
            csv_field(&self.instance),
            csv_field(&self.heuristic),
            self.n.to_string(),
            self.opt.to_string(),
            self.final_weight.to_string(),
            self.ratio.to_string(),
            self.pr_sum.to_string(),
            self.pr_holds.to_string(),
            self.avarc_all.to_string(),
            self.m_max.to_string(),
            self.harmonic.to_string(),
            self.log2n.to_string(),
            self.bound_log.to_string(),
            self.thelog_holds.to_string(),
            self.chain_applicable.to_string(),
        ]
        .join(",")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicRow {
    pub n: usize,
    pub harmonic: f64,
    pub log2n: f64,
    /// `H_n <= log2(n)`.
    pub holds: bool,
}

/// `H_n` against `log2(n)` for `n = 1..=n_max`.
pub fn harmonic_vs_log(n_max: usize) -> Vec<HarmonicRow> {
    let mut acc = CompensatedSum::default();
    (1..=n_max)
        .map(|n| {
            acc.add(1.0 / n as f64);
            let harmonic = acc.value();
            let log2n = (n as f64).log2();
            HarmonicRow {
                n,
                harmonic,
                log2n,
                holds: harmonic <= log2n,
            }
        })
        .collect()
}
