//! Step-by-step accounting of a tour construction.
//!
//! Every constructive move adds the arcs `a_new` and removes `a_old`, with
//! `m = |a_new| - |a_old| >= 1`. The weight effect is
//! `delta_a = w(a_new) - w(a_old)` so that `w_after = w_before + delta_a`.
//! From these the step records the relative change `r = w_after / w_before`
//! and the average-arc ratio `rho = i / (i + m) * r`, where `i` is the arc
//! count before the move. `rho <= 1` is the per-step minimisation condition
//! checked by [`check_avarc`].

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsu::DisjointSets;
use crate::instance::{Arc, Instance, InstanceError, Weight};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("arc {0} is not in the solution and cannot be removed")]
    RemovesAbsentArc(Arc),
    #[error("arc {0} is already in the solution")]
    DuplicateArc(Arc),
    #[error("move adds {added} and removes {removed} arcs; net gain must be at least 1")]
    NoNetGain { added: usize, removed: usize },
    #[error("solution would exceed {0} arcs")]
    TooManyArcs(usize),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("trace has n = {trace} but instance has n = {instance}")]
    SizeMismatch { trace: usize, instance: usize },
}

/// Arc set under construction with cached weight, degrees and connectivity.
///
/// `components` only ever merges. Insertion moves keep every touched vertex
/// connected, so it stays exact for all constructors in this crate.
#[derive(Debug, Clone)]
pub struct PartialSolution {
    n: usize,
    arcs: BTreeSet<Arc>,
    weight: Weight,
    degree: Vec<u32>,
    components: DisjointSets,
}

impl PartialSolution {
    pub fn empty(n: usize) -> Self {
        PartialSolution {
            n,
            arcs: BTreeSet::new(),
            weight: 0,
            degree: vec![0; n],
            components: DisjointSets::new(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &BTreeSet<Arc> {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn contains(&self, arc: &Arc) -> bool {
        self.arcs.contains(arc)
    }

    /// Cached `gw S`.
    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn degree(&self, vertex: usize) -> u32 {
        self.degree[vertex]
    }

    pub fn connected(&mut self, a: usize, b: usize) -> bool {
        self.components.same(a, b)
    }

    /// Applies one constructive move in place. Nothing changes on error.
    pub fn apply(
        &mut self,
        inst: &Instance,
        a_new: &[Arc],
        a_old: &[Arc],
    ) -> Result<ConstructionStep, StepError> {
        if a_new.len() <= a_old.len() {
            return Err(StepError::NoNetGain {
                added: a_new.len(),
                removed: a_old.len(),
            });
        }
        let mut removed = BTreeSet::new();
        for arc in a_old {
            inst.check_vertex(arc.v())?;
            if !self.arcs.contains(arc) || !removed.insert(*arc) {
                return Err(StepError::RemovesAbsentArc(*arc));
            }
        }
        let mut added = BTreeSet::new();
        for arc in a_new {
            inst.check_vertex(arc.v())?;
            if self.arcs.contains(arc) || !added.insert(*arc) {
                return Err(StepError::DuplicateArc(*arc));
            }
        }
        let m = a_new.len() - a_old.len();
        if self.arcs.len() + m > self.n {
            return Err(StepError::TooManyArcs(self.n));
        }

        let i = self.arcs.len();
        let w_before = self.weight;
        let delta_a = inst.arcs_weight(a_new) - inst.arcs_weight(a_old);
        for arc in a_old {
            self.arcs.remove(arc);
            self.degree[arc.u()] -= 1;
            self.degree[arc.v()] -= 1;
        }
        for arc in a_new {
            self.arcs.insert(*arc);
            self.degree[arc.u()] += 1;
            self.degree[arc.v()] += 1;
            self.components.union(arc.u(), arc.v());
        }
        self.weight = w_before + delta_a;
        Ok(ConstructionStep::new(
            i,
            a_new.to_vec(),
            a_old.to_vec(),
            w_before,
            delta_a,
        ))
    }
}

/// Functional form of [`PartialSolution::apply`].
pub fn apply_step(
    mut sol: PartialSolution,
    a_new: &[Arc],
    a_old: &[Arc],
    inst: &Instance,
) -> Result<(PartialSolution, ConstructionStep), StepError> {
    let step = sol.apply(inst, a_new, a_old)?;
    Ok((sol, step))
}

/// One constructive move.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionStep {
    /// Arc count before the move.
    pub i: usize,
    pub a_new: Vec<Arc>,
    pub a_old: Vec<Arc>,
    pub m: usize,
    pub delta_a: Weight,
    pub w_before: Weight,
    pub w_after: Weight,
    /// Derived; recomputed on load rather than serialized.
    #[serde(skip)]
    pub r: Option<f64>,
    #[serde(skip)]
    pub rho: Option<f64>,
}

impl ConstructionStep {
    pub fn new(
        i: usize,
        a_new: Vec<Arc>,
        a_old: Vec<Arc>,
        w_before: Weight,
        delta_a: Weight,
    ) -> Self {
        let m = a_new.len().saturating_sub(a_old.len());
        let mut step = ConstructionStep {
            i,
            a_new,
            a_old,
            m,
            delta_a,
            w_before,
            w_after: w_before + delta_a,
            r: None,
            rho: None,
        };
        step.refresh_ratios();
        step
    }

    /// Accounting-only record without arc lists, for analysing `(i, m, w, delta)` tuples.
    pub fn accounting(i: usize, m: usize, w_before: Weight, delta_a: Weight) -> Self {
        let mut step = ConstructionStep {
            i,
            a_new: Vec::new(),
            a_old: Vec::new(),
            m,
            delta_a,
            w_before,
            w_after: w_before + delta_a,
            r: None,
            rho: None,
        };
        step.refresh_ratios();
        step
    }

    /// Recomputes `r` and `rho` from the integer fields.
    pub fn refresh_ratios(&mut self) {
        if self.w_before > 0 {
            let w_before = i128::from(self.w_before);
            let w_after = i128::from(self.w_before) + i128::from(self.delta_a);
            self.r = Some(w_after as f64 / w_before as f64);
            // One rounding of the exact quotient, so rho is exactly 1.0 on the boundary.
            self.rho = (self.i >= 1).then(|| {
                let i = self.i as i128;
                let m = self.m as i128;
                (i * w_after) as f64 / ((i + m) * w_before) as f64
            });
        } else {
            self.r = None;
            self.rho = None;
        }
    }
}

/// `R_i` together with whether `i >= 2`, the range in which it is
/// originally stated. Steps with `i = 1` are still reported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRatio {
    pub value: f64,
    pub in_paper_domain: bool,
}

pub fn step_ratio(step: &ConstructionStep) -> Option<StepRatio> {
    if step.w_before <= 0 {
        return None;
    }
    let value = (i128::from(step.w_before) + i128::from(step.delta_a)) as f64
        / step.w_before as f64;
    Some(StepRatio {
        value,
        in_paper_domain: step.i >= 2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AvArcVerdict {
    Satisfied,
    Violated,
    Undefined,
}

/// Average-arc condition `delta_a / w_before <= m / i`, decided exactly by
/// cross-multiplication.
pub fn check_avarc(step: &ConstructionStep) -> AvArcVerdict {
    if step.w_before <= 0 || step.i == 0 {
        return AvArcVerdict::Undefined;
    }
    let lhs = i128::from(step.delta_a) * step.i as i128;
    let rhs = step.m as i128 * i128::from(step.w_before);
    if lhs <= rhs {
        AvArcVerdict::Satisfied
    } else {
        AvArcVerdict::Violated
    }
}

/// Completed construction run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub instance_name: String,
    pub heuristic: String,
    pub n: usize,
    pub steps: Vec<ConstructionStep>,
    pub final_arcs: Vec<Arc>,
    pub final_weight: Weight,
    /// Set when construction had to use an absent arc.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub beta_used: bool,
}

impl Trace {
    /// Largest per-step `m`.
    pub fn m_max(&self) -> usize {
        self.steps.iter().map(|s| s.m).max().unwrap_or(0)
    }

    /// The final cycle as a vertex sequence starting at 0, when it is one.
    pub fn tour(&self) -> Option<Vec<usize>> {
        let mut adjacency = vec![Vec::with_capacity(2); self.n];
        for arc in &self.final_arcs {
            if arc.v() >= self.n {
                return None;
            }
            adjacency[arc.u()].push(arc.v());
            adjacency[arc.v()].push(arc.u());
        }
        if self.n == 0 || adjacency.iter().any(|adj| adj.len() != 2) {
            return None;
        }
        let mut order = Vec::with_capacity(self.n);
        let (mut prev, mut cur) = (usize::MAX, 0);
        loop {
            order.push(cur);
            let next = if adjacency[cur][0] != prev {
                adjacency[cur][0]
            } else {
                adjacency[cur][1]
            };
            prev = cur;
            cur = next;
            if cur == 0 || order.len() > self.n {
                break;
            }
        }
        (order.len() == self.n).then_some(order)
    }
}

/// Drives a [`PartialSolution`] from empty to a finished [`Trace`].
#[derive(Debug)]
pub struct TraceRecorder<'a> {
    inst: &'a Instance,
    sol: PartialSolution,
    steps: Vec<ConstructionStep>,
    beta_used: bool,
}

impl<'a> TraceRecorder<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        TraceRecorder {
            inst,
            sol: PartialSolution::empty(inst.n()),
            steps: Vec::with_capacity(inst.n()),
            beta_used: false,
        }
    }

    pub fn solution(&self) -> &PartialSolution {
        &self.sol
    }

    pub fn solution_mut(&mut self) -> &mut PartialSolution {
        &mut self.sol
    }

    pub fn push(&mut self, a_new: &[Arc], a_old: &[Arc]) -> Result<&ConstructionStep, StepError> {
        let step = self.sol.apply(self.inst, a_new, a_old)?;
        self.beta_used |= a_new.iter().any(|a| self.inst.is_absent(a.u(), a.v()));
        self.steps.push(step);
        Ok(self.steps.last().expect("just pushed"))
    }

    pub fn finish(self, heuristic: &str) -> Trace {
        Trace {
            instance_name: self.inst.name().to_string(),
            heuristic: heuristic.to_string(),
            n: self.inst.n(),
            steps: self.steps,
            final_arcs: self.sol.arcs.iter().copied().collect(),
            final_weight: self.sol.weight,
            beta_used: self.beta_used,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// `i` must equal the arc count before the step.
    StepIndex,
    /// `m` must equal `|a_new| - |a_old|`.
    NetArcs,
    /// `m >= 1`.
    PositiveGain,
    ArcRange,
    RemovedAbsent,
    AddedDuplicate,
    /// `delta_a` must equal `w(a_new) - w(a_old)`.
    DeltaWeight,
    /// `w_after = w_before + delta_a`.
    StepWeight,
    /// `w_before` of each step equals `w_after` of the previous one (0 for the first).
    Chaining,
    /// `final_weight` equals the sum of all `delta_a`.
    Telescoping,
    /// `final_arcs` equals the replayed arc set.
    FinalArcs,
    /// `final_weight` equals `gw(final_arcs)`.
    FinalWeight,
    /// `|final_arcs| = n`.
    Cardinality,
    /// Every vertex has degree 2 in the final structure.
    Degree,
    /// The final structure is a single cycle.
    Connectivity,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Rule::StepIndex => "step-index",
            Rule::NetArcs => "net-arcs",
            Rule::PositiveGain => "positive-gain",
            Rule::ArcRange => "arc-range",
            Rule::RemovedAbsent => "removed-absent",
            Rule::AddedDuplicate => "added-duplicate",
            Rule::DeltaWeight => "delta-weight",
            Rule::StepWeight => "step-weight",
            Rule::Chaining => "chaining",
            Rule::Telescoping => "telescoping",
            Rule::FinalArcs => "final-arcs",
            Rule::FinalWeight => "final-weight",
            Rule::Cardinality => "cardinality",
            Rule::Degree => "degree",
            Rule::Connectivity => "connectivity",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Offending step index; `None` for whole-trace rules.
    pub step: Option<usize>,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.step {
            Some(k) => write!(f, "steps[{k}] {}: {}", self.rule, self.detail),
            None => write!(f, "{}: {}", self.rule, self.detail),
        }
    }
}

/// Replays `trace` against `inst` and lists every broken rule. Empty means the
/// trace is a correct construction ending in a Hamiltonian cycle of `n` arcs.
pub fn validate_trace(trace: &Trace, inst: &Instance) -> Result<Vec<Violation>, TraceError> {
    let n = inst.n();
    if trace.n != n {
        return Err(TraceError::SizeMismatch {
            trace: trace.n,
            instance: n,
        });
    }
    let mut out = Vec::new();
    let mut flag = |step: Option<usize>, rule: Rule, detail: String| {
        out.push(Violation { step, rule, detail });
    };

    let mut arcs = BTreeSet::new();
    let mut replay_weight: Weight = 0;
    let mut telescoped: i128 = 0;
    let mut prev_after: Weight = 0;
    for (k, step) in trace.steps.iter().enumerate() {
        let at = Some(k);
        if step.i != arcs.len() {
            flag(at, Rule::StepIndex, format!("i = {} but |S| = {}", step.i, arcs.len()));
        }
        let net = step.a_new.len() as i64 - step.a_old.len() as i64;
        if step.m as i64 != net {
            flag(at, Rule::NetArcs, format!("m = {} but |a_new| - |a_old| = {net}", step.m));
        }
        if step.m < 1 {
            flag(at, Rule::PositiveGain, format!("m = {}", step.m));
        }
        if step.w_before != prev_after {
            let expected = if k == 0 { "0".to_string() } else { format!("steps[{}].w_after = {prev_after}", k - 1) };
            flag(at, Rule::Chaining, format!("w_before = {} but expected {expected}", step.w_before));
        }
        if i128::from(step.w_before) + i128::from(step.delta_a) != i128::from(step.w_after) {
            flag(
                at,
                Rule::StepWeight,
                format!("{} + {} != {}", step.w_before, step.delta_a, step.w_after),
            );
        }
        prev_after = step.w_after;
        telescoped += i128::from(step.delta_a);

        let mut in_range = true;
        for arc in step.a_new.iter().chain(&step.a_old) {
            if arc.v() >= n {
                flag(at, Rule::ArcRange, format!("arc {arc} outside 0..{n}"));
                in_range = false;
            }
        }
        if !in_range {
            continue;
        }
        let mut delta: Weight = 0;
        for arc in &step.a_old {
            if !arcs.remove(arc) {
                flag(at, Rule::RemovedAbsent, format!("arc {arc} not in S"));
            }
            delta -= inst.weight(arc.u(), arc.v());
        }
        for arc in &step.a_new {
            if !arcs.insert(*arc) {
                flag(at, Rule::AddedDuplicate, format!("arc {arc} already in S"));
            }
            delta += inst.weight(arc.u(), arc.v());
        }
        if delta != step.delta_a {
            flag(at, Rule::DeltaWeight, format!("delta_a = {} but arcs give {delta}", step.delta_a));
        }
        replay_weight += delta;
    }

    if telescoped != i128::from(trace.final_weight) {
        flag(
            None,
            Rule::Telescoping,
            format!("sum of delta_a = {telescoped} but final_weight = {}", trace.final_weight),
        );
    }
    let final_set: BTreeSet<Arc> = trace.final_arcs.iter().copied().collect();
    if final_set != arcs || final_set.len() != trace.final_arcs.len() {
        flag(None, Rule::FinalArcs, "final_arcs differ from the replayed arc set".to_string());
    }
    if trace.final_arcs.len() != n {
        flag(
            None,
            Rule::Cardinality,
            format!("|final_arcs| = {} != {n}", trace.final_arcs.len()),
        );
    }
    let in_range: Vec<&Arc> = trace.final_arcs.iter().filter(|a| a.v() < n).collect();
    if in_range.len() != trace.final_arcs.len() {
        flag(None, Rule::ArcRange, "final_arcs reference vertices outside the instance".to_string());
    }
    let gw = inst.arcs_weight(in_range.iter().copied());
    if gw != trace.final_weight || replay_weight != trace.final_weight {
        flag(
            None,
            Rule::FinalWeight,
            format!("final_weight = {} but gw(final_arcs) = {gw}", trace.final_weight),
        );
    }
    let mut degree = vec![0u32; n];
    let mut sets = DisjointSets::new(n);
    for arc in &in_range {
        degree[arc.u()] += 1;
        degree[arc.v()] += 1;
        sets.union(arc.u(), arc.v());
    }
    let off: Vec<usize> = (0..n).filter(|&v| degree[v] != 2).collect();
    if !off.is_empty() {
        flag(None, Rule::Degree, format!("vertices without degree 2: {off:?}"));
    }
    if sets.set_size(0) != n {
        flag(None, Rule::Connectivity, format!("final structure spans {} of {n} vertices from 0", sets.set_size(0)));
    }
    Ok(out)
}
