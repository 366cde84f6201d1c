//! Constructive tour builders. Each one records every move in a [`Trace`].
//!
//! All ties go to the lowest vertex index, then to the lexicographically
//! smallest arc, so a given instance always yields the same trace.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dsu::DisjointSets;
use crate::instance::{Arc, Instance, Weight};
use crate::trace::{Trace, TraceRecorder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeuristicError {
    #[error("start vertex {start} out of range for n = {n}")]
    StartOutOfRange { start: usize, n: usize },
    #[error("unknown heuristic {0:?} (expected nn, cheapest-insertion or greedy)")]
    Unknown(String),
}

/// Stable identifiers used on the command line and in traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Heuristic {
    NearestNeighbor,
    CheapestInsertion,
    GreedyEdge,
}

impl Heuristic {
    pub const ALL: [Heuristic; 3] = [
        Heuristic::NearestNeighbor,
        Heuristic::CheapestInsertion,
        Heuristic::GreedyEdge,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Heuristic::NearestNeighbor => "nn",
            Heuristic::CheapestInsertion => "cheapest-insertion",
            Heuristic::GreedyEdge => "greedy",
        }
    }

    /// Runs the heuristic. `start` only affects nearest neighbour.
    pub fn run(&self, inst: &Instance, start: usize) -> Result<Trace, HeuristicError> {
        match self {
            Heuristic::NearestNeighbor => nearest_neighbor(inst, start),
            Heuristic::CheapestInsertion => Ok(cheapest_insertion(inst)),
            Heuristic::GreedyEdge => Ok(greedy_edge(inst)),
        }
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Heuristic {
    type Err = HeuristicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Heuristic::ALL
            .into_iter()
            .find(|h| h.id() == s)
            .ok_or_else(|| HeuristicError::Unknown(s.to_string()))
    }
}

fn arc(a: usize, b: usize) -> Arc {
    Arc::new(a, b).expect("heuristics never build self-loops")
}

const MOVE_OK: &str = "heuristic moves are valid by construction";

/// Nearest neighbour from `start`: each move appends the cheapest arc from
/// the path end to an unvisited vertex; the last move closes the cycle.
pub fn nearest_neighbor(inst: &Instance, start: usize) -> Result<Trace, HeuristicError> {
    let n = inst.n();
    if start >= n {
        return Err(HeuristicError::StartOutOfRange { start, n });
    }
    let mut rec = TraceRecorder::new(inst);
    let mut visited = vec![false; n];
    visited[start] = true;
    let mut current = start;
    for _ in 1..n {
        let mut best: Option<(Weight, usize)> = None;
        for v in (0..n).filter(|&v| !visited[v]) {
            let w = inst.weight(current, v);
            if best.is_none_or(|(bw, _)| w < bw) {
                best = Some((w, v));
            }
        }
        let (_, next) = best.expect("an unvisited vertex remains");
        rec.push(&[arc(current, next)], &[]).expect(MOVE_OK);
        visited[next] = true;
        current = next;
    }
    rec.push(&[arc(current, start)], &[]).expect(MOVE_OK);
    Ok(rec.finish(Heuristic::NearestNeighbor.id()))
}

/// Cheapest insertion.
///
/// The seed is the minimum-weight arc `(a, b)` followed by the vertex `k`
/// minimising `d(a, k) + d(b, k)`; its two arcs are added one move at a time
/// so the seed triangle takes three moves. Every later move replaces a tour
/// arc `(u, v)` by `(u, k), (k, v)` for the pair minimising
/// `d(u, k) + d(k, v) - d(u, v)`. All moves have `m = 1`.
pub fn cheapest_insertion(inst: &Instance) -> Trace {
    let n = inst.n();
    let mut rec = TraceRecorder::new(inst);

    let mut seed = arc(0, 1);
    let mut seed_w = inst.weight(0, 1);
    for u in 0..n {
        for v in u + 1..n {
            let w = inst.weight(u, v);
            if w < seed_w {
                seed = arc(u, v);
                seed_w = w;
            }
        }
    }
    let (a, b) = (seed.u(), seed.v());
    let mut third: Option<(Weight, usize)> = None;
    for k in (0..n).filter(|&k| k != a && k != b) {
        let w = inst.weight(a, k) + inst.weight(b, k);
        if third.is_none_or(|(bw, _)| w < bw) {
            third = Some((w, k));
        }
    }
    let (_, c) = third.expect("n >= 3");
    rec.push(&[seed], &[]).expect(MOVE_OK);
    let mut closing = [arc(a, c), arc(b, c)];
    closing.sort();
    for x in closing {
        rec.push(&[x], &[]).expect(MOVE_OK);
    }

    // Tour as a successor array over visited vertices.
    let mut next = vec![usize::MAX; n];
    next[a] = b;
    next[b] = c;
    next[c] = a;
    let mut in_tour = vec![false; n];
    for v in [a, b, c] {
        in_tour[v] = true;
    }

    let insertion_cost =
        |u: usize, v: usize, k: usize| inst.weight(u, k) + inst.weight(k, v) - inst.weight(u, v);
    // Best position per outside vertex: (delta, tour arc, its tail in `next`).
    let full_scan = |k: usize, next: &[usize], anchor: usize| {
        let mut best: Option<(Weight, Arc, usize)> = None;
        let mut u = anchor;
        loop {
            let v = next[u];
            let cand = (insertion_cost(u, v, k), arc(u, v), u);
            if best.is_none_or(|b| (cand.0, cand.1) < (b.0, b.1)) {
                best = Some(cand);
            }
            u = v;
            if u == anchor {
                break;
            }
        }
        best.expect("tour is non-empty")
    };
    let mut best: Vec<Option<(Weight, Arc, usize)>> = (0..n)
        .map(|k| (!in_tour[k]).then(|| full_scan(k, &next, a)))
        .collect();

    for _ in 3..n {
        let (k, (_, old, u)) = best
            .iter()
            .enumerate()
            .filter_map(|(k, b)| b.map(|b| (k, b)))
            .min_by_key(|&(k, (delta, old, _))| (delta, k, old))
            .expect("an outside vertex remains");
        let v = next[u];
        debug_assert_eq!(old, arc(u, v));
        let mut added = [arc(u, k), arc(k, v)];
        added.sort();
        rec.push(&added, &[old]).expect(MOVE_OK);
        next[u] = k;
        next[k] = v;
        in_tour[k] = true;
        best[k] = None;

        for j in 0..n {
            let Some(current) = best[j] else { continue };
            if current.1 == old {
                best[j] = Some(full_scan(j, &next, a));
                continue;
            }
            let mut candidate = current;
            for (x, y) in [(u, k), (k, v)] {
                let cand = (insertion_cost(x, y, j), arc(x, y), x);
                if (cand.0, cand.1) < (candidate.0, candidate.1) {
                    candidate = cand;
                }
            }
            best[j] = Some(candidate);
        }
    }
    rec.finish(Heuristic::CheapestInsertion.id())
}

/// Greedy edge: scan arcs by `(weight, u, v)` and keep each one that leaves
/// every degree at most 2 and closes no cycle early. After `n - 1` arcs the
/// remaining path is closed.
///
/// Sorts all `n(n-1)/2` arcs up front, so memory grows quadratically.
pub fn greedy_edge(inst: &Instance) -> Trace {
    let n = inst.n();
    let mut candidates: Vec<(Weight, Arc)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .map(|(u, v)| (inst.weight(u, v), arc(u, v)))
        .collect();
    candidates.sort_unstable();

    let mut rec = TraceRecorder::new(inst);
    let mut components = DisjointSets::new(n);
    let mut added = 0;
    for (_, x) in candidates {
        if added == n - 1 {
            break;
        }
        let sol = rec.solution();
        if sol.degree(x.u()) >= 2 || sol.degree(x.v()) >= 2 {
            continue;
        }
        if !components.union(x.u(), x.v()) {
            continue;
        }
        rec.push(&[x], &[]).expect(MOVE_OK);
        added += 1;
    }
    let ends: Vec<usize> = (0..n).filter(|&v| rec.solution().degree(v) == 1).collect();
    debug_assert_eq!(ends.len(), 2);
    rec.push(&[arc(ends[0], ends[1])], &[]).expect(MOVE_OK);
    rec.finish(Heuristic::GreedyEdge.id())
}
