//! Exact optimum tours for small instances.
//!
//! Two independent routes: exhaustive enumeration for `n <= 10` and the
//! Held–Karp subset DP for `n <= 20`. Both return the lexicographically
//! least optimal vertex sequence starting at 0.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::instance::{Instance, Weight};

pub const BRUTE_FORCE_MAX: usize = 10;
pub const HELD_KARP_MAX: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Brute,
    HeldKarp,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Brute => "brute",
            Method::HeldKarp => "held-karp",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{method} supports 3 <= n <= {max}, got n = {n}")]
    UnsupportedSize { method: Method, n: usize, max: usize },
    #[error("oracles disagree: brute force {brute}, Held-Karp {held_karp}")]
    Disagreement { brute: Weight, held_karp: Weight },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub value: Weight,
    /// Vertex order starting at 0; the closing arc back to 0 is implicit.
    pub tour: Vec<usize>,
    pub method: Method,
}

fn check_size(inst: &Instance, method: Method, max: usize) -> Result<usize, OracleError> {
    let n = inst.n();
    if (3..=max).contains(&n) {
        Ok(n)
    } else {
        Err(OracleError::UnsupportedSize { method, n, max })
    }
}

/// Enumerates all `(n - 1)! / 2` tours.
pub fn brute_force_opt(inst: &Instance) -> Result<OracleResult, OracleError> {
    let n = check_size(inst, Method::Brute, BRUTE_FORCE_MAX)?;

    struct Search<'a> {
        inst: &'a Instance,
        path: Vec<usize>,
        used: Vec<bool>,
        best: Option<(Weight, Vec<usize>)>,
    }

    impl Search<'_> {
        // Vertices are tried in ascending order, so the first minimiser seen is
        // the lexicographically least one.
        fn extend(&mut self, cost: Weight) {
            let n = self.used.len();
            let last = *self.path.last().expect("path starts at 0");
            if self.path.len() == n {
                // Each cycle appears twice; keep the orientation with path[1] < path[n-1].
                if self.path[1] > self.path[n - 1] {
                    return;
                }
                let total = cost + self.inst.weight(last, 0);
                if self.best.as_ref().is_none_or(|(b, _)| total < *b) {
                    self.best = Some((total, self.path.clone()));
                }
                return;
            }
            for v in 1..n {
                if self.used[v] {
                    continue;
                }
                self.used[v] = true;
                self.path.push(v);
                self.extend(cost + self.inst.weight(last, v));
                self.path.pop();
                self.used[v] = false;
            }
        }
    }

    let mut search = Search {
        inst,
        path: vec![0],
        used: vec![false; n],
        best: None,
    };
    search.used[0] = true;
    search.extend(0);
    let (value, tour) = search.best.expect("n >= 3 has at least one tour");
    Ok(OracleResult {
        value,
        tour,
        method: Method::Brute,
    })
}

pub fn held_karp_opt(inst: &Instance) -> Result<OracleResult, OracleError> {
    held_karp_with(inst, Execution::default())
}

/// Held–Karp with an explicit execution mode. Each subset-size layer depends
/// only on smaller layers, so a layer's rows are filled independently.
pub fn held_karp_with(inst: &Instance, exec: Execution) -> Result<OracleResult, OracleError> {
    let n = check_size(inst, Method::HeldKarp, HELD_KARP_MAX)?;
    // Vertex 0 is the fixed start; bit b of a mask stands for vertex b + 1.
    let k = n - 1;
    let masks = 1usize << k;
    let d: Vec<Weight> = (0..n * n)
        .map(|x| if x / n == x % n { 0 } else { inst.weight(x / n, x % n) })
        .collect();

    // Non-empty masks sorted by popcount, so every layer is one contiguous block of rows.
    let mut order: Vec<u32> = (1..masks as u32).collect();
    order.sort_by_key(|m| (m.count_ones(), *m));
    let mut row_of = vec![0u32; masks];
    for (row, &mask) in order.iter().enumerate() {
        row_of[mask as usize] = row as u32;
    }
    let mut layer_start = vec![0usize; k + 2];
    for &mask in &order {
        layer_start[mask.count_ones() as usize + 1] += 1;
    }
    for c in 1..layer_start.len() {
        layer_start[c] += layer_start[c - 1];
    }

    // cost[row(S) * k + j]: cheapest path from 0 through exactly S ending at j + 1.
    let mut cost = vec![Weight::MAX; order.len() * k];
    for j in 0..k {
        cost[row_of[1 << j] as usize * k + j] = d[j + 1];
    }
    for layer in 2..=k {
        let (done, rest) = cost.split_at_mut(layer_start[layer] * k);
        let rows = layer_start[layer + 1] - layer_start[layer];
        let current = &mut rest[..rows * k];
        let first = layer_start[layer];
        let (done, order, row_of, d) = (&*done, &order, &row_of, &d);
        exec.for_each_chunk_mut(current, k, |r, out| {
            let mask = order[first + r] as usize;
            for j in (0..k).filter(|j| mask & (1 << j) != 0) {
                let prev = mask ^ (1 << j);
                let base = row_of[prev] as usize * k;
                let mut best = Weight::MAX;
                for i in (0..k).filter(|i| prev & (1 << i) != 0) {
                    let c = done[base + i] + d[(i + 1) * n + j + 1];
                    if c < best {
                        best = c;
                    }
                }
                out[j] = best;
            }
        });
    }

    let path_cost = |mask: usize, j: usize| cost[row_of[mask] as usize * k + j];
    let full = masks - 1;
    let value = (0..k)
        .map(|j| path_cost(full, j) + d[(j + 1) * n])
        .min()
        .expect("k >= 2");

    // Walk forward from 0, always taking the smallest vertex that can still
    // finish at the optimum. By symmetry path_cost(R, v) is also the cheapest
    // path from v through R back to 0.
    let mut tour = Vec::with_capacity(n);
    tour.push(0);
    let (mut current, mut remaining, mut budget) = (0usize, full, value);
    while remaining != 0 {
        let j = (0..k)
            .filter(|j| remaining & (1 << j) != 0)
            .find(|&j| d[current * n + j + 1] + path_cost(remaining, j) == budget)
            .expect("some vertex continues an optimal tour");
        budget -= d[current * n + j + 1];
        current = j + 1;
        remaining ^= 1 << j;
        tour.push(current);
    }
    Ok(OracleResult {
        value,
        tour,
        method: Method::HeldKarp,
    })
}

/// Exact optimum for `n <= 20`. With `cross_check` and `n <= 10` both methods
/// run and must agree; the brute-force result is returned.
pub fn optimum(inst: &Instance, cross_check: bool) -> Result<OracleResult, OracleError> {
    let held_karp = held_karp_opt(inst)?;
    if cross_check && inst.n() <= BRUTE_FORCE_MAX {
        let brute = brute_force_opt(inst)?;
        if brute.value != held_karp.value {
            return Err(OracleError::Disagreement {
                brute: brute.value,
                held_karp: held_karp.value,
            });
        }
        return Ok(brute);
    }
    Ok(held_karp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::{d4, ones, triangle_345};

    #[test]
    fn d4_optimum() {
        let brute = brute_force_opt(&d4()).unwrap();
        assert_eq!(brute.value, 6);
        assert_eq!(brute.tour, [0, 1, 3, 2]);
        let hk = held_karp_opt(&d4()).unwrap();
        assert_eq!(hk.value, 6);
        assert_eq!(hk.tour, [0, 1, 3, 2]);
    }

    #[test]
    fn uniform_and_triangle() {
        assert_eq!(brute_force_opt(&ones(5)).unwrap().value, 5);
        assert_eq!(brute_force_opt(&ones(5)).unwrap().tour, [0, 1, 2, 3, 4]);
        assert_eq!(brute_force_opt(&triangle_345()).unwrap().value, 12);
        assert_eq!(held_karp_opt(&triangle_345()).unwrap().value, 12);
        let hk = held_karp_opt(&ones(16)).unwrap();
        assert_eq!(hk.value, 16);
        assert_eq!(hk.tour, (0..16).collect::<Vec<_>>());
    }

    #[test]
    fn forced_beta_shows_in_value() {
        let mut rows = vec![vec![Some(1); 5]; 5];
        for v in 0..5 {
            rows[4][v] = None;
            rows[v][4] = None;
        }
        let inst = Instance::from_partial_matrix("isolated", &rows).unwrap();
        let hk = held_karp_opt(&inst).unwrap();
        assert!(hk.value >= inst.beta());
        assert_eq!(hk.value, brute_force_opt(&inst).unwrap().value);
    }

    #[test]
    fn size_limits() {
        let big = ones(11);
        assert_eq!(
            brute_force_opt(&big),
            Err(OracleError::UnsupportedSize { method: Method::Brute, n: 11, max: 10 })
        );
        assert!(matches!(
            optimum(&ones(25), false),
            Err(OracleError::UnsupportedSize { method: Method::HeldKarp, n: 25, .. })
        ));
        assert_eq!(optimum(&ones(16), true).unwrap().method, Method::HeldKarp);
        assert_eq!(optimum(&ones(8), true).unwrap().method, Method::Brute);
        assert_eq!(optimum(&ones(8), false).unwrap().method, Method::HeldKarp);
    }

    #[test]
    fn execution_modes_agree() {
        let rows: Vec<Vec<Weight>> = (0..9)
            .map(|i: i64| (0..9).map(|j: i64| if i == j { 0 } else { (i * j) % 7 + (i - j).abs() }).collect())
            .collect();
        let inst = Instance::from_matrix("mix", &rows).unwrap();
        let seq = held_karp_with(&inst, Execution::Sequential).unwrap();
        let par = held_karp_with(&inst, Execution::Parallel).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.value, brute_force_opt(&inst).unwrap().value);
        assert_eq!(inst.tour_weight(&seq.tour), seq.value);
    }
}
