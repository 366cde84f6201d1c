//! Symmetric TSP instances: a complete weighted graph where missing arcs
//! carry a sentinel weight (`beta`) large enough that no tour using one can
//! beat a tour that avoids them.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact integer arc weight.
pub type Weight = i64;

/// Smallest instance that admits a Hamiltonian cycle.
pub const MIN_VERTICES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("instance needs at least {MIN_VERTICES} vertices, got {0}")]
    TooSmall(usize),
    #[error("row {row} has {found} entries, expected {expected}")]
    DimensionMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("matrix is asymmetric at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("negative weight {weight} at ({i}, {j})")]
    NegativeWeight { i: usize, j: usize, weight: Weight },
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("non-finite coordinate for point {0}")]
    NonFiniteCoordinate(usize),
    #[error("weights too large: tour values would overflow")]
    WeightOverflow,
}

/// Undirected arc, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    u: usize,
    v: usize,
}

impl Arc {
    pub fn new(a: usize, b: usize) -> Result<Self, InstanceError> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Arc { u: a, v: b }),
            std::cmp::Ordering::Greater => Ok(Arc { u: b, v: a }),
            std::cmp::Ordering::Equal => Err(InstanceError::SelfLoop(a)),
        }
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn touches(&self, vertex: usize) -> bool {
        self.u == vertex || self.v == vertex
    }

    /// Endpoint opposite `vertex`; `None` when `vertex` is not on the arc.
    pub fn other(&self, vertex: usize) -> Option<usize> {
        if vertex == self.u {
            Some(self.v)
        } else if vertex == self.v {
            Some(self.u)
        } else {
            None
        }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

impl Serialize for Arc {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.u, self.v].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Arc {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [a, b] = <[usize; 2]>::deserialize(deserializer)?;
        Arc::new(a, b).map_err(serde::de::Error::custom)
    }
}

/// A point in the plane, as used by TSPLIB `EUC_2D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// TSPLIB `nint` rounding of the Euclidean distance.
pub fn euc_2d(a: Point, b: Point) -> Weight {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    ((dx * dx + dy * dy).sqrt() + 0.5).floor() as Weight
}

#[derive(Debug, Clone)]
enum Weights {
    /// Row-major `n * n`; `None` marks an absent arc.
    Matrix(Vec<Option<Weight>>),
    /// Coordinates; weights computed on demand so large instances stay O(n).
    Points(Vec<Point>),
}

/// Immutable symmetric instance `<E, d>` with sentinel `beta`.
#[derive(Debug, Clone)]
pub struct Instance {
    name: String,
    n: usize,
    weights: Weights,
    beta: Weight,
    max_weight: Weight,
}

impl Instance {
    /// Builds an instance from a dense symmetric matrix. Diagonal entries are ignored.
    pub fn from_matrix(
        name: impl Into<String>,
        rows: &[Vec<Weight>],
    ) -> Result<Self, InstanceError> {
        let partial: Vec<Vec<Option<Weight>>> = rows
            .iter()
            .map(|row| row.iter().copied().map(Some).collect())
            .collect();
        Self::from_partial_matrix(name, &partial)
    }

    /// Like [`Instance::from_matrix`], but `None` entries mark arcs absent from `E`.
    /// Absent arcs weigh `beta`.
    pub fn from_partial_matrix(
        name: impl Into<String>,
        rows: &[Vec<Option<Weight>>],
    ) -> Result<Self, InstanceError> {
        let n = rows.len();
        if n < MIN_VERTICES {
            return Err(InstanceError::TooSmall(n));
        }
        for (row, entries) in rows.iter().enumerate() {
            if entries.len() != n {
                return Err(InstanceError::DimensionMismatch {
                    row,
                    expected: n,
                    found: entries.len(),
                });
            }
        }
        let mut flat = vec![None; n * n];
        let mut max_weight = 0;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let w = rows[i][j];
                if w != rows[j][i] {
                    return Err(InstanceError::Asymmetric { i, j });
                }
                if let Some(weight) = w {
                    if weight < 0 {
                        return Err(InstanceError::NegativeWeight { i, j, weight });
                    }
                    max_weight = max_weight.max(weight);
                }
                flat[i * n + j] = w;
            }
        }
        Self::finish(name.into(), n, Weights::Matrix(flat), max_weight)
    }

    /// Euclidean instance with TSPLIB `nint` rounding.
    pub fn from_points(name: impl Into<String>, points: Vec<Point>) -> Result<Self, InstanceError> {
        let n = points.len();
        if n < MIN_VERTICES {
            return Err(InstanceError::TooSmall(n));
        }
        if let Some(bad) = points
            .iter()
            .position(|p| !p.x.is_finite() || !p.y.is_finite())
        {
            return Err(InstanceError::NonFiniteCoordinate(bad));
        }
        let mut max_weight = 0;
        for (i, &a) in points.iter().enumerate() {
            for &b in &points[i + 1..] {
                max_weight = max_weight.max(euc_2d(a, b));
            }
        }
        Self::finish(name.into(), n, Weights::Points(points), max_weight)
    }

    fn finish(
        name: String,
        n: usize,
        weights: Weights,
        max_weight: Weight,
    ) -> Result<Self, InstanceError> {
        let count = n as Weight;
        // beta = n * max + 1; tour values (at most n * beta) must also fit.
        let beta = count
            .checked_mul(max_weight)
            .and_then(|w| w.checked_add(1))
            .ok_or(InstanceError::WeightOverflow)?;
        beta.checked_mul(count)
            .ok_or(InstanceError::WeightOverflow)?;
        Ok(Instance {
            name,
            n,
            weights,
            beta,
            max_weight,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> Weight {
        self.beta
    }

    /// Largest finite arc weight.
    pub fn max_weight(&self) -> Weight {
        self.max_weight
    }

    /// Coordinates, when the instance was built from points.
    pub fn points(&self) -> Option<&[Point]> {
        match &self.weights {
            Weights::Points(points) => Some(points),
            Weights::Matrix(_) => None,
        }
    }

    pub fn has_absent_arcs(&self) -> bool {
        match &self.weights {
            Weights::Matrix(flat) => (0..self.n)
                .any(|i| (0..self.n).any(|j| i != j && flat[i * self.n + j].is_none())),
            Weights::Points(_) => false,
        }
    }

    /// `d(u, v)` for distinct in-range vertices; absent arcs weigh `beta`.
    ///
    /// Panics on out-of-range vertices. Use [`Instance::arc_weight`] for a checked lookup.
    #[inline]
    pub fn weight(&self, u: usize, v: usize) -> Weight {
        self.finite_weight(u, v).unwrap_or(self.beta)
    }

    /// `d(u, v)`, or `None` when the arc is absent.
    #[inline]
    pub fn finite_weight(&self, u: usize, v: usize) -> Option<Weight> {
        match &self.weights {
            Weights::Matrix(flat) => flat[u * self.n + v],
            Weights::Points(points) => Some(euc_2d(points[u], points[v])),
        }
    }

    pub fn is_absent(&self, u: usize, v: usize) -> bool {
        u != v && self.finite_weight(u, v).is_none()
    }

    pub fn arc_weight(&self, arc: &Arc) -> Result<Weight, InstanceError> {
        self.check_vertex(arc.v)?;
        Ok(self.weight(arc.u, arc.v))
    }

    pub fn check_vertex(&self, vertex: usize) -> Result<(), InstanceError> {
        if vertex < self.n {
            Ok(())
        } else {
            Err(InstanceError::VertexOutOfRange { vertex, n: self.n })
        }
    }

    /// `gw X`: total weight of an arc collection.
    pub fn arcs_weight<'a>(&self, arcs: impl IntoIterator<Item = &'a Arc>) -> Weight {
        arcs.into_iter().map(|a| self.weight(a.u, a.v)).sum()
    }

    /// Weight of the closed tour visiting `order` in sequence.
    pub fn tour_weight(&self, order: &[usize]) -> Weight {
        match order {
            [] | [_] => 0,
            [first, .., last] => {
                let path: Weight = order.windows(2).map(|w| self.weight(w[0], w[1])).sum();
                path + self.weight(*last, *first)
            }
        }
    }

    /// Triangle inequality over all distinct triples. Any absent arc makes this false.
    pub fn is_metric(&self) -> bool {
        if self.has_absent_arcs() {
            return false;
        }
        let n = self.n;
        for u in 0..n {
            for v in 0..n {
                if v == u {
                    continue;
                }
                let uv = self.weight(u, v);
                for w in 0..n {
                    if w == u || w == v {
                        continue;
                    }
                    if self.weight(u, w) > uv + self.weight(v, w) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Dense copy of the matrix, absent arcs as `None`, diagonal as `Some(0)`.
    pub fn to_rows(&self) -> Vec<Vec<Option<Weight>>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| if i == j { Some(0) } else { self.finite_weight(i, j) })
                    .collect()
            })
            .collect()
    }
}

/// Equal when names, sizes and every off-diagonal entry agree, regardless of storage.
impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.name == other.name
            && self.beta == other.beta
            && (0..self.n).all(|i| {
                (i + 1..self.n).all(|j| self.finite_weight(i, j) == other.finite_weight(i, j))
            })
    }
}
