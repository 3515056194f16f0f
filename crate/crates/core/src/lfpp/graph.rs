use std::sync::Arc;

use crate::error::{LabError, Result};
use crate::geom::Point;
use crate::grf::GridField;

/// Index of a lattice vertex, `iy * n + ix`.
pub type VertexId = usize;

/// Lattice directions, used to fix the order in which neighbors are scanned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
    Down,
    Up,
}

pub const DEFAULT_ORDER: [Direction; 4] = [Direction::Left, Direction::Right, Direction::Down, Direction::Up];

/// First-passage-percolation graph on the 4-neighbor lattice of a field.
///
/// The edge `{u, v}` has weight `spacing * (exp(xi h(u)) + exp(xi h(v))) / 2`.
#[derive(Debug, Clone)]
pub struct MetricGraph {
    field: Arc<GridField>,
    xi: f64,
    n: usize,
    // weight of (i, i + 1) and (i, i + n); NaN where the edge does not exist
    right: Vec<f64>,
    up: Vec<f64>,
    order: [Direction; 4],
}

pub fn build_metric_graph(field: &GridField, xi: f64) -> Result<MetricGraph> {
    MetricGraph::new(field.clone(), xi)
}

impl MetricGraph {
    pub fn new(field: GridField, xi: f64) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(LabError::invalid(format!("xi must be positive, got {xi}")));
        }
        let n = field.size();
        let s = field.spacing();
        let e: Vec<f64> = field.values().iter().map(|h| (xi * h).exp()).collect();
        if let Some(i) = e.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(LabError::invalid(format!(
                "exp(xi * h) is not a positive finite number at vertex {i}"
            )));
        }
        let mut right = vec![f64::NAN; n * n];
        let mut up = vec![f64::NAN; n * n];
        for i in 0..n * n {
            let (x, y) = (i % n, i / n);
            if x + 1 < n {
                right[i] = s * (e[i] + e[i + 1]) / 2.0;
            }
            if y + 1 < n {
                up[i] = s * (e[i] + e[i + n]) / 2.0;
            }
        }
        Ok(MetricGraph {
            field: Arc::new(field),
            xi,
            n,
            right,
            up,
            order: DEFAULT_ORDER,
        })
    }

    /// Same graph with neighbors scanned in a different order. Search
    /// results do not depend on the order; this exists to check that.
    pub fn with_neighbor_order(&self, order: [Direction; 4]) -> Result<MetricGraph> {
        for d in DEFAULT_ORDER {
            if !order.contains(&d) {
                return Err(LabError::invalid(
                    "neighbor order must be a permutation of the four directions",
                ));
            }
        }
        let mut g = self.clone();
        g.order = order;
        Ok(g)
    }

    pub fn field(&self) -> &GridField {
        &self.field
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Side length of the lattice.
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn num_vertices(&self) -> usize {
        self.n * self.n
    }

    pub fn spacing(&self) -> f64 {
        self.field.spacing()
    }

    pub fn vertex(&self, ix: usize, iy: usize) -> VertexId {
        iy * self.n + ix
    }

    pub fn coords(&self, v: VertexId) -> (usize, usize) {
        (v % self.n, v / self.n)
    }

    pub fn position(&self, v: VertexId) -> Point {
        self.field.position_of(v)
    }

    pub fn nearest_vertex(&self, p: Point) -> Option<VertexId> {
        self.field.nearest_vertex(p)
    }

    pub(crate) fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.num_vertices() {
            Ok(())
        } else {
            Err(LabError::invalid(format!(
                "vertex {v} is not in a graph with {} vertices",
                self.num_vertices()
            )))
        }
    }

    /// Weight of the edge between two lattice neighbors.
    pub fn edge_weight(&self, u: VertexId, v: VertexId) -> Option<f64> {
        let (a, b) = (u.min(v), u.max(v));
        if b >= self.num_vertices() {
            return None;
        }
        if b == a + 1 && a % self.n + 1 < self.n {
            Some(self.right[a])
        } else if b == a + self.n {
            Some(self.up[a])
        } else {
            None
        }
    }

    /// Calls `f(neighbor, weight)` for each lattice neighbor of `v`.
    #[inline]
    pub fn for_each_neighbor(&self, v: VertexId, mut f: impl FnMut(VertexId, f64)) {
        let n = self.n;
        let (x, y) = (v % n, v / n);
        for d in self.order {
            match d {
                Direction::Left if x > 0 => f(v - 1, self.right[v - 1]),
                Direction::Right if x + 1 < n => f(v + 1, self.right[v]),
                Direction::Down if y > 0 => f(v - n, self.up[v - n]),
                Direction::Up if y + 1 < n => f(v + n, self.up[v]),
                _ => {}
            }
        }
    }

    pub fn neighbors(&self, v: VertexId) -> Vec<(VertexId, f64)> {
        let mut out = Vec::with_capacity(4);
        self.for_each_neighbor(v, |u, w| out.push((u, w)));
        out
    }
}

/// A set of graph vertices, stored as a membership mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    mask: Vec<bool>,
    count: usize,
}

impl VertexSet {
    pub fn empty(graph: &MetricGraph) -> Self {
        VertexSet {
            mask: vec![false; graph.num_vertices()],
            count: 0,
        }
    }

    pub fn all(graph: &MetricGraph) -> Self {
        VertexSet {
            mask: vec![true; graph.num_vertices()],
            count: graph.num_vertices(),
        }
    }

    pub fn from_vertices(graph: &MetricGraph, vertices: impl IntoIterator<Item = VertexId>) -> Result<Self> {
        let mut s = VertexSet::empty(graph);
        for v in vertices {
            graph.check_vertex(v)?;
            s.insert(v);
        }
        Ok(s)
    }

    /// Vertices whose plane position satisfies `keep`.
    pub fn from_positions(graph: &MetricGraph, keep: impl Fn(Point) -> bool) -> Self {
        let mask: Vec<bool> = (0..graph.num_vertices()).map(|v| keep(graph.position(v))).collect();
        let count = mask.iter().filter(|&&m| m).count();
        VertexSet { mask, count }
    }

    pub fn insert(&mut self, v: VertexId) {
        if !self.mask[v] {
            self.mask[v] = true;
            self.count += 1;
        }
    }

    pub fn remove(&mut self, v: VertexId) {
        if self.mask[v] {
            self.mask[v] = false;
            self.count -= 1;
        }
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        self.mask.get(v).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i)
    }
}
