use serde::Serialize;

use super::graph::{MetricGraph, VertexId, VertexSet};
use super::search::{dijkstra, Search, NO_PRED};
use crate::error::{LabError, Result};
use crate::path::{PathKind, PlanarPath};

fn search_from(graph: &MetricGraph, sources: &[VertexId], target: Option<VertexId>) -> Search {
    dijkstra(
        graph.num_vertices(),
        sources,
        |u, buf| graph.for_each_neighbor(u, |v, w| buf.push((v, w))),
        |u, _| Some(u) == target,
    )
}

/// Shortest-path distance between two vertices.
pub fn distance(graph: &MetricGraph, a: VertexId, b: VertexId) -> Result<f64> {
    graph.check_vertex(a)?;
    graph.check_vertex(b)?;
    Ok(search_from(graph, &[a], Some(b)).dist[b])
}

/// Distances from `source` to every vertex.
pub fn distances_from(graph: &MetricGraph, source: VertexId) -> Result<Vec<f64>> {
    graph.check_vertex(source)?;
    Ok(search_from(graph, &[source], None).dist)
}

/// Shortest-path tree rooted at a vertex.
#[derive(Debug, Clone)]
pub struct ShortestPathTree {
    pub root: VertexId,
    pub dist: Vec<f64>,
    pred: Vec<u32>,
}

impl ShortestPathTree {
    pub fn new(graph: &MetricGraph, root: VertexId) -> Result<Self> {
        graph.check_vertex(root)?;
        let s = search_from(graph, &[root], None);
        Ok(ShortestPathTree {
            root,
            dist: s.dist,
            pred: s.pred,
        })
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        match self.pred[v] {
            NO_PRED => None,
            p => Some(p as usize),
        }
    }

    /// Vertex sequence from `v` back to the root.
    pub fn branch(&self, v: VertexId) -> Vec<VertexId> {
        let mut out = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            out.push(p);
            cur = p;
        }
        out
    }
}

fn vertices_to_path(graph: &MetricGraph, seq: &[VertexId]) -> Result<PlanarPath> {
    let mut cum = Vec::with_capacity(seq.len());
    let mut acc = 0.0;
    cum.push(0.0);
    for w in seq.windows(2) {
        acc += graph
            .edge_weight(w[0], w[1])
            .expect("consecutive geodesic vertices are lattice neighbors");
        cum.push(acc);
    }
    let pts = seq.iter().map(|&v| graph.position(v)).collect();
    PlanarPath::new(pts, cum, PathKind::Geodesic)
}

/// Shortest path from `a` to `b` along lattice edges.
///
/// Equal-length alternatives are resolved by preferring the predecessor with
/// the smaller vertex index.
pub fn geodesic(graph: &MetricGraph, a: VertexId, b: VertexId) -> Result<PlanarPath> {
    Ok(geodesic_with_vertices(graph, a, b)?.0)
}

/// Like [`geodesic`], also returning the lattice vertex sequence.
pub fn geodesic_with_vertices(graph: &MetricGraph, a: VertexId, b: VertexId) -> Result<(PlanarPath, Vec<VertexId>)> {
    graph.check_vertex(a)?;
    graph.check_vertex(b)?;
    if a == b {
        return Err(LabError::DegenerateInput(format!(
            "geodesic endpoints coincide at vertex {a}"
        )));
    }
    let seq = search_from(graph, &[a], Some(b)).path_to(b);
    Ok((vertices_to_path(graph, &seq)?, seq))
}

/// Open metric ball: every vertex at distance strictly less than `radius`.
#[derive(Debug, Clone, Serialize)]
pub struct MetricBall {
    pub center: VertexId,
    pub radius: f64,
    /// `(vertex, distance)` sorted by vertex id.
    pub members: Vec<(VertexId, f64)>,
    /// Members with at least one neighbor outside the ball, sorted.
    pub boundary: Vec<VertexId>,
}

impl MetricBall {
    pub fn contains(&self, v: VertexId) -> bool {
        self.members.binary_search_by_key(&v, |&(u, _)| u).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn metric_ball(graph: &MetricGraph, center: VertexId, radius: f64) -> Result<MetricBall> {
    graph.check_vertex(center)?;
    if !(radius > 0.0) {
        return Err(LabError::invalid(format!("ball radius must be positive, got {radius}")));
    }
    let s = dijkstra(
        graph.num_vertices(),
        &[center],
        |u, buf| graph.for_each_neighbor(u, |v, w| buf.push((v, w))),
        |_, d| d >= radius,
    );
    let mut members: Vec<(VertexId, f64)> = s
        .order
        .iter()
        .filter(|&&v| s.dist[v] < radius)
        .map(|&v| (v, s.dist[v]))
        .collect();
    members.sort_unstable_by_key(|&(v, _)| v);
    let inside = |v: VertexId| s.settled[v] && s.dist[v] < radius;
    let boundary = members
        .iter()
        .map(|&(v, _)| v)
        .filter(|&v| graph.neighbors(v).iter().any(|&(u, _)| !inside(u)))
        .collect();
    Ok(MetricBall {
        center,
        radius,
        members,
        boundary,
    })
}

/// Shortest-path length using only edges with both endpoints in `region`.
/// `Ok(None)` means `b` cannot be reached from `a` inside the region.
pub fn internal_distance(graph: &MetricGraph, region: &VertexSet, a: VertexId, b: VertexId) -> Result<Option<f64>> {
    graph.check_vertex(a)?;
    graph.check_vertex(b)?;
    if !region.contains(a) || !region.contains(b) {
        return Err(LabError::invalid(format!(
            "endpoints {a} and {b} must both belong to the region"
        )));
    }
    let s = restricted_search(graph, region, &[a], |u, _| u == b);
    Ok(s.dist[b].is_finite().then_some(s.dist[b]))
}

pub(crate) fn restricted_search(
    graph: &MetricGraph,
    region: &VertexSet,
    sources: &[VertexId],
    stop: impl FnMut(usize, f64) -> bool,
) -> Search {
    dijkstra(
        graph.num_vertices(),
        sources,
        |u, buf| {
            graph.for_each_neighbor(u, |v, w| {
                if region.contains(v) {
                    buf.push((v, w))
                }
            })
        },
        stop,
    )
}
