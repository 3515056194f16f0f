//! Metric lengths around and across a Euclidean annulus.
//!
//! Both lengths are computed inside the closed annulus
//! `{w : r_in <= |w - z| <= r_out}`.

use super::graph::{MetricGraph, VertexId, VertexSet};
use super::metric::restricted_search;
use super::search::dijkstra;
use crate::error::{LabError, Result};
use crate::geom::Point;

fn check_annulus(graph: &MetricGraph, z: Point, r_in: f64, r_out: f64) -> Result<()> {
    let s = graph.spacing();
    if !(r_in >= 2.0 * s && r_out > r_in) {
        return Err(LabError::invalid(format!(
            "annulus radii must satisfy 2*spacing <= r_in < r_out, got r_in = {r_in}, r_out = {r_out}, spacing = {s}"
        )));
    }
    let ext = graph.field().extent();
    if z.x - r_out < ext.min.x || z.x + r_out > ext.max.x || z.y - r_out < ext.min.y || z.y + r_out > ext.max.y {
        return Err(LabError::OutOfDomain(format!(
            "annulus of outer radius {r_out} about ({}, {}) leaves the grid",
            z.x, z.y
        )));
    }
    Ok(())
}

/// Vertices of the closed annulus.
pub fn annulus_vertices(graph: &MetricGraph, z: Point, r_in: f64, r_out: f64) -> VertexSet {
    VertexSet::from_positions(graph, |p| {
        let d = p.dist(z);
        d >= r_in && d <= r_out
    })
}

/// Annulus vertices compacted to local indices, with their internal edges.
struct LocalAnnulus {
    members: Vec<VertexId>,
    // (local neighbor, weight, crosses the cut ray)
    adj: Vec<Vec<(u32, f64, bool)>>,
}

impl LocalAnnulus {
    fn new(graph: &MetricGraph, z: Point, r_in: f64, r_out: f64) -> Self {
        let region = annulus_vertices(graph, z, r_in, r_out);
        let members: Vec<VertexId> = region.iter().collect();
        let mut local = vec![u32::MAX; graph.num_vertices()];
        for (l, &v) in members.iter().enumerate() {
            local[v] = l as u32;
        }
        let adj = members
            .iter()
            .map(|&v| {
                let mut out = Vec::with_capacity(4);
                graph.for_each_neighbor(v, |u, w| {
                    if local[u] != u32::MAX {
                        out.push((local[u], w, crosses_ray(graph.position(v), graph.position(u), z)));
                    }
                });
                out
            })
            .collect();
        LocalAnnulus { members, adj }
    }
}

/// Whether the lattice edge `a b` crosses the rightward horizontal ray from
/// `z`. Only vertical edges can; the lower end is strictly below the ray and
/// the upper end on or above it.
fn crosses_ray(a: Point, b: Point, z: Point) -> bool {
    if a.x != b.x || a.x <= z.x {
        return false;
    }
    let (lo, hi) = if a.y < b.y { (a.y, b.y) } else { (b.y, a.y) };
    lo < z.y && z.y <= hi
}

/// Shortest metric length of a closed lattice loop inside the annulus that
/// separates `z` from infinity.
///
/// A loop separates `z` exactly when it crosses the rightward ray from `z` an
/// odd number of times, so the search runs on the two-sheeted cover of the
/// annulus in which each ray crossing switches sheets: for every crossing
/// edge `p q` the shortest loop through it is `w(p q)` plus the distance from
/// `q` back to `p` on the same sheet.
pub fn annulus_separating_length(graph: &MetricGraph, z: Point, r_in: f64, r_out: f64) -> Result<f64> {
    check_annulus(graph, z, r_in, r_out)?;
    let ann = LocalAnnulus::new(graph, z, r_in, r_out);
    let m = ann.members.len();
    let mut best = f64::INFINITY;
    for p in 0..m {
        for &(q, w, flip) in &ann.adj[p] {
            // visit each crossing edge once, from its lower end
            if !flip || graph.position(ann.members[p]).y > graph.position(ann.members[q as usize]).y {
                continue;
            }
            let (src, dst) = (2 * q as usize, 2 * p);
            let bound = best;
            let s = dijkstra(
                2 * m,
                &[src],
                |state, buf| {
                    let (u, sheet) = (state / 2, state % 2);
                    for &(v, wv, f) in &ann.adj[u] {
                        buf.push((2 * v as usize + (sheet ^ f as usize), wv));
                    }
                },
                |state, d| state == dst || d + w >= bound,
            );
            if s.dist[dst].is_finite() {
                best = best.min(s.dist[dst] + w);
            }
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(LabError::Resolution(format!(
            "annulus ({r_in}, {r_out}) about ({}, {}) contains no separating lattice loop at spacing {}",
            z.x,
            z.y,
            graph.spacing()
        )))
    }
}

/// Shortest metric length of a path inside the annulus from its outer
/// boundary vertices (those with a lattice neighbor beyond `r_out`) to its
/// inner boundary vertices (those with a neighbor inside `r_in`).
pub fn annulus_crossing_length(graph: &MetricGraph, z: Point, r_in: f64, r_out: f64) -> Result<f64> {
    check_annulus(graph, z, r_in, r_out)?;
    let region = annulus_vertices(graph, z, r_in, r_out);
    let (outer, inner) = annulus_boundaries(graph, &region, z, r_in, r_out);
    let mut is_inner = vec![false; graph.num_vertices()];
    for &v in &inner {
        is_inner[v] = true;
    }
    let s = restricted_search(graph, &region, &outer, |u, _| is_inner[u]);
    let best = inner.iter().map(|&v| s.dist[v]).fold(f64::INFINITY, f64::min);
    if best.is_finite() {
        Ok(best)
    } else {
        Err(LabError::Resolution(format!(
            "annulus ({r_in}, {r_out}) about ({}, {}) has no lattice path between its boundary circles",
            z.x, z.y
        )))
    }
}

fn annulus_boundaries(
    graph: &MetricGraph,
    region: &VertexSet,
    z: Point,
    r_in: f64,
    r_out: f64,
) -> (Vec<VertexId>, Vec<VertexId>) {
    let mut outer = Vec::new();
    let mut inner = Vec::new();
    for v in region.iter() {
        let (mut o, mut i) = (false, false);
        graph.for_each_neighbor(v, |u, _| {
            let d = graph.position(u).dist(z);
            o |= d > r_out;
            i |= d < r_in;
        });
        if o {
            outer.push(v);
        }
        if i {
            inner.push(v);
        }
    }
    (outer, inner)
}
