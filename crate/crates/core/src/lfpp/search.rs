//! Label-setting shortest paths over an implicit graph.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

pub(crate) const NO_PRED: u32 = u32::MAX;

#[derive(Clone, Copy)]
struct Entry {
    d: f64,
    v: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // min-heap on (d, v)
    fn cmp(&self, other: &Self) -> Ordering {
        other.d.total_cmp(&self.d).then_with(|| other.v.cmp(&self.v))
    }
}

pub(crate) struct Search {
    pub dist: Vec<f64>,
    pub pred: Vec<u32>,
    pub settled: Vec<bool>,
    /// Vertices in the order they were settled.
    pub order: Vec<usize>,
}

impl Search {
    pub fn path_to(&self, target: usize) -> Vec<usize> {
        let mut out = vec![target];
        let mut v = target;
        while self.pred[v] != NO_PRED {
            v = self.pred[v] as usize;
            out.push(v);
        }
        out.reverse();
        out
    }
}

/// Dijkstra from `sources` (all at distance 0).
///
/// `expand(u, buf)` pushes `(neighbor, weight)` pairs of `u` into `buf`.
/// After each vertex is settled, `stop(u, d)` may end the search. Among
/// equal-length predecessors the one with the smallest index wins, so the
/// result does not depend on the order `expand` lists neighbors in.
pub(crate) fn dijkstra<E, S>(num: usize, sources: &[usize], mut expand: E, mut stop: S) -> Search
where
    E: FnMut(usize, &mut Vec<(usize, f64)>),
    S: FnMut(usize, f64) -> bool,
{
    let mut dist = vec![f64::INFINITY; num];
    let mut pred = vec![NO_PRED; num];
    let mut settled = vec![false; num];
    let mut order = Vec::new();
    let mut heap = BinaryHeap::new();
    for &s in sources {
        if dist[s] != 0.0 {
            dist[s] = 0.0;
            heap.push(Entry { d: 0.0, v: s });
        }
    }
    let mut buf = Vec::with_capacity(8);
    while let Some(Entry { d, v: u }) = heap.pop() {
        if settled[u] || d > dist[u] {
            continue;
        }
        settled[u] = true;
        order.push(u);
        if stop(u, d) {
            break;
        }
        buf.clear();
        expand(u, &mut buf);
        for &(v, w) in &buf {
            if settled[v] {
                continue;
            }
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                pred[v] = u as u32;
                heap.push(Entry { d: nd, v });
            } else if nd == dist[v] && (u as u32) < pred[v] {
                pred[v] = u as u32;
            }
        }
    }
    Search {
        dist,
        pred,
        settled,
        order,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_graph_distances() {
        let s = dijkstra(
            5,
            &[0],
            |u, buf| {
                if u + 1 < 5 {
                    buf.push((u + 1, 1.5));
                }
                if u > 0 {
                    buf.push((u - 1, 1.5));
                }
            },
            |_, _| false,
        );
        assert_eq!(s.dist, vec![0.0, 1.5, 3.0, 4.5, 6.0]);
        assert_eq!(s.path_to(3), vec![0, 1, 2, 3]);
    }

    #[test]
    fn ties_prefer_smaller_predecessor() {
        // 0 -> {2, 1} -> 3 with equal lengths through 1 and 2
        let edges = |u: usize, buf: &mut Vec<(usize, f64)>| match u {
            0 => buf.extend([(2, 1.0), (1, 1.0)]),
            1 | 2 => buf.push((3, 1.0)),
            _ => {}
        };
        let s = dijkstra(4, &[0], edges, |_, _| false);
        assert_eq!(s.path_to(3), vec![0, 1, 3]);
    }
}
