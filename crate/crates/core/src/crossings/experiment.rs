use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{center_grid, crossings_at_centers, CrossingReport};
use super::stats::wilson_interval;
use crate::error::{LabError, Result};
use crate::geom::{Point, Rect};
use crate::lfpp::{geodesic, MetricGraph, VertexId};
use crate::loewner::{chordal_trace_refined, sample_driving, DrivingFunction};
use crate::path::PlanarPath;
use crate::rng::{derive_seed, derive_stream, rng_from_seed};

/// Paths whose best annulus is crossed more than this many times would give a
/// geodesic a shortcut.
pub const GEODESIC_CROSSING_LIMIT: usize = 4;

/// Crossing reports for one `epsilon` over a batch of paths, with the
/// frequency of `max_count > threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingFrequency {
    pub epsilon: f64,
    pub alpha: f64,
    pub threshold: usize,
    pub reports: Vec<CrossingReport>,
    pub exceed: usize,
    pub frequency: f64,
    /// 95% Wilson interval for `frequency`.
    pub interval: (f64, f64),
}

impl CrossingFrequency {
    pub fn from_reports(epsilon: f64, alpha: f64, threshold: usize, reports: Vec<CrossingReport>) -> Result<Self> {
        let exceed = reports.iter().filter(|r| r.max_count > threshold).count();
        let interval = wilson_interval(exceed, reports.len(), 1.96)?;
        Ok(CrossingFrequency {
            epsilon,
            alpha,
            threshold,
            frequency: exceed as f64 / reports.len() as f64,
            reports,
            exceed,
            interval,
        })
    }

    /// Pools the reports of two batches at the same parameters.
    pub fn merge(self, other: CrossingFrequency) -> Result<Self> {
        if self.epsilon != other.epsilon || self.alpha != other.alpha || self.threshold != other.threshold {
            return Err(LabError::invalid("can only merge batches with equal parameters"));
        }
        let mut reports = self.reports;
        reports.extend(other.reports);
        CrossingFrequency::from_reports(self.epsilon, self.alpha, self.threshold, reports)
    }

    pub fn max_counts(&self) -> Vec<usize> {
        self.reports.iter().map(|r| r.max_count).collect()
    }

    /// Writes `path, max_count, argmax_x, argmax_y`, one row per path.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["path", "max_count", "argmax_x", "argmax_y"])?;
        for (i, r) in self.reports.iter().enumerate() {
            let z = r.argmax().unwrap_or_default();
            w.write_record([
                i.to_string(),
                r.max_count.to_string(),
                crate::lfpp::fmt(z.x),
                crate::lfpp::fmt(z.y),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Draws `count` vertex pairs from the central half of the grid, each pair at
/// least a quarter of the grid width apart.
pub fn far_vertex_pairs(graph: &MetricGraph, count: usize, seed: u64) -> Vec<(VertexId, VertexId)> {
    let n = graph.size();
    let (lo, hi) = (n / 4, (3 * n / 4).max(n / 4 + 1));
    let min_sep = (n as f64 / 4.0) * graph.spacing();
    let mut rng = rng_from_seed(derive_stream(seed, "pairs"));
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = graph.vertex(rng.random_range(lo..hi), rng.random_range(lo..hi));
        let b = graph.vertex(rng.random_range(lo..hi), rng.random_range(lo..hi));
        if graph.position(a).dist(graph.position(b)) >= min_sep {
            out.push((a, b));
        }
    }
    out
}

/// Geodesics between far-apart vertex pairs, scored by their largest
/// crossing count over annuli `B(z, eps) \ B(z, eps^alpha)`, one batch per
/// `eps`.
///
/// Centers lie on an `eps / 2` grid over the lattice; centers whose ball
/// `B(z, eps)` contains an endpoint of the geodesic are skipped, since a
/// path that starts inside an annulus is not constrained by it.
pub fn geodesic_crossing_experiment(
    graph: &MetricGraph,
    num_pairs: usize,
    epsilon_list: &[f64],
    alpha: f64,
    seed: u64,
) -> Result<Vec<CrossingFrequency>> {
    if num_pairs == 0 || epsilon_list.is_empty() {
        return Err(LabError::invalid("need at least one pair and one epsilon"));
    }
    let s = graph.spacing();
    for &eps in epsilon_list {
        if !(eps > 0.0 && eps < 1.0 && eps.powf(alpha) > 4.0 * s) {
            return Err(LabError::Resolution(format!(
                "epsilon = {eps} gives inner radius {} not above 4 x spacing = {}",
                eps.powf(alpha),
                4.0 * s
            )));
        }
    }
    let pairs = far_vertex_pairs(graph, num_pairs, seed);
    let paths: Vec<PlanarPath> = pairs
        .par_iter()
        .map(|&(a, b)| geodesic(graph, a, b))
        .collect::<Result<_>>()?;
    let extent = graph.field().extent();
    epsilon_list
        .iter()
        .map(|&eps| {
            let grid = center_grid(&extent, eps / 2.0)?;
            let reports = paths
                .par_iter()
                .map(|p| {
                    let (a, b) = (p.start(), p.end());
                    let centers = grid
                        .iter()
                        .copied()
                        .filter(|z| z.dist(a) > eps && z.dist(b) > eps)
                        .collect();
                    crossings_at_centers(p, eps, alpha, centers)
                })
                .collect::<Result<Vec<_>>>()?;
            CrossingFrequency::from_reports(eps, alpha, GEODESIC_CROSSING_LIMIT, reports)
        })
        .collect()
}

/// Chordal SLE traces scored like [`geodesic_crossing_experiment`], over an
/// `eps / 2` grid of centers covering each trace.
///
/// Each trace is refined until consecutive points are closer than a fifth of
/// the inner radius (see [`chordal_trace_refined`]), so the crossing counter's
/// resolution guard holds.
pub fn sle_crossing_experiment(
    kappa: f64,
    dt: f64,
    horizon: f64,
    epsilon: f64,
    alpha: f64,
    replicas: usize,
    seed: u64,
) -> Result<CrossingFrequency> {
    if replicas == 0 {
        return Err(LabError::invalid("need at least one replica"));
    }
    if !(alpha > 1.0 && epsilon > 0.0 && epsilon < 1.0) {
        return Err(LabError::invalid(format!(
            "need alpha > 1 and epsilon in (0, 1), got alpha = {alpha}, epsilon = {epsilon}"
        )));
    }
    let reports = (0..replicas as u64)
        .into_par_iter()
        .map(|i| {
            let (trace, _) = sle_trace_for_annuli(kappa, dt, horizon, epsilon.powf(alpha), derive_seed(seed, i))?;
            trace_crossings(&trace, epsilon, alpha)
        })
        .collect::<Result<Vec<_>>>()?;
    CrossingFrequency::from_reports(epsilon, alpha, GEODESIC_CROSSING_LIMIT, reports)
}

const SLE_REFINE_ROUNDS: usize = 16;

/// Chordal trace driven by `sqrt(kappa) B` on a `dt` mesh up to `horizon`,
/// refined until consecutive points are closer than `r_in / 5`. Returns the
/// trace with its refined driving function.
pub fn sle_trace_for_annuli(
    kappa: f64,
    dt: f64,
    horizon: f64,
    r_in: f64,
    seed: u64,
) -> Result<(PlanarPath, DrivingFunction)> {
    let driving = sample_driving(kappa, horizon, dt, seed)?;
    chordal_trace_refined(&driving, r_in / 5.0, SLE_REFINE_ROUNDS, derive_stream(seed, "bridge"))
}

/// Crossing counts of a trace over an `eps / 2` grid of centers covering its
/// bounding box widened by `eps` (the real axis below needs no margin).
pub fn trace_crossings(trace: &PlanarPath, epsilon: f64, alpha: f64) -> Result<CrossingReport> {
    let b = trace.bounding_box();
    let region = Rect::new(b.min - Point::new(epsilon, 0.0), b.max + Point::new(epsilon, epsilon));
    let centers = center_grid(&region, epsilon / 2.0)?;
    crossings_at_centers(trace, epsilon, alpha, centers)
}
