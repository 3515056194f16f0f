//! Annulus crossings: counting, scans over centers and scales, and the
//! geodesic versus SLE comparison.

mod count;
mod experiment;
mod grid;
mod scan;
mod stats;

pub use count::{count_crossings, Annulus};
pub use experiment::{
    far_vertex_pairs, geodesic_crossing_experiment, sle_crossing_experiment, sle_trace_for_annuli, trace_crossings,
    CrossingFrequency, GEODESIC_CROSSING_LIMIT,
};
pub use grid::{center_grid, crossings_at_centers, max_crossings_over_grid, CrossingReport};
pub use scan::{max_scan_depth, scale_scan, ScaleEntry, ScaleScan, MIN_SCAN_RADIUS};
pub use stats::{binomial_tail_bound, ks_two_sample, wilson_interval};
