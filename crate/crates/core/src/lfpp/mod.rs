//! Liouville first-passage percolation: lattice metrics built from a field,
//! their geodesics and balls, and annulus lengths.

mod annulus;
mod export;
mod graph;
mod metric;
mod search;

pub use annulus::{annulus_crossing_length, annulus_separating_length, annulus_vertices};
pub(crate) use export::fmt;
pub use export::{write_ball_csv, write_path_csv};
pub use graph::{build_metric_graph, Direction, MetricGraph, VertexId, VertexSet, DEFAULT_ORDER};
pub use metric::{
    distance, distances_from, geodesic, geodesic_with_vertices, internal_distance, metric_ball, MetricBall,
    ShortestPathTree,
};
