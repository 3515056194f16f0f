use std::io::Write;

use super::graph::MetricGraph;
use super::metric::MetricBall;
use crate::path::PlanarPath;

/// Columns `index, x, y, cumulative_length`.
pub fn write_path_csv<W: Write>(path: &PlanarPath, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "x", "y", "cumulative_length"])?;
    for (i, (p, c)) in path.vertices().iter().zip(path.cumulative_length()).enumerate() {
        w.write_record([i.to_string(), fmt(p.x), fmt(p.y), fmt(*c)])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `x, y, dist_to_center`, one row per member in vertex order.
pub fn write_ball_csv<W: Write>(graph: &MetricGraph, ball: &MetricBall, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "dist_to_center"])?;
    for &(v, d) in &ball.members {
        let p = graph.position(v);
        w.write_record([fmt(p.x), fmt(p.y), fmt(d)])?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest round-trip decimal representation.
pub(crate) fn fmt(v: f64) -> String {
    format!("{v:?}")
}
