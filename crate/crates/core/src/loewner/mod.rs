//! Loewner-chain simulation: driving functions, chordal and whole-plane
//! traces, and the angle diffusion seen from an interior point.

mod chordal;
mod driving;
mod theta;
mod whole_plane;

use std::io::Write;

pub use chordal::{chordal_trace, chordal_trace_naive, chordal_trace_refined};
pub use driving::{sample_driving, DrivingFunction};
pub use theta::{theta_diffusion, ThetaPath};
pub use whole_plane::{whole_plane_start_offset, whole_plane_trace, whole_plane_trace_from_driving};

use crate::lfpp::fmt;
use crate::path::PlanarPath;

/// Columns `index, t, x, y`. `times` holds one entry per trace vertex.
pub fn write_trace_csv<W: Write>(path: &PlanarPath, times: &[f64], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "t", "x", "y"])?;
    for (i, p) in path.vertices().iter().enumerate() {
        let t = times.get(i).copied().unwrap_or(f64::NAN);
        w.write_record([i.to_string(), fmt(t), fmt(p.x), fmt(p.y)])?;
    }
    w.flush()?;
    Ok(())
}
