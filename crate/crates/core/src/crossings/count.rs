//! Annulus crossings of polylines.
//!
//! Along a path, record in order each visit to the closed hole
//! `|w - z| <= r_in` (label H) and to the closed outside `|w - z| >= r_out`
//! (label O). A crossing is a maximal stretch inside the annulus joining the
//! two circles, so the crossing count is the number of H/O alternations in
//! the label sequence. On a straight segment the distance to `z` is convex, so
//! its labels are: O if the start is outside, H if the segment reaches the
//! hole, O if the end is outside.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geom::{closest_on_segment, Point};
use crate::path::PlanarPath;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub center: Point,
    pub r_in: f64,
    pub r_out: f64,
}

impl Annulus {
    pub fn new(center: Point, r_in: f64, r_out: f64) -> Result<Self> {
        if !(r_in > 0.0 && r_out > r_in && r_out.is_finite()) || !center.is_finite() {
            return Err(LabError::invalid(format!(
                "annulus radii must satisfy 0 < r_in < r_out, got {r_in}, {r_out}"
            )));
        }
        Ok(Annulus { center, r_in, r_out })
    }

    /// Longest segment the counter accepts within reach of the annulus.
    pub fn max_segment(&self) -> f64 {
        self.r_in / 4.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Hole,
    Outside,
}

/// Incremental crossing counter for one annulus.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CrossingState {
    last: Option<Side>,
    count: usize,
}

impl CrossingState {
    #[inline]
    fn visit(&mut self, side: Side) {
        match self.last {
            Some(s) if s == side => {}
            Some(_) => {
                self.count += 1;
                self.last = Some(side);
            }
            None => self.last = Some(side),
        }
    }

    /// Feeds one segment that comes within `r_out` of the center.
    #[inline]
    pub fn segment(&mut self, ann: &Annulus, a: Point, b: Point, min_dist: f64) {
        let z = ann.center;
        if a.dist(z) >= ann.r_out {
            self.visit(Side::Outside);
        }
        if min_dist <= ann.r_in {
            self.visit(Side::Hole);
        }
        if b.dist(z) >= ann.r_out {
            self.visit(Side::Outside);
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

/// Number of crossings of `annulus` by `path`.
///
/// Every segment that meets the closed disk `B(center, r_out)` must be
/// shorter than `r_in / 4`; longer segments could hide a crossing.
pub fn count_crossings(path: &PlanarPath, annulus: &Annulus) -> Result<usize> {
    let mut state = CrossingState::default();
    let z = annulus.center;
    for (i, w) in path.vertices().windows(2).enumerate() {
        let d = closest_on_segment(z, w[0], w[1]).dist(z);
        if d > annulus.r_out {
            continue;
        }
        let len = w[0].dist(w[1]);
        if len >= annulus.max_segment() {
            return Err(LabError::Resolution(format!(
                "segment {i} of length {len} meets the annulus about ({}, {}) but r_in/4 = {}",
                z.x,
                z.y,
                annulus.max_segment()
            )));
        }
        state.segment(annulus, w[0], w[1], d);
    }
    Ok(state.count())
}
