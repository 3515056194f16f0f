use serde::{Deserialize, Serialize};

use super::count::{Annulus, CrossingState};
use crate::error::{LabError, Result};
use crate::geom::{closest_on_segment, Point, Rect};
use crate::path::{PathKind, PlanarPath};

/// Crossing counts of `B(z, eps) \ B(z, eps^alpha)` for every center `z` of a
/// grid, in row-major order (y outer, x inner).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub per_center: Vec<(Point, usize)>,
    pub max_count: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub path_kind: PathKind,
}

impl CrossingReport {
    /// First center attaining the maximum count.
    pub fn argmax(&self) -> Option<Point> {
        self.per_center
            .iter()
            .find(|(_, c)| *c == self.max_count)
            .map(|(p, _)| *p)
    }

    /// Writes `center_x, center_y, count, r_in, r_out`, one row per center.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let f = crate::lfpp::fmt;
        let (r_in, r_out) = (f(self.epsilon.powf(self.alpha)), f(self.epsilon));
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["center_x", "center_y", "count", "r_in", "r_out"])?;
        for (p, c) in &self.per_center {
            w.write_record([f(p.x), f(p.y), c.to_string(), r_in.clone(), r_out.clone()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Grid of centers `min + (i, j) * spacing` covering `region`.
pub fn center_grid(region: &Rect, spacing: f64) -> Result<Vec<Point>> {
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(LabError::invalid(format!(
            "center spacing must be positive, got {spacing}"
        )));
    }
    let count = |len: f64| (len / spacing + 1e-9).floor() as usize + 1;
    let (nx, ny) = (count(region.width()), count(region.height()));
    if nx.saturating_mul(ny) > 50_000_000 {
        return Err(LabError::invalid("center grid has more than 5e7 points"));
    }
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            out.push(Point::new(
                region.min.x + i as f64 * spacing,
                region.min.y + j as f64 * spacing,
            ));
        }
    }
    Ok(out)
}

/// Counts crossings of `B(z, epsilon) \ B(z, epsilon^alpha)` by `path` for
/// each center `z` on a `center_spacing` grid over `region`, and the maximum.
pub fn max_crossings_over_grid(
    path: &PlanarPath,
    epsilon: f64,
    alpha: f64,
    region: &Rect,
    center_spacing: f64,
) -> Result<CrossingReport> {
    let centers = center_grid(region, center_spacing)?;
    crossings_at_centers(path, epsilon, alpha, centers)
}

/// [`max_crossings_over_grid`] for an explicit list of centers.
pub fn crossings_at_centers(
    path: &PlanarPath,
    epsilon: f64,
    alpha: f64,
    centers: Vec<Point>,
) -> Result<CrossingReport> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(LabError::invalid(format!("alpha must exceed 1, got {alpha}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(LabError::invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let r_in = epsilon.powf(alpha);
    let step = path.max_step();
    if !(r_in > 4.0 * step) {
        return Err(LabError::Resolution(format!(
            "inner radius epsilon^alpha = {r_in} must exceed 4 x path vertex spacing = {}",
            4.0 * step
        )));
    }
    let counts = sweep(path, epsilon, r_in, &centers);
    let per_center: Vec<(Point, usize)> = centers.into_iter().zip(counts).collect();
    let max_count = per_center.iter().map(|&(_, c)| c).max().unwrap_or(0);
    Ok(CrossingReport {
        per_center,
        max_count,
        epsilon,
        alpha,
        path_kind: path.kind(),
    })
}

/// Feeds every segment to the counters of the centers it comes within
/// `r_out` of. Segments farther away only carry "outside" labels, which the
/// neighbouring segments already record.
fn sweep(path: &PlanarPath, r_out: f64, r_in: f64, centers: &[Point]) -> Vec<usize> {
    let mut states = vec![CrossingState::default(); centers.len()];
    if centers.is_empty() {
        return Vec::new();
    }
    // bucket centers on a grid of cell r_out
    let (mut x0, mut y0) = (f64::INFINITY, f64::INFINITY);
    let (mut x1, mut y1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for c in centers {
        x0 = x0.min(c.x);
        y0 = y0.min(c.y);
        x1 = x1.max(c.x);
        y1 = y1.max(c.y);
    }
    let cell = r_out;
    let nx = ((x1 - x0) / cell).floor() as usize + 1;
    let ny = ((y1 - y0) / cell).floor() as usize + 1;
    let mut start = vec![0usize; nx * ny + 1];
    let bucket = |p: Point| {
        let i = (((p.x - x0) / cell).floor() as usize).min(nx - 1);
        let j = (((p.y - y0) / cell).floor() as usize).min(ny - 1);
        j * nx + i
    };
    for c in centers {
        start[bucket(*c) + 1] += 1;
    }
    for k in 0..nx * ny {
        start[k + 1] += start[k];
    }
    let mut fill = start.clone();
    let mut members = vec![0usize; centers.len()];
    for (idx, c) in centers.iter().enumerate() {
        let b = bucket(*c);
        members[fill[b]] = idx;
        fill[b] += 1;
    }

    let annuli: Vec<Annulus> = centers.iter().map(|&c| Annulus { center: c, r_in, r_out }).collect();
    let span = |lo: f64, hi: f64, origin: f64, n: usize| -> Option<(usize, usize)> {
        let a = ((lo - origin) / cell).floor();
        let b = ((hi - origin) / cell).floor();
        if b < 0.0 || a > (n - 1) as f64 {
            return None;
        }
        Some((a.max(0.0) as usize, (b as usize).min(n - 1)))
    };
    for w in path.vertices().windows(2) {
        let (a, b) = (w[0], w[1]);
        let Some((i0, i1)) = span(a.x.min(b.x) - r_out, a.x.max(b.x) + r_out, x0, nx) else {
            continue;
        };
        let Some((j0, j1)) = span(a.y.min(b.y) - r_out, a.y.max(b.y) + r_out, y0, ny) else {
            continue;
        };
        for j in j0..=j1 {
            for i in i0..=i1 {
                let k = j * nx + i;
                for &idx in &members[start[k]..start[k + 1]] {
                    let z = centers[idx];
                    let d = closest_on_segment(z, a, b).dist(z);
                    if d <= r_out {
                        states[idx].segment(&annuli[idx], a, b, d);
                    }
                }
            }
        }
    }
    states.iter().map(|s| s.count()).collect()
}
