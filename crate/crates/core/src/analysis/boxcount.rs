use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geom::{Point, Rect};
use crate::path::PlanarPath;

/// Number of finest scales used in the slope fit.
pub const FIT_SCALES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCounting {
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    /// Least-squares slope of `ln N` against `ln(1 / scale)` over the finest
    /// [`FIT_SCALES`] scales.
    pub slope: f64,
}

impl BoxCounting {
    /// Writes `scale, count` rows.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["scale", "count"])?;
        for (s, c) in self.scales.iter().zip(&self.counts) {
            w.write_record([crate::lfpp::fmt(*s), c.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Counts the cells of square grids of mesh `scales[i]` that meet `path`, and
/// fits the growth exponent.
///
/// Grids are anchored at the lower-left corner of the path's bounding box and
/// cells are half-open, so each point lies in exactly one cell. `scales`
/// must decrease by powers of two and the smallest must exceed twice the
/// longest path segment.
pub fn box_counting_dimension(path: &PlanarPath, scales: &[f64]) -> Result<BoxCounting> {
    if scales.len() < 2 {
        return Err(LabError::invalid("need at least two scales"));
    }
    if !scales.iter().all(|&s| s > 0.0 && s.is_finite()) {
        return Err(LabError::invalid("scales must be positive"));
    }
    for w in scales.windows(2) {
        let r = (w[0] / w[1]).log2();
        if !(r >= 1.0 - 1e-9 && (r - r.round()).abs() < 1e-9) {
            return Err(LabError::invalid(format!(
                "scales must decrease by powers of two, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    let finest = *scales.last().unwrap();
    let step = path.max_step();
    if !(finest > 2.0 * step) {
        return Err(LabError::Resolution(format!(
            "smallest scale {finest} must exceed twice the path vertex spacing {step}"
        )));
    }
    let bbox = path.bounding_box();
    let counts: Vec<usize> = scales.iter().map(|&s| count_cells(path, &bbox, s)).collect();
    let fit = scales.len().min(FIT_SCALES);
    let xs: Vec<f64> = scales[scales.len() - fit..].iter().map(|s| (1.0 / s).ln()).collect();
    let ys: Vec<f64> = counts[counts.len() - fit..].iter().map(|&c| (c as f64).ln()).collect();
    Ok(BoxCounting {
        scales: scales.to_vec(),
        counts,
        slope: least_squares_slope(&xs, &ys),
    })
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Cells `[i s, (i+1) s) x [j s, (j+1) s)` (relative to the lower-left
/// corner of `bbox`) that the polyline passes through, found by splitting
/// each segment where it crosses grid lines. The grid has `ceil(width / s)`
/// columns, so points on the far edge of the box belong to the last one.
fn count_cells(path: &PlanarPath, bbox: &Rect, s: f64) -> usize {
    let origin = bbox.min;
    let cols = ((bbox.width() / s).ceil() as i64).max(1);
    let rows = ((bbox.height() / s).ceil() as i64).max(1);
    let cell = |p: Point| {
        (
            (((p.x - origin.x) / s).floor() as i64).min(cols - 1),
            (((p.y - origin.y) / s).floor() as i64).min(rows - 1),
        )
    };
    let mut seen: HashSet<(i64, i64)> = HashSet::new();
    let mut cuts: Vec<f64> = Vec::new();
    let v = path.vertices();
    seen.insert(cell(v[0]));
    for w in v.windows(2) {
        let (a, b) = (w[0], w[1]);
        seen.insert(cell(b));
        let (ca, cb) = (cell(a), cell(b));
        if ca == cb {
            continue;
        }
        cuts.clear();
        cuts.push(0.0);
        cuts.push(1.0);
        for (lo, hi, pa, pb, o) in [(ca.0, cb.0, a.x, b.x, origin.x), (ca.1, cb.1, a.y, b.y, origin.y)] {
            for k in lo.min(hi) + 1..=lo.max(hi) {
                let line = o + k as f64 * s;
                cuts.push((line - pa) / (pb - pa));
            }
        }
        cuts.sort_by(f64::total_cmp);
        for c in cuts.windows(2) {
            if c[1] > c[0] {
                let t = 0.5 * (c[0] + c[1]);
                seen.insert(cell(a + (b - a) * t));
            }
        }
    }
    seen.len()
}
