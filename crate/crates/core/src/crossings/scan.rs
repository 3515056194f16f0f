use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geom::Point;
use crate::lfpp::{annulus_crossing_length, annulus_separating_length, MetricGraph};

/// Smallest scan radius, in lattice spacings. The thinnest annulus of a scale
/// has width `r / 8`, so this keeps it at least two lattice steps wide.
pub const MIN_SCAN_RADIUS: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleEntry {
    pub k: usize,
    pub radius: f64,
    /// Separating length of `(r/2, 7r/8)`.
    pub l1: f64,
    /// Crossing length of `(r/2, 7r/8)`.
    pub l2: f64,
    /// Separating length of `(3r/4, 7r/8)`.
    pub s1: f64,
    /// Crossing length of `(r/2, 5r/8)`.
    pub s2: f64,
}

impl ScaleEntry {
    pub fn ratio(&self) -> f64 {
        self.l1 / self.l2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleScan {
    pub center: Point,
    pub base_radius: f64,
    pub c: f64,
    pub per_scale: Vec<ScaleEntry>,
    /// Number of scales with `l1 <= c * l2`.
    pub n_kc: usize,
    /// Number of scales with `s1 < s2`.
    pub s1_below_s2: usize,
}

impl ScaleScan {
    /// Recounts the summary for another constant `c`.
    pub fn count_for(&self, c: f64) -> usize {
        self.per_scale.iter().filter(|e| e.l1 <= c * e.l2).count()
    }

    /// Writes `k, radius, l1, l2, s1, s2`, one row per scale.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "radius", "l1", "l2", "s1", "s2"])?;
        for e in &self.per_scale {
            let f = crate::lfpp::fmt;
            w.write_record([e.k.to_string(), f(e.radius), f(e.l1), f(e.l2), f(e.s1), f(e.s2)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Largest `K` with `base_radius / 2^K >= MIN_SCAN_RADIUS * spacing`.
pub fn max_scan_depth(base_radius: f64, spacing: f64) -> usize {
    let ratio = base_radius / (MIN_SCAN_RADIUS * spacing);
    if ratio < 1.0 {
        0
    } else {
        (ratio.log2() + 1e-12).floor() as usize
    }
}

/// Annulus lengths about `z` at the radii `r_k = base_radius / 2^k`,
/// `k = 1..=K`.
pub fn scale_scan(graph: &MetricGraph, z: Point, base_radius: f64, k_max: usize, c: f64) -> Result<ScaleScan> {
    if k_max == 0 {
        return Err(LabError::invalid("K must be at least 1"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(LabError::invalid(format!("c must be positive, got {c}")));
    }
    let feasible = max_scan_depth(base_radius, graph.spacing());
    if k_max > feasible {
        return Err(LabError::Resolution(format!(
            "K = {k_max} puts the smallest radius below {MIN_SCAN_RADIUS} lattice spacings; the largest feasible K is {feasible}"
        )));
    }
    let mut per_scale = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let r = base_radius / (1u64 << k) as f64;
        per_scale.push(ScaleEntry {
            k,
            radius: r,
            l1: annulus_separating_length(graph, z, r / 2.0, 7.0 * r / 8.0)?,
            l2: annulus_crossing_length(graph, z, r / 2.0, 7.0 * r / 8.0)?,
            s1: annulus_separating_length(graph, z, 3.0 * r / 4.0, 7.0 * r / 8.0)?,
            s2: annulus_crossing_length(graph, z, r / 2.0, 5.0 * r / 8.0)?,
        });
    }
    let n_kc = per_scale.iter().filter(|e| e.l1 <= c * e.l2).count();
    let s1_below_s2 = per_scale.iter().filter(|e| e.s1 < e.s2).count();
    Ok(ScaleScan {
        center: z,
        base_radius,
        c,
        per_scale,
        n_kc,
        s1_below_s2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grf::GridField;

    #[test]
    fn flat_field_ratios_are_bounded() {
        let g = MetricGraph::new(GridField::constant(128, 1.0 / 128.0, 0.0).unwrap(), 0.4).unwrap();
        let scan = scale_scan(&g, Point::new(0.0, 0.0), 1.0, 3, 16.0).unwrap();
        assert_eq!(scan.n_kc, 3);
        for e in &scan.per_scale {
            assert!(e.ratio() > 8.0 && e.ratio() < 16.0, "{e:?}");
        }
    }

    #[test]
    fn too_deep_names_feasible_depth() {
        let g = MetricGraph::new(GridField::constant(64, 1.0 / 64.0, 0.0).unwrap(), 0.4).unwrap();
        let e = scale_scan(&g, Point::new(0.0, 0.0), 0.5, 4, 16.0).unwrap_err();
        assert!(e.to_string().contains("largest feasible K is 1"), "{e}");
    }
}
