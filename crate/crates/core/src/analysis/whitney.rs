use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geom::{Point, Rect};
use crate::path::PlanarPath;

/// Closed dyadic square of side `root_side / 2^depth`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhitneyCube {
    pub corner: Point,
    pub side: f64,
    pub depth: u32,
}

impl WhitneyCube {
    pub fn rect(&self) -> Rect {
        Rect::new(self.corner, self.corner + Point::new(self.side, self.side))
    }

    pub fn center(&self) -> Point {
        self.corner + Point::new(self.side / 2.0, self.side / 2.0)
    }

    /// Distance from the closed square to the polyline.
    pub fn dist_to_path(&self, path: &PlanarPath) -> f64 {
        let r = self.rect();
        path.vertices()
            .windows(2)
            .map(|w| r.dist_to_segment(w[0], w[1]))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhitneyDecomposition {
    pub root: Rect,
    pub max_depth: u32,
    /// Kept cubes, sorted by depth, then row, then column.
    pub cubes: Vec<WhitneyCube>,
    /// Cubes at `max_depth` that were still too close to the path to keep.
    pub shortfall: Vec<WhitneyCube>,
}

impl WhitneyDecomposition {
    /// Number of kept cubes at each depth `0..=max_depth`.
    pub fn counts_per_depth(&self) -> Vec<usize> {
        let mut out = vec![0; self.max_depth as usize + 1];
        for c in &self.cubes {
            out[c.depth as usize] += 1;
        }
        out
    }

    pub fn shortfall_area(&self) -> f64 {
        self.shortfall.iter().map(|c| c.side * c.side).sum()
    }
}

/// Quadtree Whitney decomposition of `bounding_box` minus `path`.
///
/// Starting from the box, a square is kept once its distance to the path is
/// at least its side and split into four otherwise. A kept square's parent
/// was closer than its own side, so every kept square has distance between
/// `side` and `(2 + 2 sqrt 2) side`. Squares still too close at `max_depth`
/// are returned as the shortfall.
pub fn whitney_decomposition(path: &PlanarPath, bounding_box: &Rect, max_depth: u32) -> Result<WhitneyDecomposition> {
    let (w, h) = (bounding_box.width(), bounding_box.height());
    if !(w > 0.0 && (w - h).abs() <= 1e-12 * w) {
        return Err(LabError::invalid(format!(
            "bounding box must be a square, got {w} x {h}"
        )));
    }
    if max_depth > 40 {
        return Err(LabError::invalid(format!(
            "max_depth must be at most 40, got {max_depth}"
        )));
    }
    let b = bounding_box;
    if let Some(p) = path
        .vertices()
        .iter()
        .find(|p| !(p.x > b.min.x && p.x < b.max.x && p.y > b.min.y && p.y < b.max.y))
    {
        return Err(LabError::invalid(format!(
            "path point ({}, {}) is not inside the bounding box interior",
            p.x, p.y
        )));
    }
    let pts = path.vertices();
    let root = WhitneyCube {
        corner: b.min,
        side: w,
        depth: 0,
    };
    let mut cubes = Vec::new();
    let mut shortfall = Vec::new();
    let mut stack: Vec<(WhitneyCube, Vec<u32>)> = vec![(root, (0..pts.len() as u32 - 1).collect())];
    while let Some((cube, candidates)) = stack.pop() {
        let r = cube.rect();
        let dists: Vec<f64> = candidates
            .iter()
            .map(|&i| r.dist_to_segment(pts[i as usize], pts[i as usize + 1]))
            .collect();
        let d = dists.iter().copied().fold(f64::INFINITY, f64::min);
        if d >= cube.side {
            cubes.push(cube);
            continue;
        }
        if cube.depth == max_depth {
            shortfall.push(cube);
            continue;
        }
        // a segment can only be nearest to a child if it is within
        // d + diam(cube) of the whole cube
        let reach = d + cube.side * std::f64::consts::SQRT_2;
        let keep: Vec<u32> = candidates
            .iter()
            .zip(&dists)
            .filter(|(_, &di)| di <= reach)
            .map(|(&i, _)| i)
            .collect();
        let half = cube.side / 2.0;
        for (dx, dy) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
            let child = WhitneyCube {
                corner: cube.corner + Point::new(dx * half, dy * half),
                side: half,
                depth: cube.depth + 1,
            };
            stack.push((child, keep.clone()));
        }
    }
    let order = |a: &WhitneyCube, b: &WhitneyCube| {
        a.depth
            .cmp(&b.depth)
            .then(a.corner.y.total_cmp(&b.corner.y))
            .then(a.corner.x.total_cmp(&b.corner.x))
    };
    cubes.sort_by(order);
    shortfall.sort_by(order);
    Ok(WhitneyDecomposition {
        root: *bounding_box,
        max_depth,
        cubes,
        shortfall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::PathKind;

    fn tiny_segment() -> PlanarPath {
        PlanarPath::from_points(
            vec![Point::new(0.5, 0.5), Point::new(0.5 + 1e-9, 0.5)],
            PathKind::Synthetic,
        )
        .unwrap()
    }

    #[test]
    fn distances_are_within_the_whitney_band() {
        let p = tiny_segment();
        let d = whitney_decomposition(&p, &Rect::from_corners(0.0, 0.0, 1.0, 1.0), 7).unwrap();
        assert!(!d.cubes.is_empty());
        for c in &d.cubes {
            let dist = c.dist_to_path(&p);
            assert!(dist >= c.side && dist <= 8.0 * c.side, "{c:?} {dist}");
        }
        let area: f64 = d.cubes.iter().map(|c| c.side * c.side).sum::<f64>() + d.shortfall_area();
        assert!((area - 1.0).abs() < 1e-12);
    }

    #[test]
    fn point_obstacle_cubes_shrink_towards_it() {
        let p = tiny_segment();
        let d = whitney_decomposition(&p, &Rect::from_corners(0.0, 0.0, 1.0, 1.0), 6).unwrap();
        let counts = d.counts_per_depth();
        assert_eq!(counts[0], 0);
        assert_eq!(counts[1], 0);
        // from depth 3 on each depth adds the same ring around the point
        assert!(counts[3] > 0);
        assert_eq!(counts[4], counts[5]);
        assert_eq!(counts[5], counts[6]);
        // the four squares at the point plus the two just right of the
        // segment, which sit 1e-9 closer than their side
        assert_eq!(d.shortfall.len(), 6);
    }

    #[test]
    fn path_on_the_boundary_is_rejected() {
        let p = PlanarPath::from_points(vec![Point::new(0.0, 0.5), Point::new(0.5, 0.5)], PathKind::Synthetic).unwrap();
        assert!(whitney_decomposition(&p, &Rect::from_corners(0.0, 0.0, 1.0, 1.0), 4).is_err());
        assert!(whitney_decomposition(&tiny_segment(), &Rect::from_corners(0.0, 0.0, 1.0, 2.0), 4).is_err());
    }
}
