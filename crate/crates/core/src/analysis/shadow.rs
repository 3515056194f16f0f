//! Harmonic-measure shadows of Whitney squares.
//!
//! The shadow of a square is the part of the curve that Brownian motion
//! started in the square tends to hit first. Walkers are run by
//! walk-on-spheres from the square's center and their hit points recorded.
//!
//! Seen from a point at distance `h` from a smooth arc, harmonic measure has
//! Cauchy tails of scale `h`, so the largest distance between hit points grows
//! with the walker count and, summed over squares, does not shrink with the
//! square size. The shadow proxy used for sums is therefore the diameter of
//! the sub-arc between the lower and upper quartiles of the hit positions
//! along the curve, which is where the bulk of the measure sits. Both are
//! proxies for the conformal shadow, not the same object.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::whitney::WhitneyCube;
use crate::error::{LabError, Result};
use crate::geom::{Point, SegmentIndex};
use crate::path::PlanarPath;
use crate::rng::{derive_seed, rng_from_seed, LabRng};

pub const MIN_WALKERS: usize = 16;
pub const MAX_WALKER_STEPS: usize = 1_000_000;
/// A walker stops once it is this fraction of its square's side from the path.
pub const HIT_TOLERANCE: f64 = 1e-4;
/// Walkers farther than this many path radii are returned to that circle in
/// one exact step.
const FAR_FIELD: f64 = 16.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowEstimate {
    pub cube: WhitneyCube,
    pub hit_points: Vec<Point>,
    /// Largest distance between two hit points.
    pub hit_diameter: f64,
    /// Arc-length positions of the quartile hits along the path.
    pub arc: (f64, f64),
    /// Diameter of the path between the quartile hits.
    pub diameter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowSum {
    pub per_cube: Vec<ShadowEstimate>,
    /// Sum of squared quartile-arc diameters.
    pub total: f64,
    /// Sum of squared hit-point diameters.
    pub total_hit_diameter: f64,
    pub walkers_per_cube: usize,
    /// Always true: diameters come from harmonic-measure hit points, not from
    /// the conformal shadow itself.
    pub harmonic_measure_proxy: bool,
}

impl ShadowSum {
    /// Per-depth totals for every depth that has cubes, in depth order.
    pub fn per_depth(&self) -> Vec<DepthTotal> {
        let mut out: Vec<DepthTotal> = Vec::new();
        let mut sorted: Vec<&ShadowEstimate> = self.per_cube.iter().collect();
        sorted.sort_by_key(|e| e.cube.depth);
        for e in sorted {
            if out.last().map(|t| t.depth) != Some(e.cube.depth) {
                out.push(DepthTotal {
                    depth: e.cube.depth,
                    cube_count: 0,
                    sum_diam_sq: 0.0,
                    sum_hit_diam_sq: 0.0,
                });
            }
            let t = out.last_mut().unwrap();
            t.cube_count += 1;
            t.sum_diam_sq += e.diameter * e.diameter;
            t.sum_hit_diam_sq += e.hit_diameter * e.hit_diameter;
        }
        out
    }

    /// Writes `depth, cube_count, sum_diam_sq, sum_hit_diam_sq` rows.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["depth", "cube_count", "sum_diam_sq", "sum_hit_diam_sq"])?;
        for t in self.per_depth() {
            let f = crate::lfpp::fmt;
            w.write_record([
                t.depth.to_string(),
                t.cube_count.to_string(),
                f(t.sum_diam_sq),
                f(t.sum_hit_diam_sq),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthTotal {
    pub depth: u32,
    pub cube_count: usize,
    pub sum_diam_sq: f64,
    pub sum_hit_diam_sq: f64,
}

/// Estimates `sum_Q diam(s(Q))^2` with `walkers_per_cube` walkers per square.
///
/// Square `i` draws its walkers from `derive_seed(seed, i)`, so results do not
/// depend on scheduling, and raising `walkers_per_cube` only adds walkers.
pub fn shadow_sum_estimate(
    path: &PlanarPath,
    cubes: &[WhitneyCube],
    walkers_per_cube: usize,
    seed: u64,
) -> Result<ShadowSum> {
    if walkers_per_cube < MIN_WALKERS {
        return Err(LabError::invalid(format!(
            "need at least {MIN_WALKERS} walkers per cube, got {walkers_per_cube}"
        )));
    }
    let pts = path.vertices();
    let index = SegmentIndex::new(pts);
    let mut arclen = Vec::with_capacity(pts.len());
    arclen.push(0.0);
    for w in pts.windows(2) {
        arclen.push(arclen.last().unwrap() + w[0].dist(w[1]));
    }
    let bbox = path.bounding_box();
    let c0 = bbox.center();
    let r_far = FAR_FIELD * (0.5 * bbox.width().hypot(bbox.height())).max(f64::MIN_POSITIVE);
    let per_cube = cubes
        .par_iter()
        .enumerate()
        .map(|(i, cube)| {
            let mut rng = rng_from_seed(derive_seed(seed, i as u64));
            let tol = HIT_TOLERANCE * cube.side;
            let hits = (0..walkers_per_cube)
                .map(|_| walk(&index, cube.center(), tol, c0, r_far, &mut rng, i))
                .collect::<Result<Vec<_>>>()?;
            let mut params: Vec<f64> = hits.iter().map(|&(q, seg)| arclen[seg] + pts[seg].dist(q)).collect();
            params.sort_by(f64::total_cmp);
            let n = params.len() - 1;
            let arc = (params[n / 4], params[(3 * n).div_ceil(4)]);
            let hit_points: Vec<Point> = hits.into_iter().map(|(q, _)| q).collect();
            Ok(ShadowEstimate {
                cube: *cube,
                hit_diameter: diameter(&hit_points),
                diameter: arc_diameter(pts, &arclen, arc),
                arc,
                hit_points,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total = per_cube.iter().map(|e| e.diameter * e.diameter).sum();
    let total_hit_diameter = per_cube.iter().map(|e| e.hit_diameter * e.hit_diameter).sum();
    Ok(ShadowSum {
        per_cube,
        total,
        total_hit_diameter,
        walkers_per_cube,
        harmonic_measure_proxy: true,
    })
}

fn walk(
    index: &SegmentIndex,
    start: Point,
    tol: f64,
    c0: Point,
    r_far: f64,
    rng: &mut LabRng,
    cube: usize,
) -> Result<(Point, usize)> {
    let mut x = start;
    for _ in 0..MAX_WALKER_STEPS {
        if x.dist(c0) > r_far {
            x = return_to_circle(x, c0, r_far, rng);
            continue;
        }
        let (d, q, seg) = index.nearest(x);
        if d < tol {
            return Ok((q, seg));
        }
        let theta = rng.random::<f64>() * std::f64::consts::TAU;
        x = x + Point::new(theta.cos(), theta.sin()) * d;
    }
    Err(LabError::DivergentWalker {
        cube,
        max_steps: MAX_WALKER_STEPS,
    })
}

/// First point on the circle `|w - c0| = r` reached by Brownian motion from
/// `x` outside it. Reflecting `x` to `r^2 / conj(x)` turns this into the
/// harmonic measure from an interior point, which is the image of the uniform
/// measure under the disk automorphism sending 0 to that point.
fn return_to_circle(x: Point, c0: Point, r: f64, rng: &mut LabRng) -> Point {
    let p = Complex64::from(x - c0) / r;
    let a = 1.0 / p.conj();
    let zeta = Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU);
    let w = (zeta + a) / (1.0 + a.conj() * zeta);
    c0 + Point::from(w * r)
}

/// Point at arc length `t` along the polyline.
fn point_at(pts: &[Point], arclen: &[f64], t: f64) -> (Point, usize) {
    let seg = arclen.partition_point(|&a| a <= t).clamp(1, pts.len() - 1) - 1;
    let len = arclen[seg + 1] - arclen[seg];
    let f = if len > 0.0 {
        ((t - arclen[seg]) / len).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (pts[seg] + (pts[seg + 1] - pts[seg]) * f, seg)
}

/// Diameter of the sub-arc between arc lengths `lo <= hi`.
fn arc_diameter(pts: &[Point], arclen: &[f64], (lo, hi): (f64, f64)) -> f64 {
    let (a, sa) = point_at(pts, arclen, lo);
    let (b, sb) = point_at(pts, arclen, hi);
    let mut arc = vec![a];
    arc.extend_from_slice(&pts[sa + 1..=sb.max(sa)]);
    arc.push(b);
    diameter(&convex_hull(arc))
}

/// Convex hull by the monotone chain; collinear points are dropped.
fn convex_hull(mut p: Vec<Point>) -> Vec<Point> {
    p.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: Point, a: Point, b: Point| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    let mut hull: Vec<Point> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(p.iter())
        } else {
            Box::new(p.iter().rev())
        };
        for &q in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0 {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    hull
}

fn diameter(points: &[Point]) -> f64 {
    let mut d = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max(p.dist(*q));
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::PathKind;

    fn segment() -> PlanarPath {
        PlanarPath::from_points(vec![Point::new(-0.1, 0.0), Point::new(0.1, 0.0)], PathKind::Synthetic).unwrap()
    }

    fn cube_at(x: f64, y: f64, side: f64) -> WhitneyCube {
        WhitneyCube {
            corner: Point::new(x, y),
            side,
            depth: 0,
        }
    }

    #[test]
    fn hits_lie_on_the_path() {
        let p = segment();
        let s = shadow_sum_estimate(&p, &[cube_at(5.0, 5.0, 0.5), cube_at(0.0, 0.05, 0.05)], 32, 1).unwrap();
        for e in &s.per_cube {
            assert!(e.hit_diameter <= 0.2 + 1e-12);
            assert!(e.diameter <= e.hit_diameter + 1e-12);
            for h in &e.hit_points {
                assert!(h.y.abs() < 1e-12 && h.x.abs() <= 0.1 + 1e-12);
            }
        }
        assert!(s.total_hit_diameter <= 2.0 * 0.04 + 1e-12);
        assert!(s.harmonic_measure_proxy);
    }

    #[test]
    fn more_walkers_never_shrink_a_shadow() {
        let p = segment();
        let cubes = [cube_at(0.3, 0.1, 0.1), cube_at(-0.05, 0.02, 0.02)];
        let a = shadow_sum_estimate(&p, &cubes, 16, 4).unwrap();
        let b = shadow_sum_estimate(&p, &cubes, 32, 4).unwrap();
        for (x, y) in a.per_cube.iter().zip(&b.per_cube) {
            assert!(y.hit_diameter >= x.hit_diameter);
            assert_eq!(x.hit_points[..], y.hit_points[..16]);
        }
    }

    #[test]
    fn far_field_return_lands_on_the_circle() {
        let mut rng = rng_from_seed(3);
        let c0 = Point::new(1.0, -2.0);
        for _ in 0..100 {
            let w = return_to_circle(Point::new(40.0, 7.0), c0, 5.0, &mut rng);
            assert!((w.dist(c0) - 5.0).abs() < 1e-9);
        }
    }

    #[test]
    fn arc_diameter_of_a_bent_path() {
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0)];
        let arclen = [0.0, 1.0, 2.0];
        assert!((arc_diameter(&pts, &arclen, (0.5, 1.5)) - 0.5f64.hypot(0.5)).abs() < 1e-15);
        assert!((arc_diameter(&pts, &arclen, (0.0, 2.0)) - 2f64.sqrt()).abs() < 1e-15);
        assert!((arc_diameter(&pts, &arclen, (0.2, 0.7)) - 0.5).abs() < 1e-15);
        assert_eq!(arc_diameter(&pts, &arclen, (1.5, 1.5)), 0.0);
    }

    #[test]
    fn rejects_too_few_walkers() {
        assert!(shadow_sum_estimate(&segment(), &[cube_at(1.0, 1.0, 0.5)], 8, 0).is_err());
    }
}
