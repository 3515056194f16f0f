//! Planar points, rectangles, and a bucketed segment index for nearest-point
//! queries against polylines.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sqr(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl From<Complex64> for Point {
    fn from(z: Complex64) -> Self {
        Point::new(z.re, z.im)
    }
}

impl From<Point> for Complex64 {
    fn from(p: Point) -> Self {
        Complex64::new(p.x, p.y)
    }
}

/// Axis-aligned rectangle `[min.x, max.x] x [min.y, max.y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(min: Point, max: Point) -> Self {
        Rect { min, max }
    }

    pub fn from_corners(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect::new(Point::new(x0.min(x1), y0.min(y1)), Point::new(x0.max(x1), y0.max(y1)))
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.min.x + self.max.x), 0.5 * (self.min.y + self.max.y))
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Half-open membership `[min, max)`, so that rectangles sharing an edge
    /// partition the points between them.
    pub fn contains_half_open(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x < self.max.x && p.y >= self.min.y && p.y < self.max.y
    }

    /// Euclidean distance from `p` to the closed rectangle (0 inside).
    pub fn dist_to_point(&self, p: Point) -> f64 {
        let dx = (self.min.x - p.x).max(0.0).max(p.x - self.max.x);
        let dy = (self.min.y - p.y).max(0.0).max(p.y - self.max.y);
        dx.hypot(dy)
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            self.min,
            Point::new(self.max.x, self.min.y),
            self.max,
            Point::new(self.min.x, self.max.y),
        ]
    }

    /// Distance between the closed rectangle and the closed segment `[a, b]`.
    pub fn dist_to_segment(&self, a: Point, b: Point) -> f64 {
        if self.segment_intersects(a, b) {
            return 0.0;
        }
        let mut d = self.dist_to_point(a).min(self.dist_to_point(b));
        for c in self.corners() {
            d = d.min(point_segment_dist(c, a, b));
        }
        d
    }

    fn segment_intersects(&self, a: Point, b: Point) -> bool {
        // Liang-Barsky clipping.
        let d = b - a;
        let mut t0 = 0.0_f64;
        let mut t1 = 1.0_f64;
        for (p, q) in [
            (-d.x, a.x - self.min.x),
            (d.x, self.max.x - a.x),
            (-d.y, a.y - self.min.y),
            (d.y, self.max.y - a.y),
        ] {
            if p == 0.0 {
                if q < 0.0 {
                    return false;
                }
            } else {
                let r = q / p;
                if p < 0.0 {
                    t0 = t0.max(r);
                } else {
                    t1 = t1.min(r);
                }
                if t0 > t1 {
                    return false;
                }
            }
        }
        true
    }
}

/// Closest point to `p` on the segment `[a, b]`.
pub fn closest_on_segment(p: Point, a: Point, b: Point) -> Point {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return a;
    }
    let t = ((p - a).dot(d) / len2).clamp(0.0, 1.0);
    a + d * t
}

pub fn point_segment_dist(p: Point, a: Point, b: Point) -> f64 {
    p.dist(closest_on_segment(p, a, b))
}

/// Uniform-grid bucket index over the segments of a polyline, answering
/// nearest-point queries by expanding square rings of cells.
#[derive(Debug, Clone)]
pub struct SegmentIndex {
    points: Vec<Point>,
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl SegmentIndex {
    /// `points` must contain at least two vertices.
    pub fn new(points: &[Point]) -> Self {
        assert!(points.len() >= 2, "segment index needs at least one segment");
        let mut lo = points[0];
        let mut hi = points[0];
        for p in points {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let nseg = points.len() - 1;
        let extent = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
        let mean_len = points.windows(2).map(|w| w[0].dist(w[1])).sum::<f64>() / nseg as f64;
        // Aim for a handful of segments per occupied cell.
        let target = (extent / (nseg as f64).sqrt()).max(2.0 * mean_len);
        let cell = target.max(extent / 1024.0).max(1e-300);
        let nx = (((hi.x - lo.x) / cell).floor() as usize + 1).max(1);
        let ny = (((hi.y - lo.y) / cell).floor() as usize + 1).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        for (i, w) in points.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            let (cx0, cy0) = cell_of(lo, cell, Point::new(a.x.min(b.x), a.y.min(b.y)), nx, ny);
            let (cx1, cy1) = cell_of(lo, cell, Point::new(a.x.max(b.x), a.y.max(b.y)), nx, ny);
            for cy in cy0..=cy1 {
                for cx in cx0..=cx1 {
                    buckets[cy * nx + cx].push(i as u32);
                }
            }
        }
        SegmentIndex {
            points: points.to_vec(),
            origin: lo,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Returns `(distance, closest point, segment index)`.
    pub fn nearest(&self, p: Point) -> (f64, Point, usize) {
        let (cx, cy) = cell_of_unclamped(self.origin, self.cell, p);
        let (nx, ny) = (self.nx as i64, self.ny as i64);
        let gap = |c: i64, n: i64| {
            if c < 0 {
                -c
            } else if c >= n {
                c - n + 1
            } else {
                0
            }
        };
        let first_ring = gap(cx, nx).max(gap(cy, ny));
        let last_ring = first_ring + nx.max(ny);
        let mut best = (f64::INFINITY, self.points[0], 0usize);
        for ring in first_ring..=last_ring {
            // Cells in ring `ring` are at least (ring - 1) * cell away from p.
            if (ring as f64 - 1.0) * self.cell > best.0 {
                break;
            }
            self.scan_ring(cx, cy, ring, |s| {
                let q = closest_on_segment(p, self.points[s], self.points[s + 1]);
                let d = p.dist(q);
                if d < best.0 || (d == best.0 && s < best.2) {
                    best = (d, q, s);
                }
            });
        }
        best
    }

    fn scan_ring(&self, cx: i64, cy: i64, ring: i64, mut visit: impl FnMut(usize)) {
        let (nx, ny) = (self.nx as i64, self.ny as i64);
        let mut cell = |x: i64, y: i64| {
            for &s in &self.buckets[(y * nx + x) as usize] {
                visit(s as usize);
            }
        };
        if ring == 0 {
            if (0..nx).contains(&cx) && (0..ny).contains(&cy) {
                cell(cx, cy);
            }
            return;
        }
        let x0 = (cx - ring).max(0);
        let x1 = (cx + ring).min(nx - 1);
        for y in [cy - ring, cy + ring] {
            if (0..ny).contains(&y) {
                for x in x0..=x1 {
                    cell(x, y);
                }
            }
        }
        let y0 = (cy - ring + 1).max(0);
        let y1 = (cy + ring - 1).min(ny - 1);
        for x in [cx - ring, cx + ring] {
            if (0..nx).contains(&x) {
                for y in y0..=y1 {
                    cell(x, y);
                }
            }
        }
    }

    pub fn distance(&self, p: Point) -> f64 {
        self.nearest(p).0
    }
}

fn cell_of(origin: Point, cell: f64, p: Point, nx: usize, ny: usize) -> (usize, usize) {
    let cx = (((p.x - origin.x) / cell).floor().max(0.0) as usize).min(nx - 1);
    let cy = (((p.y - origin.y) / cell).floor().max(0.0) as usize).min(ny - 1);
    (cx, cy)
}

fn cell_of_unclamped(origin: Point, cell: f64, p: Point) -> (i64, i64) {
    let fx = ((p.x - origin.x) / cell).floor();
    let fy = ((p.y - origin.y) / cell).floor();
    let clamp = |v: f64| v.clamp(-(1i64 << 40) as f64, (1i64 << 40) as f64) as i64;
    (clamp(fx), clamp(fy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rect_segment_distance_cases() {
        let r = Rect::from_corners(0.0, 0.0, 1.0, 1.0);
        assert_eq!(r.dist_to_segment(Point::new(-1.0, 0.5), Point::new(2.0, 0.5)), 0.0);
        assert!((r.dist_to_segment(Point::new(2.0, -1.0), Point::new(2.0, 3.0)) - 1.0).abs() < 1e-15);
        let d = r.dist_to_segment(Point::new(2.0, 3.0), Point::new(3.0, 2.0));
        assert!((d - (2.0f64).hypot(1.0).min(1.5 * 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn index_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut pts = vec![Point::new(0.0, 0.0)];
        for _ in 0..400 {
            let last = *pts.last().unwrap();
            pts.push(last + Point::new(rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05)));
        }
        let idx = SegmentIndex::new(&pts);
        for _ in 0..500 {
            let q = Point::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let brute = pts
                .windows(2)
                .map(|w| point_segment_dist(q, w[0], w[1]))
                .fold(f64::INFINITY, f64::min);
            assert!((idx.distance(q) - brute).abs() < 1e-14);
        }
    }
}
