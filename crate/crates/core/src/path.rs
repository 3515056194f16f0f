use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geom::{Point, Rect};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    Geodesic,
    SleTrace,
    Synthetic,
}

/// An ordered polyline with a nondecreasing length index.
///
/// For geodesics the length index is the metric length accumulated along
/// lattice edges; for traces and synthetic paths it is Euclidean arc length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarPath {
    vertices: Vec<Point>,
    cumulative_length: Vec<f64>,
    kind: PathKind,
}

impl PlanarPath {
    pub fn new(vertices: Vec<Point>, cumulative_length: Vec<f64>, kind: PathKind) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(LabError::DegenerateInput(format!(
                "a path needs at least 2 vertices, got {}",
                vertices.len()
            )));
        }
        if cumulative_length.len() != vertices.len() {
            return Err(LabError::invalid("cumulative_length must match vertex count"));
        }
        if cumulative_length[0] != 0.0 {
            return Err(LabError::invalid("cumulative_length must start at 0"));
        }
        if cumulative_length.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(LabError::invalid("cumulative_length must be nondecreasing"));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(LabError::invalid(format!("vertex {i} is not finite")));
        }
        if let Some(i) = vertices.windows(2).position(|w| w[0] == w[1]) {
            return Err(LabError::DegenerateInput(format!(
                "vertices {i} and {} coincide",
                i + 1
            )));
        }
        Ok(PlanarPath {
            vertices,
            cumulative_length,
            kind,
        })
    }

    /// Builds a path indexed by Euclidean arc length.
    pub fn from_points(vertices: Vec<Point>, kind: PathKind) -> Result<Self> {
        let mut acc = 0.0;
        let mut cum = Vec::with_capacity(vertices.len());
        for (i, p) in vertices.iter().enumerate() {
            if i > 0 {
                acc += p.dist(vertices[i - 1]);
            }
            cum.push(acc);
        }
        PlanarPath::new(vertices, cum, kind)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cumulative_length(&self) -> &[f64] {
        &self.cumulative_length
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        *self.cumulative_length.last().unwrap()
    }

    pub fn start(&self) -> Point {
        self.vertices[0]
    }

    pub fn end(&self) -> Point {
        *self.vertices.last().unwrap()
    }

    /// Longest Euclidean segment length.
    pub fn max_step(&self) -> f64 {
        self.vertices.windows(2).map(|w| w[0].dist(w[1])).fold(0.0, f64::max)
    }

    pub fn bounding_box(&self) -> Rect {
        let mut r = Rect::new(self.vertices[0], self.vertices[0]);
        for p in &self.vertices {
            r.min = Point::new(r.min.x.min(p.x), r.min.y.min(p.y));
            r.max = Point::new(r.max.x.max(p.x), r.max.y.max(p.y));
        }
        r
    }

    pub fn reversed(&self) -> PlanarPath {
        let total = self.total_length();
        let vertices = self.vertices.iter().rev().copied().collect();
        let cumulative_length = self.cumulative_length.iter().rev().map(|c| total - c).collect();
        PlanarPath {
            vertices,
            cumulative_length,
            kind: self.kind,
        }
    }

    pub fn translated(&self, by: Point) -> PlanarPath {
        PlanarPath {
            vertices: self.vertices.iter().map(|p| *p + by).collect(),
            cumulative_length: self.cumulative_length.clone(),
            kind: self.kind,
        }
    }

    /// Splits every segment into pieces no longer than `max_len` by inserting
    /// collinear vertices.
    pub fn densified(&self, max_len: f64) -> PlanarPath {
        assert!(max_len > 0.0);
        let mut pts = vec![self.vertices[0]];
        for w in self.vertices.windows(2) {
            let pieces = (w[0].dist(w[1]) / max_len).ceil().max(1.0) as usize;
            for j in 1..=pieces {
                let t = j as f64 / pieces as f64;
                pts.push(w[0] + (w[1] - w[0]) * t);
            }
        }
        PlanarPath::from_points(pts, self.kind).expect("densify keeps validity")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_paths() {
        assert!(PlanarPath::from_points(vec![Point::new(0.0, 0.0)], PathKind::Synthetic).is_err());
        let p = Point::new(1.0, 1.0);
        assert!(PlanarPath::from_points(vec![p, p], PathKind::Synthetic).is_err());
    }

    #[test]
    fn reverse_keeps_length_index_valid() {
        let path = PlanarPath::from_points(
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 2.0)],
            PathKind::Synthetic,
        )
        .unwrap();
        let r = path.reversed();
        assert_eq!(r.cumulative_length(), &[0.0, 2.0, 3.0]);
        assert_eq!(r.start(), path.end());
    }
}
