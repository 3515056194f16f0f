use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geom::{Point, Rect};

/// Boundary convention a field was produced under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    /// Torus approximation of the whole-plane field, additive constant fixed
    /// by a zero unit-circle average about the grid center.
    TorusWholePlane,
    /// Dirichlet field, identically zero on the outer lattice ring.
    ZeroBoundary,
    /// Hand-built or imported values with no boundary convention.
    Free,
}

/// Real field on an `n x n` square lattice.
///
/// Vertex `(ix, iy)` sits at `origin + spacing * (ix, iy)`; values are stored
/// row-major with `iy` as the row index.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    n: usize,
    spacing: f64,
    origin: Point,
    values: Vec<f64>,
    boundary: BoundaryKind,
    normalization: String,
}

pub const MIN_GRID_SIZE: usize = 8;

impl GridField {
    pub fn new(
        n: usize,
        spacing: f64,
        origin: Point,
        values: Vec<f64>,
        boundary: BoundaryKind,
        normalization: impl Into<String>,
    ) -> Result<Self> {
        if n < MIN_GRID_SIZE {
            return Err(LabError::invalid(format!(
                "grid size {n} is below the minimum {MIN_GRID_SIZE}"
            )));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(LabError::invalid(format!("spacing must be positive, got {spacing}")));
        }
        if values.len() != n * n {
            return Err(LabError::invalid(format!(
                "expected {} values for a {n}x{n} grid, got {}",
                n * n,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(LabError::invalid(format!("value {i} is not finite")));
        }
        let field = GridField {
            n,
            spacing,
            origin,
            values,
            boundary,
            normalization: normalization.into(),
        };
        if boundary == BoundaryKind::ZeroBoundary && field.boundary_indices().any(|i| field.values[i] != 0.0) {
            return Err(LabError::invalid("zero-boundary field has a nonzero boundary entry"));
        }
        Ok(field)
    }

    /// Field with no boundary convention, centered on the plane origin.
    pub fn free(n: usize, spacing: f64, values: Vec<f64>) -> Result<Self> {
        GridField::new(
            n,
            spacing,
            centered_origin(n, spacing),
            values,
            BoundaryKind::Free,
            "none",
        )
    }

    /// Field whose value at each vertex is `f(position)`.
    pub fn from_fn(n: usize, spacing: f64, f: impl Fn(Point) -> f64) -> Result<Self> {
        let origin = centered_origin(n, spacing);
        let values = (0..n * n)
            .map(|i| f(origin + Point::new((i % n) as f64, (i / n) as f64) * spacing))
            .collect();
        GridField::new(n, spacing, origin, values, BoundaryKind::Free, "none")
    }

    pub fn constant(n: usize, spacing: f64, c: f64) -> Result<Self> {
        GridField::free(n, spacing, vec![c; n * n])
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn boundary_kind(&self) -> BoundaryKind {
        self.boundary
    }

    pub fn normalization_note(&self) -> &str {
        &self.normalization
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.n + ix
    }

    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.n, index / self.n)
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.n + ix]
    }

    pub fn position(&self, ix: usize, iy: usize) -> Point {
        self.origin + Point::new(ix as f64, iy as f64) * self.spacing
    }

    pub fn position_of(&self, index: usize) -> Point {
        let (ix, iy) = self.coords(index);
        self.position(ix, iy)
    }

    /// Plane point at the middle of the lattice.
    pub fn center(&self) -> Point {
        let half = (self.n - 1) as f64 / 2.0;
        self.origin + Point::new(half, half) * self.spacing
    }

    /// Closed rectangle spanned by the lattice.
    pub fn extent(&self) -> Rect {
        let side = (self.n - 1) as f64 * self.spacing;
        Rect::new(self.origin, self.origin + Point::new(side, side))
    }

    /// Continuous lattice coordinates of a plane point.
    pub fn lattice_coords(&self, p: Point) -> (f64, f64) {
        (
            (p.x - self.origin.x) / self.spacing,
            (p.y - self.origin.y) / self.spacing,
        )
    }

    /// Nearest lattice vertex to `p`, if `p` lies within the lattice extent.
    pub fn nearest_vertex(&self, p: Point) -> Option<usize> {
        let (u, v) = self.lattice_coords(p);
        let (ix, iy) = (u.round(), v.round());
        let max = (self.n - 1) as f64;
        if ix < 0.0 || iy < 0.0 || ix > max || iy > max {
            return None;
        }
        Some(self.index(ix as usize, iy as usize))
    }

    /// Bilinear interpolation; `None` outside the lattice extent.
    pub fn interpolate(&self, p: Point) -> Option<f64> {
        let (u, v) = self.lattice_coords(p);
        let max = (self.n - 1) as f64;
        if !(u >= 0.0 && v >= 0.0 && u <= max && v <= max) {
            return None;
        }
        let ix = (u.floor() as usize).min(self.n - 2);
        let iy = (v.floor() as usize).min(self.n - 2);
        let (a, b) = (u - ix as f64, v - iy as f64);
        let [c0, c1, c2, c3] = self.cell_coefficients(ix, iy);
        Some(c0 + c1 * a + c2 * b + c3 * a * b)
    }

    /// Coefficients `[c0, c1, c2, c3]` of the bilinear interpolant
    /// `c0 + c1 a + c2 b + c3 a b` on cell `(ix, iy)` in local coordinates.
    pub(crate) fn cell_coefficients(&self, ix: usize, iy: usize) -> [f64; 4] {
        let f00 = self.at(ix, iy);
        let f10 = self.at(ix + 1, iy);
        let f01 = self.at(ix, iy + 1);
        let f11 = self.at(ix + 1, iy + 1);
        [f00, f10 - f00, f01 - f00, f11 - f10 - f01 + f00]
    }

    pub fn boundary_indices(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.n;
        (0..n * n).filter(move |&i| {
            let (x, y) = (i % n, i / n);
            x == 0 || y == 0 || x == n - 1 || y == n - 1
        })
    }

    /// Same field shifted by a constant; the boundary convention becomes `Free`
    /// unless the shift is zero.
    pub fn plus_constant(&self, c: f64) -> GridField {
        let mut out = self.clone();
        for v in &mut out.values {
            *v += c;
        }
        if c != 0.0 {
            out.boundary = BoundaryKind::Free;
        }
        out
    }

    /// Pointwise linear combination `a * self + b * other` on the same lattice.
    pub fn combine(&self, a: f64, other: &GridField, b: f64) -> Result<GridField> {
        if self.n != other.n || self.spacing != other.spacing || self.origin != other.origin {
            return Err(LabError::invalid("fields live on different lattices"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        GridField::new(
            self.n,
            self.spacing,
            self.origin,
            values,
            BoundaryKind::Free,
            "linear combination",
        )
    }

    pub fn with_values(&self, values: Vec<f64>, boundary: BoundaryKind) -> Result<GridField> {
        GridField::new(
            self.n,
            self.spacing,
            self.origin,
            values,
            boundary,
            self.normalization.clone(),
        )
    }

    pub(crate) fn into_parts(self) -> (usize, f64, Point, Vec<f64>) {
        (self.n, self.spacing, self.origin, self.values)
    }
}

/// Origin that puts the grid center on the plane origin.
pub fn centered_origin(n: usize, spacing: f64) -> Point {
    let half = (n as f64 - 1.0) / 2.0 * spacing;
    Point::new(-half, -half)
}
