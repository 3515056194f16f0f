use super::circle::circle_average_unchecked_radius;
use super::field::GridField;
use crate::error::{LabError, Result};
use crate::geom::Rect;

/// Discrete LQG area of `region`:
/// `sum_v s^2 * s^(gamma^2/2) * exp(gamma * h_s(v))` over lattice vertices in
/// the half-open rectangle, with `h_s` the circle average at radius `s`.
pub fn lqg_measure(field: &GridField, gamma: f64, region: Rect) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 2.0) {
        return Err(LabError::invalid(format!("gamma must lie in (0, 2), got {gamma}")));
    }
    let ext = field.extent();
    if !(ext.contains(region.min) && ext.contains(region.max)) {
        return Err(LabError::OutOfDomain(format!(
            "region [{}, {}]x[{}, {}] is not inside the grid",
            region.min.x, region.max.x, region.min.y, region.max.y
        )));
    }
    let s = field.spacing();
    let n = field.size();
    let weight = s * s * s.powf(gamma * gamma / 2.0);
    let (u0, v0) = field.lattice_coords(region.min);
    let (u1, v1) = field.lattice_coords(region.max);
    let x0 = u0.ceil().max(0.0) as usize;
    let y0 = v0.ceil().max(0.0) as usize;
    let x1 = (u1.floor().max(0.0) as usize).min(n - 1);
    let y1 = (v1.floor().max(0.0) as usize).min(n - 1);
    let mut total = 0.0;
    for iy in y0..=y1 {
        for ix in x0..=x1 {
            let p = field.position(ix, iy);
            if !region.contains_half_open(p) {
                continue;
            }
            let h = circle_average_unchecked_radius(field, p, s)?;
            total += weight * (gamma * h).exp();
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;

    #[test]
    fn flat_field_counts_vertices() {
        let s = 1.0 / 16.0;
        let f = GridField::constant(32, s, 0.0).unwrap();
        let region = Rect::from_corners(-0.5, -0.5, 0.5, 0.5);
        let gamma: f64 = 1.2;
        let m = lqg_measure(&f, gamma, region).unwrap();
        // 16 x 16 vertices in the half-open unit square
        let expected = 256.0 * s * s * s.powf(gamma * gamma / 2.0);
        assert!((m - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn additive_over_disjoint_rectangles() {
        let f = GridField::from_fn(32, 0.1, |p| (3.0 * p.x).sin() + p.y).unwrap();
        let a = Rect::from_corners(-1.0, -1.0, 0.2, 1.0);
        let b = Rect::from_corners(0.2, -1.0, 1.0, 1.0);
        let whole = Rect::from_corners(-1.0, -1.0, 1.0, 1.0);
        let sum = lqg_measure(&f, 1.0, a).unwrap() + lqg_measure(&f, 1.0, b).unwrap();
        assert!((sum - lqg_measure(&f, 1.0, whole).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_gamma_and_escaping_regions() {
        let f = GridField::constant(16, 0.1, 0.0).unwrap();
        let r = Rect::new(Point::new(-0.3, -0.3), Point::new(0.3, 0.3));
        assert!(lqg_measure(&f, 2.0, r).is_err());
        assert!(lqg_measure(&f, 0.0, r).is_err());
        let big = Rect::from_corners(-5.0, -5.0, 5.0, 5.0);
        assert!(matches!(lqg_measure(&f, 1.0, big), Err(LabError::OutOfDomain(_))));
    }
}
