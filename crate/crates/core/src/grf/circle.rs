//! Circle averages of the bilinear interpolant of a lattice field.
//!
//! The circle is cut at every lattice line it crosses. On each resulting arc
//! the interpolant is `K + P cos t + Q sin t + S cos t sin t`, which is
//! integrated in closed form, so the result is the exact average of the
//! interpolant (no quadrature error).

use std::f64::consts::TAU;

use super::field::GridField;
use crate::error::{LabError, Result};
use crate::geom::Point;

/// Average of `field` over the circle of the given radius about `center`.
///
/// Requires `radius >= 2 * spacing` and the circle to lie inside the lattice.
pub fn circle_average(field: &GridField, center: Point, radius: f64) -> Result<f64> {
    if !(radius >= 2.0 * field.spacing()) {
        return Err(LabError::invalid(format!(
            "circle radius {radius} is below twice the lattice spacing {}",
            field.spacing()
        )));
    }
    circle_average_unchecked_radius(field, center, radius)
}

/// Same as [`circle_average`] without the minimum-radius rule; used for the
/// lattice-scale regularization in the area measure.
pub(crate) fn circle_average_unchecked_radius(field: &GridField, center: Point, radius: f64) -> Result<f64> {
    if !(radius > 0.0) || !center.is_finite() {
        return Err(LabError::invalid(format!("bad circle ({center:?}, {radius})")));
    }
    let ext = field.extent();
    if center.x - radius < ext.min.x
        || center.x + radius > ext.max.x
        || center.y - radius < ext.min.y
        || center.y + radius > ext.max.y
    {
        return Err(LabError::OutOfDomain(format!(
            "circle of radius {radius} about ({}, {}) leaves the grid",
            center.x, center.y
        )));
    }

    let (cu, cv) = field.lattice_coords(center);
    let r = radius / field.spacing();
    let n = field.size();

    let mut cuts = vec![0.0, TAU];
    push_line_crossings(&mut cuts, cu, r, true);
    push_line_crossings(&mut cuts, cv, r, false);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();

    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 <= t0 {
            continue;
        }
        let mid = 0.5 * (t0 + t1);
        let u = cu + r * mid.cos();
        let v = cv + r * mid.sin();
        let ix = (u.floor().max(0.0) as usize).min(n - 2);
        let iy = (v.floor().max(0.0) as usize).min(n - 2);
        let [c0, c1, c2, c3] = field.cell_coefficients(ix, iy);
        let a0 = cu - ix as f64;
        let b0 = cv - iy as f64;
        let k = c0 + c1 * a0 + c2 * b0 + c3 * a0 * b0;
        let p = r * (c1 + c3 * b0);
        let q = r * (c2 + c3 * a0);
        let s = c3 * r * r;
        let (s0, c0t) = t0.sin_cos();
        let (s1, c1t) = t1.sin_cos();
        total += k * (t1 - t0) + p * (s1 - s0) + q * (c0t - c1t) + 0.5 * s * (s1 * s1 - s0 * s0);
    }
    Ok(total / TAU)
}

/// Angles in `[0, 2pi)` where `coord + r cos t` (or `r sin t`) is an integer.
fn push_line_crossings(out: &mut Vec<f64>, coord: f64, r: f64, horizontal: bool) {
    let lo = (coord - r).ceil() as i64;
    let hi = (coord + r).floor() as i64;
    for k in lo..=hi {
        let c = ((k as f64 - coord) / r).clamp(-1.0, 1.0);
        let base = if horizontal { c.acos() } else { c.asin() };
        let pair = if horizontal {
            [base, TAU - base]
        } else {
            [base, std::f64::consts::PI - base]
        };
        for t in pair {
            let t = t.rem_euclid(TAU);
            out.push(t);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_force(field: &GridField, center: Point, radius: f64, m: usize) -> f64 {
        (0..m)
            .map(|k| {
                let t = TAU * (k as f64 + 0.5) / m as f64;
                field
                    .interpolate(center + Point::new(t.cos(), t.sin()) * radius)
                    .unwrap()
            })
            .sum::<f64>()
            / m as f64
    }

    #[test]
    fn constant_field_average_is_the_constant() {
        let f = GridField::constant(16, 0.5, 3.25).unwrap();
        let a = circle_average(&f, Point::new(0.1, -0.2), 2.0).unwrap();
        assert!((a - 3.25).abs() < 1e-14);
    }

    #[test]
    fn linear_ramp_averages_to_center_value() {
        let c = Point::new(0.3, -0.4);
        let f = GridField::from_fn(32, 0.25, |p| p.x - c.x).unwrap();
        assert!(circle_average(&f, c, 1.7).unwrap().abs() < 1e-9);
    }

    #[test]
    fn matches_fine_quadrature_on_random_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let vals = (0..32 * 32).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = GridField::free(32, 1.0, vals).unwrap();
        for &(cx, cy) in &[(0.0, 0.0), (0.37, -1.21), (2.5, 3.0)] {
            let c = Point::new(cx, cy);
            let exact = circle_average(&f, c, 4.0).unwrap();
            let brute = brute_force(&f, c, 4.0, 10_000);
            assert!((exact - brute).abs() < 1e-6, "{exact} vs {brute}");
        }
    }

    #[test]
    fn rejects_small_radius_and_escaping_circles() {
        let f = GridField::constant(16, 1.0, 0.0).unwrap();
        assert!(matches!(
            circle_average(&f, Point::new(0.0, 0.0), 1.5),
            Err(LabError::InvalidParameter(_))
        ));
        assert!(matches!(
            circle_average(&f, Point::new(5.0, 0.0), 3.0),
            Err(LabError::OutOfDomain(_))
        ));
    }
}
