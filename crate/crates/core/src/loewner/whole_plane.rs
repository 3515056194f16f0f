//! Whole-plane traces from composed radial slit maps.
//!
//! In the disk, the radial slit map for a step of length `dt` is
//! `f(q) = k^{-1}(a k(q))` with the Koebe function `k(q) = q / (1 - q)^2` and
//! `a = e^{-dt}`: it removes a radial slit ending at `-1` and has
//! `f'(0) = a`. Rotated so that the slit points at `e^{iU}` and conjugated
//! by `z -> 1/z`, it becomes a map of the exterior of the unit disk that grows
//! the hull by one step. The chain starts from the disk of radius `e^{-T0}`,
//! standing in for the whole-plane hull at time `-T0`.

use num_complex::Complex64;

use super::chordal::points_to_path;
use super::driving::{sample_driving, DrivingFunction};
use crate::error::{LabError, Result};
use crate::path::{PathKind, PlanarPath};

const TINY: f64 = 1e-12;

/// Inverse Koebe function on `C \ (-inf, -1/4]`.
#[inline]
fn koebe_inv(w: Complex64) -> Complex64 {
    2.0 * w / ((2.0 * w + 1.0) + (1.0 + 4.0 * w).sqrt())
}

#[derive(Clone, Copy)]
struct ExteriorSlitMap {
    rot: Complex64,
    a: f64,
    tip_radius: f64,
}

impl ExteriorSlitMap {
    fn new(u: f64, dt: f64) -> Self {
        let a = (-dt).exp();
        // radial slit in the disk ends at k^{-1}(-a/4) = x < 0
        let x = (-a / 2.0) / ((1.0 - a / 2.0) + (1.0 - a).sqrt());
        ExteriorSlitMap {
            rot: Complex64::from_polar(1.0, u),
            a,
            tip_radius: 1.0 / x.abs(),
        }
    }

    fn tip(&self) -> Complex64 {
        self.rot * self.tip_radius
    }

    /// `z -> 1 / f_{-U}(1 / z)` with `f_V(q) = -e^{iV} f(-e^{-iV} q)`.
    #[inline]
    fn apply(&self, z: Complex64, step: usize) -> Result<Complex64> {
        // -e^{iU} / z, the disk-side argument in the slit-at--1 frame
        let q = -self.rot / z;
        let one_minus = 1.0 - q;
        if one_minus.norm() < TINY || z.norm() < TINY {
            return Err(LabError::NumericalInstability {
                step,
                detail: "radial slit map evaluated at its pole".into(),
            });
        }
        let k = q / (one_minus * one_minus);
        let f = koebe_inv(self.a * k);
        if f.norm() < TINY {
            return Err(LabError::NumericalInstability {
                step,
                detail: "radial slit map image collapsed to 0".into(),
            });
        }
        Ok(-self.rot / f)
    }
}

/// Start time offset: the initial disk has radius `e^{-T0}` with
/// `T0 = ceil(ln(1/dt)) + 1`, so `e^{-T0} < dt`.
pub fn whole_plane_start_offset(dt: f64) -> f64 {
    (1.0 / dt).ln().ceil().max(0.0) + 1.0
}

/// Whole-plane trace from 0 with `U = sqrt(kappa) B`, run until `horizon`.
pub fn whole_plane_trace(kappa: f64, horizon: f64, dt: f64, seed: u64) -> Result<PlanarPath> {
    if !(horizon >= dt) {
        return Err(LabError::invalid(format!(
            "horizon {horizon} must be at least dt = {dt}"
        )));
    }
    let t0 = whole_plane_start_offset(dt);
    let driving = sample_driving(kappa, t0 + horizon, dt, seed)?;
    whole_plane_trace_from_driving(&driving, t0)
}

/// Whole-plane trace for an explicit driving function whose time origin is
/// the start time `-t0`.
pub fn whole_plane_trace_from_driving(driving: &DrivingFunction, t0: f64) -> Result<PlanarPath> {
    if !(t0 >= 0.0) {
        return Err(LabError::invalid("start offset must be nonnegative"));
    }
    let t = driving.times();
    let u = driving.values();
    let maps: Vec<ExteriorSlitMap> = (0..driving.steps())
        .map(|j| ExteriorSlitMap::new(u[j + 1], t[j + 1] - t[j]))
        .collect();
    let scale = (-t0).exp();
    let mut pts = Vec::with_capacity(maps.len() + 1);
    pts.push(Complex64::from_polar(scale, u[0]));
    for k in 0..maps.len() {
        let mut z = maps[k].tip();
        for j in (0..k).rev() {
            z = maps[j].apply(z, j)?;
        }
        pts.push(z * scale);
    }
    points_to_path(pts, PathKind::SleTrace)
}
