//! Markov decomposition of a lattice field on a disk and the M-good test.

use serde::Serialize;

use super::field::{BoundaryKind, GridField};
use crate::error::{LabError, Result};
use crate::geom::Point;

/// `field = harmonic_part + remainder`, where `harmonic_part` is discrete
/// harmonic on the lattice disk and equals `field` off it, and `remainder`
/// vanishes off the disk.
#[derive(Debug, Clone)]
pub struct HarmonicDecomposition {
    pub harmonic_part: GridField,
    pub remainder: GridField,
    pub center: Point,
    pub radius: f64,
}

/// Lattice vertices strictly inside a disk, with a reverse lookup table.
pub(crate) struct LatticeDisk {
    pub members: Vec<usize>,
    local: Vec<u32>,
}

const NOT_IN_DISK: u32 = u32::MAX;

impl LatticeDisk {
    pub fn new(field: &GridField, center: Point, radius: f64) -> Self {
        let n = field.size();
        let (cu, cv) = field.lattice_coords(center);
        let rr = radius / field.spacing();
        let x0 = ((cu - rr).floor().max(0.0)) as usize;
        let x1 = ((cu + rr).ceil() as usize).min(n - 1);
        let y0 = ((cv - rr).floor().max(0.0)) as usize;
        let y1 = ((cv + rr).ceil() as usize).min(n - 1);
        let mut local = vec![NOT_IN_DISK; n * n];
        let mut members = Vec::new();
        for iy in y0..=y1 {
            for ix in x0..=x1 {
                if field.position(ix, iy).dist(center) < radius {
                    let i = field.index(ix, iy);
                    local[i] = members.len() as u32;
                    members.push(i);
                }
            }
        }
        LatticeDisk { members, local }
    }

    pub fn local_index(&self, i: usize) -> Option<usize> {
        match self.local[i] {
            NOT_IN_DISK => None,
            l => Some(l as usize),
        }
    }
}

fn neighbors(n: usize, i: usize) -> impl Iterator<Item = usize> {
    let (x, y) = (i % n, i / n);
    let mut out = [usize::MAX; 4];
    if x > 0 {
        out[0] = i - 1;
    }
    if x + 1 < n {
        out[1] = i + 1;
    }
    if y > 0 {
        out[2] = i - n;
    }
    if y + 1 < n {
        out[3] = i + n;
    }
    out.into_iter().filter(|&j| j != usize::MAX)
}

/// Splits `field` on `B(center, radius)` into its harmonic extension of the
/// outside values and a remainder supported in the disk.
///
/// The disk plus a two-step margin must lie inside the lattice.
pub fn harmonic_decomposition(field: &GridField, center: Point, radius: f64) -> Result<HarmonicDecomposition> {
    if !(radius > 0.0) || !center.is_finite() {
        return Err(LabError::invalid(format!("bad disk ({center:?}, {radius})")));
    }
    let ext = field.extent();
    let reach = radius + 2.0 * field.spacing();
    if center.x - reach < ext.min.x
        || center.x + reach > ext.max.x
        || center.y - reach < ext.min.y
        || center.y + reach > ext.max.y
    {
        return Err(LabError::OutOfDomain(format!(
            "disk of radius {radius} about ({}, {}) comes within two lattice steps of the grid boundary",
            center.x, center.y
        )));
    }

    let n = field.size();
    let disk = LatticeDisk::new(field, center, radius);
    let vals = field.values();

    // (4I - A_disk) u = b, b = sum of outside neighbor values.
    let b: Vec<f64> = disk
        .members
        .iter()
        .map(|&i| {
            neighbors(n, i)
                .filter(|&j| disk.local_index(j).is_none())
                .map(|j| vals[j])
                .sum()
        })
        .collect();
    let nbrs: Vec<[u32; 4]> = disk
        .members
        .iter()
        .map(|&i| {
            let mut out = [NOT_IN_DISK; 4];
            for (slot, j) in neighbors(n, i).filter_map(|j| disk.local_index(j)).enumerate() {
                out[slot] = j as u32;
            }
            out
        })
        .collect();
    let u = conjugate_gradient(&nbrs, &b)?;

    let mut harmonic = vals.to_vec();
    let mut remainder = vec![0.0; n * n];
    for (l, &i) in disk.members.iter().enumerate() {
        harmonic[i] = u[l];
        remainder[i] = vals[i] - u[l];
    }
    Ok(HarmonicDecomposition {
        harmonic_part: field.with_values(harmonic, BoundaryKind::Free)?,
        remainder: field.with_values(remainder, BoundaryKind::Free)?,
        center,
        radius,
    })
}

fn apply(nbrs: &[[u32; 4]], x: &[f64], out: &mut [f64]) {
    for (l, nb) in nbrs.iter().enumerate() {
        let mut acc = 4.0 * x[l];
        for &j in nb {
            if j != NOT_IN_DISK {
                acc -= x[j as usize];
            }
        }
        out[l] = acc;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn conjugate_gradient(nbrs: &[[u32; 4]], b: &[f64]) -> Result<Vec<f64>> {
    let m = b.len();
    let mut x = vec![0.0; m];
    if m == 0 {
        return Ok(x);
    }
    let tol = 1e-12 * dot(b, b).sqrt().max(1.0);
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; m];
    let mut rr = dot(&r, &r);
    let max_iter = 20 * m + 100;
    for _ in 0..max_iter {
        if rr.sqrt() <= tol {
            return Ok(x);
        }
        apply(nbrs, &p, &mut ap);
        let alpha = rr / dot(&p, &ap);
        for l in 0..m {
            x[l] += alpha * p[l];
            r[l] -= alpha * ap[l];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for l in 0..m {
            p[l] = r[l] + beta * p[l];
        }
    }
    Err(LabError::NumericalInstability {
        step: max_iter,
        detail: format!("conjugate gradient did not reach residual {tol:e}"),
    })
}

/// Whether the harmonic part on `B(center, radius)` stays within `M` of its
/// value at the center over `B(center, 15 radius / 16)`.
pub fn is_m_good(field: &GridField, center: Point, radius: f64, m: f64) -> Result<bool> {
    if !(m > 0.0) {
        return Err(LabError::invalid(format!("M must be positive, got {m}")));
    }
    Ok(harmonic_oscillation(field, center, radius)? <= m)
}

/// `sup |h(w) - h(center)|` of the harmonic part over the inner disk.
pub fn harmonic_oscillation(field: &GridField, center: Point, radius: f64) -> Result<f64> {
    let dec = harmonic_decomposition(field, center, radius)?;
    let h = &dec.harmonic_part;
    let h0 = h
        .interpolate(center)
        .ok_or_else(|| LabError::OutOfDomain("disk center off the lattice".into()))?;
    let inner = LatticeDisk::new(h, center, radius * 15.0 / 16.0);
    Ok(inner
        .members
        .iter()
        .map(|&i| (h.values()[i] - h0).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Serialize)]
pub struct GoodScaleReport {
    pub center: Point,
    pub base_radius: f64,
    pub k: usize,
    pub m: f64,
    pub per_scale_good: Vec<bool>,
    pub fraction_good: f64,
}

/// Largest `K` with `2^-K * base_radius >= 4 * spacing`.
pub fn max_feasible_scales(base_radius: f64, spacing: f64) -> usize {
    let ratio = base_radius / (4.0 * spacing);
    if ratio < 1.0 {
        0
    } else {
        ratio.log2().floor() as usize
    }
}

/// M-good test at the dyadic radii `r_k = 2^-k * base_radius`, `k = 1..=K`.
pub fn good_scale_report(
    field: &GridField,
    center: Point,
    base_radius: f64,
    k: usize,
    m: f64,
) -> Result<GoodScaleReport> {
    if k == 0 {
        return Err(LabError::invalid("K must be at least 1"));
    }
    let max_k = max_feasible_scales(base_radius, field.spacing());
    if k > max_k {
        return Err(LabError::invalid(format!(
            "K = {k} exceeds the lattice resolution; the largest feasible K is {max_k}"
        )));
    }
    let per_scale_good = (1..=k)
        .map(|j| is_m_good(field, center, base_radius / (1u64 << j) as f64, m))
        .collect::<Result<Vec<_>>>()?;
    let good = per_scale_good.iter().filter(|&&g| g).count();
    Ok(GoodScaleReport {
        center,
        base_radius,
        k,
        m,
        fraction_good: good as f64 / k as f64,
        per_scale_good,
    })
}
