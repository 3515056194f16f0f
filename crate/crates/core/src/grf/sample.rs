//! Discrete Gaussian free field samplers.
//!
//! Both samplers use covariance `2*pi * L^{-1}`, with `L` the combinatorial
//! lattice Laplacian (`4 I - adjacency`), so circle-average variances grow like
//! `log(1/eps)` independently of the spacing.

use std::f64::consts::{PI, TAU};

use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::circle::circle_average;
use super::field::{centered_origin, BoundaryKind, GridField, MIN_GRID_SIZE};
use crate::error::{LabError, Result};
use crate::rng::rng_from_seed;

pub const ZERO_BOUNDARY_NOTE: &str = "zero Dirichlet boundary; covariance 2pi * inverse Dirichlet Laplacian";
pub const WHOLE_PLANE_NOTE: &str =
    "torus field, zero mode dropped, shifted so the unit-circle average about the grid center is 0";

/// Orthonormal sine basis of the Dirichlet Laplacian on `m` interior points.
fn sine_basis(m: usize) -> Vec<f64> {
    let scale = (2.0 / (m + 1) as f64).sqrt();
    let mut s = vec![0.0; m * m];
    for x in 0..m {
        for j in 0..m {
            s[x * m + j] = scale * (PI * ((x + 1) * (j + 1)) as f64 / (m + 1) as f64).sin();
        }
    }
    s
}

/// Zero-boundary field on an `n x n` lattice via the Laplacian eigenbasis.
pub fn sample_zero_boundary_gff(grid_size: usize, spacing: f64, seed: u64) -> Result<GridField> {
    if grid_size < MIN_GRID_SIZE {
        return Err(LabError::invalid(format!(
            "grid size {grid_size} is below the minimum {MIN_GRID_SIZE}"
        )));
    }
    if !(spacing > 0.0) {
        return Err(LabError::invalid("spacing must be positive"));
    }
    let n = grid_size;
    let m = n - 2;
    let mut rng = rng_from_seed(seed);
    let eig: Vec<f64> = (0..m)
        .map(|j| 2.0 - 2.0 * (PI * (j + 1) as f64 / (m + 1) as f64).cos())
        .collect();
    // Mode amplitudes a[j][k] ~ N(0, 2pi / lambda_jk).
    let mut amp = vec![0.0; m * m];
    for j in 0..m {
        for k in 0..m {
            let z: f64 = StandardNormal.sample(&mut rng);
            amp[j * m + k] = z * (TAU / (eig[j] + eig[k])).sqrt();
        }
    }
    let s = sine_basis(m);
    // h = S * amp * S (S is symmetric).
    let t = matmul(&s, &amp, m);
    let h = matmul(&t, &s, m);

    let mut values = vec![0.0; n * n];
    for x in 0..m {
        for y in 0..m {
            values[(y + 1) * n + (x + 1)] = h[x * m + y];
        }
    }
    GridField::new(
        n,
        spacing,
        centered_origin(n, spacing),
        values,
        BoundaryKind::ZeroBoundary,
        ZERO_BOUNDARY_NOTE,
    )
}

fn matmul(a: &[f64], b: &[f64], m: usize) -> Vec<f64> {
    let mut c = vec![0.0; m * m];
    for i in 0..m {
        let row = &mut c[i * m..(i + 1) * m];
        for k in 0..m {
            let aik = a[i * m + k];
            if aik == 0.0 {
                continue;
            }
            let brow = &b[k * m..(k + 1) * m];
            for (cij, bkj) in row.iter_mut().zip(brow) {
                *cij += aik * bkj;
            }
        }
    }
    c
}

/// Torus approximation of the whole-plane field.
///
/// `grid_size` must be a power of two and the unit circle about the grid
/// center must fit on the lattice with radius at least two spacings.
pub fn sample_whole_plane_gff(grid_size: usize, spacing: f64, seed: u64) -> Result<GridField> {
    let raw = sample_torus_field(grid_size, spacing, seed)?;
    let center = raw.center();
    let avg = circle_average(&raw, center, 1.0).map_err(|e| {
        LabError::invalid(format!(
            "unit circle does not fit a {grid_size}x{grid_size} grid with spacing {spacing}: {e}"
        ))
    })?;
    let (n, spacing, origin, mut values) = raw.into_parts();
    for v in &mut values {
        *v -= avg;
    }
    GridField::new(
        n,
        spacing,
        origin,
        values,
        BoundaryKind::TorusWholePlane,
        WHOLE_PLANE_NOTE,
    )
}

/// Mean-zero torus field before the additive constant is fixed.
pub(crate) fn sample_torus_field(grid_size: usize, spacing: f64, seed: u64) -> Result<GridField> {
    if grid_size < MIN_GRID_SIZE || !grid_size.is_power_of_two() {
        return Err(LabError::invalid(format!(
            "whole-plane grid size must be a power of two >= {MIN_GRID_SIZE}, got {grid_size}"
        )));
    }
    if !(spacing > 0.0) {
        return Err(LabError::invalid("spacing must be positive"));
    }
    let n = grid_size;
    let mut rng = rng_from_seed(seed);
    let mut buf: Vec<Complex64> = (0..n * n)
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), 0.0))
        .collect();

    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);

    fwd.process(&mut buf);
    transpose(&mut buf, n);
    fwd.process(&mut buf);

    let weights = torus_spectral_weights(n);
    for (c, w) in buf.iter_mut().zip(&weights) {
        *c *= *w;
    }

    inv.process(&mut buf);
    transpose(&mut buf, n);
    inv.process(&mut buf);

    let norm = 1.0 / (n * n) as f64;
    let values = buf.iter().map(|c| c.re * norm).collect();
    GridField::new(
        n,
        spacing,
        centered_origin(n, spacing),
        values,
        BoundaryKind::Free,
        WHOLE_PLANE_NOTE,
    )
}

/// `sqrt(2pi / lambda_k)` for each torus frequency, 0 for the zero mode.
/// Symmetric in the two frequency indices.
fn torus_spectral_weights(n: usize) -> Vec<f64> {
    let eig: Vec<f64> = (0..n).map(|k| 2.0 - 2.0 * (TAU * k as f64 / n as f64).cos()).collect();
    let mut w = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            if a == 0 && b == 0 {
                continue;
            }
            w[a * n + b] = (TAU / (eig[a] + eig[b])).sqrt();
        }
    }
    w
}

fn transpose(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_boundary_entries_are_zero_and_deterministic() {
        let a = sample_zero_boundary_gff(16, 0.1, 9).unwrap();
        assert!(a.boundary_indices().all(|i| a.values()[i] == 0.0));
        let b = sample_zero_boundary_gff(16, 0.1, 9).unwrap();
        assert_eq!(a.values(), b.values());
        assert!(sample_zero_boundary_gff(7, 0.1, 9).is_err());
    }

    #[test]
    fn whole_plane_rejects_non_power_of_two() {
        assert!(matches!(
            sample_whole_plane_gff(48, 0.1, 1),
            Err(LabError::InvalidParameter(_))
        ));
    }

    #[test]
    fn torus_field_has_zero_mean() {
        let f = sample_torus_field(32, 0.2, 4).unwrap();
        let mean: f64 = f.values().iter().sum::<f64>() / f.values().len() as f64;
        assert!(mean.abs() < 1e-12);
    }
}
