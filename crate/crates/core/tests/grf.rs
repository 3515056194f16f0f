use std::f64::consts::TAU;

use lqglab::grf::{
    circle_average, good_scale_report, harmonic_decomposition, is_m_good, lqg_measure, sample_whole_plane_gff,
    sample_zero_boundary_gff, GridField,
};
use lqglab::rng::derive_seed;
use lqglab::{Point, Rect};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `2 pi` times the inverse of the Dirichlet graph Laplacian on the interior
/// of an `n x n` grid, indexed by interior vertex `(x - 1) + (y - 1) (n - 2)`.
fn dirichlet_green(n: usize) -> DMatrix<f64> {
    let m = n - 2;
    let mut lap = DMatrix::zeros(m * m, m * m);
    for y in 0..m {
        for x in 0..m {
            let i = x + y * m;
            lap[(i, i)] = 4.0;
            if x > 0 {
                lap[(i, i - 1)] = -1.0;
            }
            if x + 1 < m {
                lap[(i, i + 1)] = -1.0;
            }
            if y > 0 {
                lap[(i, i - m)] = -1.0;
            }
            if y + 1 < m {
                lap[(i, i + m)] = -1.0;
            }
        }
    }
    lap.try_inverse().unwrap() * TAU
}

#[test]
fn center_variance_matches_dense_green_function() {
    let n = 8;
    let green = dirichlet_green(n);
    let samples = 100_000;
    let (cx, cy) = (4, 4);
    let mut sq = Vec::with_capacity(samples);
    for k in 0..samples {
        let f = sample_zero_boundary_gff(n, 1.0, derive_seed(11, k as u64)).unwrap();
        sq.push(f.at(cx, cy).powi(2));
    }
    let mean = sq.iter().sum::<f64>() / samples as f64;
    let sd = (sq.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64).sqrt();
    let se = sd / (samples as f64).sqrt();
    let exact = green[((cx - 1) + (cy - 1) * (n - 2), (cx - 1) + (cy - 1) * (n - 2))];
    assert!(
        (mean - exact).abs() < 3.0 * se,
        "empirical {mean}, exact {exact}, se {se}"
    );
}

/// Weights `w` with `circle_average(f, c, r) = sum_i w_i f_i`, read off by
/// averaging unit impulses (the average is linear in the field).
fn circle_functional(n: usize, spacing: f64, c: Point, r: f64) -> Vec<(usize, f64)> {
    let probe = GridField::constant(n, spacing, 0.0).unwrap();
    let (u, v) = probe.lattice_coords(c);
    let reach = r / spacing + 2.0;
    let mut out = Vec::new();
    for iy in 0..n {
        for ix in 0..n {
            if (ix as f64 - u).abs() > reach || (iy as f64 - v).abs() > reach {
                continue;
            }
            let i = probe.index(ix, iy);
            let mut vals = vec![0.0; n * n];
            vals[i] = 1.0;
            let w = circle_average(&GridField::free(n, spacing, vals).unwrap(), c, r).unwrap();
            if w != 0.0 {
                out.push((i, w));
            }
        }
    }
    out
}

/// Exact variance of `sum_i w_i h_i` for the torus field with covariance
/// `2 pi L^+`, summing over Fourier modes.
fn torus_variance(n: usize, w: &[(usize, f64)]) -> f64 {
    let mut total = 0.0;
    for a in 0..n {
        for b in 0..n {
            if a == 0 && b == 0 {
                continue;
            }
            let lambda = 4.0 - 2.0 * (TAU * a as f64 / n as f64).cos() - 2.0 * (TAU * b as f64 / n as f64).cos();
            let (mut re, mut im) = (0.0, 0.0);
            for &(i, wi) in w {
                let (x, y) = (i % n, i / n);
                let phase = TAU * (a * x + b * y) as f64 / n as f64;
                re += wi * phase.cos();
                im += wi * phase.sin();
            }
            total += (re * re + im * im) * TAU / lambda;
        }
    }
    total / (n * n) as f64
}

#[test]
fn circle_average_variance_grows_as_radius_shrinks() {
    let (n, s) = (64, 1.0 / 16.0);
    let c = GridField::constant(n, s, 0.0).unwrap().center();
    let unit = circle_functional(n, s, c, 1.0);
    let radii = [0.5, 0.25, 0.125];
    // whole-plane value = torus value minus the unit-circle average
    let exact: Vec<f64> = radii
        .iter()
        .map(|&r| {
            let mut w = circle_functional(n, s, c, r);
            w.extend(unit.iter().map(|&(i, v)| (i, -v)));
            torus_variance(n, &w)
        })
        .collect();
    assert!(exact[0] < exact[1] && exact[1] < exact[2], "{exact:?}");

    let samples = 10_000;
    let mut vals = vec![Vec::with_capacity(samples); radii.len()];
    for k in 0..samples {
        let f = sample_whole_plane_gff(n, s, derive_seed(5, k as u64)).unwrap();
        for (j, &r) in radii.iter().enumerate() {
            vals[j].push(circle_average(&f, c, r).unwrap());
        }
    }
    let var: Vec<f64> = vals
        .iter()
        .map(|v| v.iter().map(|x| x * x).sum::<f64>() / samples as f64)
        .collect();
    assert!(var[0] < var[1] && var[1] < var[2], "{var:?}");
    for j in 0..radii.len() {
        // a Gaussian second moment has relative standard error sqrt(2 / N)
        let se = exact[j] * (2.0 / samples as f64).sqrt();
        assert!(
            (var[j] - exact[j]).abs() < 4.0 * se,
            "radius {}: {} vs {}",
            radii[j],
            var[j],
            exact[j]
        );
    }
}

#[test]
fn harmonic_part_matches_dense_dirichlet_solve() {
    let n = 12;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let f = GridField::free(n, 1.0, (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
    // a disk holding a 4 x 4 block of vertices
    let c = f.position(5, 5) + Point::new(0.5, 0.5);
    let r = 2.2;
    let dec = harmonic_decomposition(&f, c, r).unwrap();
    let inside: Vec<usize> = (0..n * n).filter(|&i| f.position_of(i).dist(c) < r).collect();
    assert_eq!(inside.len(), 16);
    let local = |i: usize| inside.iter().position(|&j| j == i);
    let m = inside.len();
    let mut a = DMatrix::zeros(m, m);
    let mut b = DVector::zeros(m);
    for (row, &i) in inside.iter().enumerate() {
        let (x, y) = f.coords(i);
        a[(row, row)] = 4.0;
        for (nx, ny) in [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)] {
            let j = f.index(nx, ny);
            match local(j) {
                Some(col) => a[(row, col)] = -1.0,
                None => b[row] += f.values()[j],
            }
        }
    }
    let u = a.lu().solve(&b).unwrap();
    for (row, &i) in inside.iter().enumerate() {
        assert!((dec.harmonic_part.values()[i] - u[row]).abs() < 1e-8);
    }
}

#[test]
fn steep_ramp_fails_and_goodness_is_monotone_in_m() {
    let r = 4.0;
    let f = GridField::from_fn(32, 0.5, |p| 10.0 / r * p.x).unwrap();
    let c = Point::new(0.0, 0.0);
    assert!(!is_m_good(&f, c, r, 0.1).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = GridField::free(32, 0.5, (0..32 * 32).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap();
    let mut seen_good = false;
    for m in [0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2] {
        let good = is_m_good(&g, c, r, m).unwrap();
        assert!(good || !seen_good, "good at a smaller M but not at {m}");
        seen_good |= good;
    }
    assert!(seen_good);
}

#[test]
fn good_scale_fraction_is_the_mean_of_per_scale_tests() {
    let (n, s, k, m) = (256, 1.0 / 64.0, 5, 4.0);
    let replicas = 200;
    let mut per_scale = vec![0usize; k];
    let mut fractions = 0.0;
    for rep in 0..replicas {
        let f = sample_whole_plane_gff(n, s, derive_seed(17, rep)).unwrap();
        let c = f.center();
        let report = good_scale_report(&f, c, 2.0, k, m).unwrap();
        fractions += report.fraction_good;
        for (j, count) in per_scale.iter_mut().enumerate() {
            let r = 2.0 / (1u64 << (j + 1)) as f64;
            let good = is_m_good(&f, c, r, m).unwrap();
            assert_eq!(good, report.per_scale_good[j]);
            *count += good as usize;
        }
    }
    let mean_fraction = fractions / replicas as f64;
    let from_parts = per_scale.iter().sum::<usize>() as f64 / (k * replicas as usize) as f64;
    assert!((mean_fraction - from_parts).abs() < 1e-12);
}

#[test]
fn measure_scales_with_an_added_constant() {
    let f = sample_whole_plane_gff(64, 1.0 / 16.0, 3).unwrap();
    let region = Rect::from_corners(-0.5, -0.5, 0.5, 0.5);
    let gamma = 1.2;
    let base = lqg_measure(&f, gamma, region).unwrap();
    let shifted = lqg_measure(&f.plus_constant(0.7), gamma, region).unwrap();
    assert!((shifted / base - (gamma * 0.7f64).exp()).abs() < 1e-9);
}

#[test]
fn whole_plane_field_has_zero_unit_circle_average() {
    for seed in 0..5 {
        let f = sample_whole_plane_gff(64, 1.0 / 16.0, seed).unwrap();
        assert!(circle_average(&f, f.center(), 1.0).unwrap().abs() < 1e-9);
        let shifted = f.plus_constant(0.3);
        let c = Point::new(0.2, -0.1);
        let diff = circle_average(&shifted, c, 0.5).unwrap() - circle_average(&f, c, 0.5).unwrap();
        assert!((diff - 0.3).abs() < 1e-12);
    }
}

#[test]
fn harmonic_decomposition_is_idempotent() {
    let f = sample_whole_plane_gff(64, 1.0 / 16.0, 12).unwrap();
    let c = Point::new(0.1, 0.05);
    let dec = harmonic_decomposition(&f, c, 0.8).unwrap();
    let again = harmonic_decomposition(&dec.harmonic_part, c, 0.8).unwrap();
    assert!(again.remainder.values().iter().all(|v| v.abs() < 1e-8));
}

#[test]
fn m_goodness_ignores_added_constants() {
    for seed in 0..10 {
        let f = sample_whole_plane_gff(64, 1.0 / 16.0, seed).unwrap();
        let c = f.center();
        for m in [0.5, 1.0, 2.0, 4.0] {
            assert_eq!(
                is_m_good(&f, c, 1.0, m).unwrap(),
                is_m_good(&f.plus_constant(-5.0), c, 1.0, m).unwrap()
            );
        }
    }
}

mod linearity {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn circle_average_is_linear(
            sa in 0u64..1000, sb in 0u64..1000,
            a in -3.0..3.0f64, b in -3.0..3.0f64,
            x in -0.5..0.5f64, y in -0.5..0.5f64, r in 0.3..1.0f64,
        ) {
            let f = sample_whole_plane_gff(32, 0.125, sa).unwrap();
            let g = sample_whole_plane_gff(32, 0.125, sb).unwrap();
            let c = Point::new(x, y);
            let lhs = circle_average(&f.combine(a, &g, b).unwrap(), c, r).unwrap();
            let rhs = a * circle_average(&f, c, r).unwrap() + b * circle_average(&g, c, r).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
        }
    }
}
