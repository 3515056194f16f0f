//! Small statistics helpers for Monte Carlo frequencies.

use crate::error::{LabError, Result};

/// Wilson score interval for `successes` out of `n` at normal quantile `z`.
pub fn wilson_interval(successes: usize, n: usize, z: f64) -> Result<(f64, f64)> {
    if n == 0 || successes > n {
        return Err(LabError::invalid(format!(
            "need 0 <= successes <= n and n > 0, got {successes}/{n}"
        )));
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let mid = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    Ok(((mid - half).max(0.0), (mid + half).min(1.0)))
}

/// Chernoff bound on `P[Bin(n, p) >= r n]` for `p <= r < 1`:
/// `((1 - p) / (1 - r))^{n (1 - r)} (p / r)^{n r}`.
pub fn binomial_tail_bound(p: f64, r: f64, n: usize) -> Result<f64> {
    if !(p > 0.0 && p < 1.0 && r >= p && r < 1.0) {
        return Err(LabError::invalid(format!("need 0 < p <= r < 1, got p = {p}, r = {r}")));
    }
    let nf = n as f64;
    let log = nf * ((1.0 - r) * ((1.0 - p) / (1.0 - r)).ln() + r * (p / r).ln());
    Ok(log.exp().min(1.0))
}

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(LabError::DegenerateInput("both samples must be nonempty".into()));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(LabError::invalid("samples contain NaN"));
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let ne = (n * m / (n + m)).sqrt();
    let lambda = (ne + 0.12 + 0.11 / ne) * d;
    Ok((d, kolmogorov_q(lambda)))
}

/// `Q(l) = 2 sum_{k >= 1} (-1)^{k-1} exp(-2 k^2 l^2)`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_bound_values() {
        let v = binomial_tail_bound(0.5, 0.75, 100).unwrap();
        assert!((v - 2.08e-6).abs() < 0.01e-6, "{v:e}");
        assert_eq!(binomial_tail_bound(0.3, 0.3, 40).unwrap(), 1.0);
        assert!(binomial_tail_bound(0.3, 0.5, 80).unwrap() < binomial_tail_bound(0.3, 0.5, 40).unwrap());
    }

    #[test]
    fn wilson_brackets_the_estimate() {
        let (lo, hi) = wilson_interval(40, 50, 1.96).unwrap();
        assert!(lo < 0.8 && 0.8 < hi);
        // tabulated value for 40/50
        assert!((lo - 0.6696).abs() < 1e-3 && (hi - 0.8876).abs() < 1e-3);
        let (lo, hi) = wilson_interval(0, 10, 1.96).unwrap();
        assert_eq!(lo, 0.0);
        assert!(hi > 0.2 && hi < 0.35);
    }

    #[test]
    fn ks_separates_shifted_samples() {
        let a: Vec<f64> = (0..200).map(|k| k as f64).collect();
        let b: Vec<f64> = a.iter().map(|v| v + 100.0).collect();
        let (d, p) = ks_two_sample(&a, &b).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        assert!(p < 1e-10);
        let (d, p) = ks_two_sample(&a, &a).unwrap();
        assert_eq!(d, 0.0);
        assert_eq!(p, 1.0);
    }
}
