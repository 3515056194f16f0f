//! The harmonic-measure angle diffusion
//! `dT = (1 - 4/kappa) cot(T) dt + dB` on `(0, pi)`.

use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};

use super::driving::step_count;
use crate::error::{LabError, Result};
use crate::rng::rng_from_seed;

/// Sampled angle path. If the process reached `{0, pi}` before the horizon
/// the path stops at the last interior sample and `absorbed` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub kappa: f64,
    pub absorbed: bool,
    pub absorbed_at: Option<f64>,
}

impl ThetaPath {
    /// Value at the horizon, taking an absorbed path to the boundary point it
    /// reached.
    pub fn terminal_value(&self) -> f64 {
        let last = *self.values.last().unwrap();
        if self.absorbed {
            if last < PI / 2.0 {
                0.0
            } else {
                PI
            }
        } else {
            last
        }
    }
}

/// Smallest substep before the process is treated as absorbed.
const MIN_STEP: f64 = 1e-14;

/// Euler-Maruyama with step rejection near the boundary: a step is halved
/// while its drift displacement exceeds half the distance to `{0, pi}`.
pub fn theta_diffusion(kappa: f64, theta0: f64, horizon: f64, dt: f64, seed: u64) -> Result<ThetaPath> {
    if !(theta0 > 0.0 && theta0 < PI) {
        return Err(LabError::invalid(format!("theta0 must lie in (0, pi), got {theta0}")));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(LabError::invalid(format!("kappa must be positive, got {kappa}")));
    }
    let steps = step_count(horizon, dt)?;
    let coef = 1.0 - 4.0 / kappa;
    let mut rng = rng_from_seed(seed);
    let mut times = vec![0.0];
    let mut values = vec![theta0];
    let mut theta = theta0;
    let mut absorbed_at = None;

    'outer: for k in 1..=steps {
        let target = k as f64 * dt;
        let mut t = *times.last().unwrap();
        while t < target {
            let mut h = target - t;
            let drift = coef / theta.tan();
            let room = theta.min(PI - theta);
            while (drift * h).abs() > 0.5 * room && h > MIN_STEP {
                h /= 2.0;
            }
            if h <= MIN_STEP {
                absorbed_at = Some(t);
                break 'outer;
            }
            let z: f64 = StandardNormal.sample(&mut rng);
            let next = theta + drift * h + h.sqrt() * z;
            t = if h == target - t { target } else { t + h };
            if !(next > 0.0 && next < PI) {
                absorbed_at = Some(t);
                break 'outer;
            }
            theta = next;
        }
        times.push(target);
        values.push(theta);
    }
    Ok(ThetaPath {
        times,
        values,
        kappa,
        absorbed: absorbed_at.is_some(),
        absorbed_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_start() {
        assert!(theta_diffusion(4.0, 0.0, 1.0, 0.01, 1).is_err());
        assert!(theta_diffusion(4.0, PI, 1.0, 0.01, 1).is_err());
    }

    #[test]
    fn values_stay_inside_and_absorption_truncates() {
        for seed in 0..50 {
            let p = theta_diffusion(2.0, 0.3, 5.0, 0.01, seed).unwrap();
            assert!(p.values.iter().all(|&v| v > 0.0 && v < PI));
            assert_eq!(p.times.len(), p.values.len());
            if p.absorbed {
                assert!(p.times.len() < 501);
            } else {
                assert_eq!(p.times.len(), 501);
            }
        }
    }

    #[test]
    fn kappa_four_has_no_drift() {
        // same noise with and without the drift term switched off agrees
        let p = theta_diffusion(4.0, 1.0, 0.1, 0.01, 7).unwrap();
        let mut rng = rng_from_seed(7);
        let mut th = 1.0;
        for (k, v) in p.values.iter().enumerate().skip(1) {
            let z: f64 = StandardNormal.sample(&mut rng);
            th += 0.01f64.sqrt() * z;
            assert!((v - th).abs() < 1e-12, "step {k}");
        }
    }
}
