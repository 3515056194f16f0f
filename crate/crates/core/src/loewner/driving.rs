use rand_distr::{Distribution, StandardNormal};

use crate::error::{LabError, Result};
use crate::rng::{derive_seed, rng_from_seed};

/// Sampled Loewner driving function `U`, piecewise constant between samples.
#[derive(Debug, Clone, PartialEq)]
pub struct DrivingFunction {
    times: Vec<f64>,
    values: Vec<f64>,
    kappa: f64,
}

impl DrivingFunction {
    pub fn new(times: Vec<f64>, values: Vec<f64>, kappa: f64) -> Result<Self> {
        if times.len() < 2 || times.len() != values.len() {
            return Err(LabError::invalid(
                "driving function needs matching time and value lists of length >= 2",
            ));
        }
        if times[0] != 0.0 {
            return Err(LabError::invalid("driving times must start at 0"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || !times.iter().all(|t| t.is_finite()) {
            return Err(LabError::invalid(
                "driving times must be finite and strictly increasing",
            ));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(LabError::invalid("driving values must be finite"));
        }
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(LabError::invalid(format!("kappa must be nonnegative, got {kappa}")));
        }
        Ok(DrivingFunction { times, values, kappa })
    }

    /// Samples `f(t)` on the uniform grid `0, dt, ..., steps * dt`.
    pub fn from_fn(horizon: f64, dt: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let steps = step_count(horizon, dt)?;
        let times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
        let values = times.iter().map(|&t| f(t)).collect();
        DrivingFunction::new(times, values, 0.0)
    }

    pub fn constant(c: f64, horizon: f64, dt: f64) -> Result<Self> {
        DrivingFunction::from_fn(horizon, dt, |_| c)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Number of Loewner steps (one fewer than the sample count).
    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn shifted(&self, c: f64) -> DrivingFunction {
        DrivingFunction {
            times: self.times.clone(),
            values: self.values.iter().map(|v| v + c).collect(),
            kappa: self.kappa,
        }
    }

    /// Brownian rescaling `t -> alpha^2 t`, `U -> alpha U`.
    pub fn scaled(&self, alpha: f64) -> DrivingFunction {
        DrivingFunction {
            times: self.times.iter().map(|t| t * alpha * alpha).collect(),
            values: self.values.iter().map(|v| v * alpha).collect(),
            kappa: self.kappa,
        }
    }
}

impl DrivingFunction {
    /// Splits each listed interval `[t_i, t_{i+1}]` at its midpoint, drawing
    /// the new value from the Brownian bridge between the endpoint values.
    pub fn bisected(&self, intervals: &[usize], seed: u64) -> DrivingFunction {
        let plan: Vec<(usize, u32)> = intervals.iter().map(|&i| (i, 1)).collect();
        self.subdivided(&plan, seed)
    }

    /// Splits interval `i` into `2^depth` equal pieces for each `(i, depth)`,
    /// filling in values by repeated Brownian-bridge bisection. Each draw
    /// depends only on `seed` and the start time of the piece being split, so
    /// refinement is reproducible and independent of the order of `plan`.
    pub fn subdivided(&self, plan: &[(usize, u32)], seed: u64) -> DrivingFunction {
        let mut depth = vec![0u32; self.steps()];
        for &(i, d) in plan {
            if i < depth.len() {
                depth[i] = depth[i].max(d);
            }
        }
        let extra: usize = depth.iter().map(|&d| (1usize << d) - 1).sum();
        let mut times = Vec::with_capacity(self.times.len() + extra);
        let mut values = Vec::with_capacity(self.times.len() + extra);
        for i in 0..self.steps() {
            times.push(self.times[i]);
            values.push(self.values[i]);
            self.fill_bridge(
                (self.times[i], self.values[i]),
                (self.times[i + 1], self.values[i + 1]),
                depth[i],
                seed,
                &mut times,
                &mut values,
            );
        }
        times.push(*self.times.last().unwrap());
        values.push(*self.values.last().unwrap());
        DrivingFunction {
            times,
            values,
            kappa: self.kappa,
        }
    }

    /// Pushes the interior points of a `2^depth`-piece bridge, in time order.
    fn fill_bridge(
        &self,
        a: (f64, f64),
        b: (f64, f64),
        depth: u32,
        seed: u64,
        times: &mut Vec<f64>,
        values: &mut Vec<f64>,
    ) {
        if depth == 0 {
            return;
        }
        let mut rng = rng_from_seed(derive_seed(seed, a.0.to_bits()));
        let z: f64 = StandardNormal.sample(&mut rng);
        let mid = (
            0.5 * (a.0 + b.0),
            0.5 * (a.1 + b.1) + (self.kappa * (b.0 - a.0) / 4.0).sqrt() * z,
        );
        self.fill_bridge(a, mid, depth - 1, seed, times, values);
        times.push(mid.0);
        values.push(mid.1);
        self.fill_bridge(mid, b, depth - 1, seed, times, values);
    }
}

pub(crate) fn step_count(horizon: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(LabError::invalid(format!("dt must be positive, got {dt}")));
    }
    if !(horizon >= dt && horizon.is_finite()) {
        return Err(LabError::invalid(format!(
            "horizon {horizon} must be at least dt = {dt}"
        )));
    }
    Ok((horizon / dt).round().max(1.0) as usize)
}

/// `U_t = sqrt(kappa) B_t` sampled every `dt` up to `horizon` (rounded to a
/// whole number of steps), starting from 0.
pub fn sample_driving(kappa: f64, horizon: f64, dt: f64, seed: u64) -> Result<DrivingFunction> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(LabError::invalid(format!("kappa must be nonnegative, got {kappa}")));
    }
    let steps = step_count(horizon, dt)?;
    let sd = (kappa * dt).sqrt();
    let mut rng = rng_from_seed(seed);
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    let mut u = 0.0;
    times.push(0.0);
    values.push(0.0);
    for k in 1..=steps {
        let z: f64 = StandardNormal.sample(&mut rng);
        u += sd * z;
        times.push(k as f64 * dt);
        values.push(u);
    }
    DrivingFunction::new(times, values, kappa)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_kappa_is_identically_zero() {
        let d = sample_driving(0.0, 1.0, 0.01, 3).unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));
        assert_eq!(d.steps(), 100);
    }

    #[test]
    fn same_seed_same_series() {
        assert_eq!(
            sample_driving(6.0, 0.5, 1e-3, 8).unwrap(),
            sample_driving(6.0, 0.5, 1e-3, 8).unwrap()
        );
    }

    #[test]
    fn bisection_inserts_midpoints() {
        let d = sample_driving(6.0, 0.01, 1e-3, 2).unwrap();
        let r = d.bisected(&[0, 4], 9);
        assert_eq!(r.steps(), 12);
        assert_eq!(r.times()[1], 0.5e-3);
        assert_eq!(r.values()[2], d.values()[1]);
        assert_eq!(r, d.bisected(&[4, 0], 9));
        assert!(DrivingFunction::new(r.times().to_vec(), r.values().to_vec(), 6.0).is_ok());
    }

    #[test]
    fn validation() {
        assert!(sample_driving(2.0, 0.5, 0.0, 1).is_err());
        assert!(sample_driving(2.0, 1e-4, 1e-3, 1).is_err());
        assert!(sample_driving(-1.0, 1.0, 1e-3, 1).is_err());
        assert!(DrivingFunction::new(vec![0.0, 0.0], vec![0.0, 0.0], 1.0).is_err());
    }
}
