//! Chordal traces by composing vertical-slit maps.
//!
//! Step `j` covers `[t_j, t_{j+1}]` with the driving value held at
//! `u_j = U(t_{j+1})`. Its inverse map
//! `F_j(w) = u_j + (w - u_j) sqrt(1 - 4 dt_j / (w - u_j)^2)`
//! sends the half-plane onto the half-plane minus the segment
//! `[u_j, u_j + 2i sqrt(dt_j)]`, and the trace point after `k` steps is
//! `F_0 o ... o F_{k-2}` applied to the tip of `F_{k-1}`.
//!
//! Composing those prefixes naively costs `O(n^2)`. [`chordal_trace`] groups
//! maps into nested blocks of 4 and stores, for each block, a truncated
//! Laurent expansion of the composed map about the block's hull; a point far
//! enough from a block's hull crosses the whole block in one series
//! evaluation.

use num_complex::Complex64;

use super::driving::DrivingFunction;
use crate::error::{LabError, Result};
use crate::path::{PathKind, PlanarPath};

const BRANCH: usize = 4;
const TERMS: usize = 40;
const SAMPLES: usize = 64;
const TINY: f64 = 1e-12;

#[derive(Clone, Copy)]
struct SlitMap {
    u: f64,
    four_dt: f64,
}

impl SlitMap {
    #[inline]
    fn apply(&self, w: Complex64, step: usize) -> Result<Complex64> {
        let zeta = w - self.u;
        if zeta.norm() < TINY {
            return Err(LabError::NumericalInstability {
                step,
                detail: format!("slit map argument within {TINY:e} of the driving point"),
            });
        }
        Ok(self.u + zeta * (1.0 - self.four_dt / (zeta * zeta)).sqrt())
    }

    fn tip(&self) -> Complex64 {
        Complex64::new(self.u, self.four_dt.sqrt())
    }
}

fn slit_maps(driving: &DrivingFunction) -> Vec<SlitMap> {
    let t = driving.times();
    let v = driving.values();
    (0..driving.steps())
        .map(|j| SlitMap {
            u: v[j + 1],
            four_dt: 4.0 * (t[j + 1] - t[j]),
        })
        .collect()
}

fn assemble(driving: &DrivingFunction, tips: Vec<Complex64>) -> Result<PlanarPath> {
    let mut pts = Vec::with_capacity(tips.len() + 1);
    pts.push(Complex64::new(driving.values()[0], 0.0));
    pts.extend(tips);
    points_to_path(pts, PathKind::SleTrace)
}

/// Polyline through the given points; exact repeats of the previous point
/// are dropped.
pub(crate) fn points_to_path(pts: Vec<Complex64>, kind: PathKind) -> Result<PlanarPath> {
    let mut out: Vec<crate::geom::Point> = Vec::with_capacity(pts.len());
    for z in pts {
        let p = z.into();
        if out.last() != Some(&p) {
            out.push(p);
        }
    }
    PlanarPath::from_points(out, kind)
}

/// Reference implementation: every trace point composes its full prefix of
/// maps directly. Quadratic in the step count.
pub fn chordal_trace_naive(driving: &DrivingFunction) -> Result<PlanarPath> {
    let maps = slit_maps(driving);
    let mut tips = Vec::with_capacity(maps.len());
    for k in 0..maps.len() {
        let mut w = maps[k].tip();
        for j in (0..k).rev() {
            w = maps[j].apply(w, j)?;
        }
        tips.push(w);
    }
    assemble(driving, tips)
}

/// Trace of the chordal Loewner chain driven by `driving`, one point per step.
pub fn chordal_trace(driving: &DrivingFunction) -> Result<PlanarPath> {
    let zipper = BlockZipper::new(slit_maps(driving))?;
    let tips = (0..zipper.maps.len())
        .map(|k| zipper.apply_prefix(k, zipper.maps[k].tip()))
        .collect::<Result<Vec<_>>>()?;
    assemble(driving, tips)
}

/// Chordal trace whose consecutive points are at most `max_step` apart
/// wherever the discretization allows it.
///
/// Steps whose trace increment exceeds `max_step` are bisected with Brownian
/// bridge midpoints (drawn from `seed`) and the trace is recomputed, for at
/// most `max_rounds` rounds. Returns the trace and the refined driving
/// function it was computed from.
pub fn chordal_trace_refined(
    driving: &DrivingFunction,
    max_step: f64,
    max_rounds: usize,
    seed: u64,
) -> Result<(PlanarPath, DrivingFunction)> {
    if !(max_step > 0.0) {
        return Err(LabError::invalid(format!("max_step must be positive, got {max_step}")));
    }
    let mut current = driving.clone();
    let mut rounds = 0;
    loop {
        let maps = slit_maps(&current);
        let zipper = BlockZipper::new(maps)?;
        let mut pts = Vec::with_capacity(zipper.maps.len() + 1);
        pts.push(Complex64::new(current.values()[0], 0.0));
        for k in 0..zipper.maps.len() {
            pts.push(zipper.apply_prefix(k, zipper.maps[k].tip())?);
        }
        // a step of length L is split into about (L / max_step)^2 pieces,
        // the count for a Brownian-scale increment
        let plan: Vec<(usize, u32)> = pts
            .windows(2)
            .enumerate()
            .filter_map(|(i, w)| {
                let ratio = (w[1] - w[0]).norm() / max_step;
                (ratio > 1.0).then(|| (i, ((2.0 * ratio.log2()).ceil() as u32).clamp(1, 8)))
            })
            .collect();
        if plan.is_empty() || rounds == max_rounds {
            return Ok((points_to_path(pts, PathKind::SleTrace)?, current));
        }
        current = current.subdivided(&plan, seed);
        rounds += 1;
    }
}

/// Laurent data for the composition of one block of maps:
/// `Phi(w) = w + sum_m coef[m] (radius / (w - center))^(m+1)` for
/// `|w - center| >= radius`.
struct Block {
    center: f64,
    radius: f64,
    coef: [Complex64; TERMS],
}

/// Real interval outside of which the composed map of `maps` is analytic:
/// the points of the real line that some slit of the block eventually hits.
/// Its ends follow the forward maps `g_j(x) = u_j +- sqrt((x - u_j)^2 + 4 dt_j)`.
fn shadow_interval(maps: &[SlitMap]) -> (f64, f64) {
    let half = |m: &SlitMap| m.four_dt.sqrt();
    let (mut lo, mut hi) = (maps[0].u - half(&maps[0]), maps[0].u + half(&maps[0]));
    for m in &maps[1..] {
        let g_hi = m.u + ((hi - m.u).powi(2) + m.four_dt).sqrt();
        let g_lo = m.u - ((lo - m.u).powi(2) + m.four_dt).sqrt();
        hi = if hi >= m.u { g_hi } else { m.u + half(m) }.max(m.u + half(m));
        lo = if lo <= m.u { g_lo } else { m.u - half(m) }.min(m.u - half(m));
    }
    (lo, hi)
}

struct BlockZipper {
    maps: Vec<SlitMap>,
    // levels[l][i] composes maps [i * 4^(l+1), (i + 1) * 4^(l+1))
    levels: Vec<Vec<Block>>,
}

impl BlockZipper {
    fn new(maps: Vec<SlitMap>) -> Result<Self> {
        let mut z = BlockZipper {
            maps,
            levels: Vec::new(),
        };
        let mut size = BRANCH;
        while size <= z.maps.len() {
            let count = z.maps.len() / size;
            let mut level = Vec::with_capacity(count);
            for i in 0..count {
                level.push(z.build_block(i * size, size)?);
            }
            z.levels.push(level);
            size *= BRANCH;
        }
        Ok(z)
    }

    fn build_block(&self, start: usize, size: usize) -> Result<Block> {
        let (lo, hi) = shadow_interval(&self.maps[start..start + size]);
        let center = (hi + lo) / 2.0;
        let radius = hi - lo;
        let mut coef = [Complex64::new(0.0, 0.0); TERMS];
        for k in 0..SAMPLES {
            let theta = std::f64::consts::TAU * (k as f64 + 0.5) / SAMPLES as f64;
            let e = Complex64::from_polar(1.0, theta);
            let w = center + radius * e;
            let f = self.apply_range(start, start + size, w)? - w;
            // (radius / (w - center))^m = e^{-i m theta}
            let mut em = e;
            for c in coef.iter_mut() {
                *c += f * em;
                em *= e;
            }
        }
        for c in coef.iter_mut() {
            *c /= SAMPLES as f64;
        }
        Ok(Block { center, radius, coef })
    }

    /// `F_{start} o ... o F_{end-1}` applied to `w`.
    fn apply_range(&self, start: usize, end: usize, mut w: Complex64) -> Result<Complex64> {
        let mut pos = end;
        while pos > start {
            // largest aligned block ending at pos and fitting in [start, pos)
            let mut level = 0;
            let mut size = 1;
            while level < self.levels.len() && pos % (size * BRANCH) == 0 && pos - size * BRANCH >= start {
                size *= BRANCH;
                level += 1;
            }
            w = self.apply_block(level, pos / size - 1, w)?;
            pos -= size;
        }
        Ok(w)
    }

    fn apply_block(&self, level: usize, index: usize, w: Complex64) -> Result<Complex64> {
        if level == 0 {
            return self.maps[index].apply(w, index);
        }
        let b = &self.levels[level - 1][index];
        let d = w - b.center;
        if d.norm() >= b.radius {
            let x = b.radius / d;
            let mut acc = Complex64::new(0.0, 0.0);
            for c in b.coef.iter().rev() {
                acc = (acc + c) * x;
            }
            return Ok(w + acc);
        }
        let mut w = w;
        for child in (0..BRANCH).rev() {
            w = self.apply_block(level - 1, index * BRANCH + child, w)?;
        }
        Ok(w)
    }

    /// Trace point after `k + 1` steps, given the tip of map `k`.
    fn apply_prefix(&self, k: usize, tip: Complex64) -> Result<Complex64> {
        self.apply_range(0, k, tip)
    }
}
