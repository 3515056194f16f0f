use crate::error::{LabError, Result};
use crate::path::PlanarPath;

/// `max_{s < t} diam(path[s..=t]) / |p_t - p_s|^(1 - delta)` over vertex
/// pairs, skipping pairs at the same point.
///
/// Runs in `O(n^2)` time and `O(n)` memory using
/// `diam[s][t] = max(diam[s][t-1], diam[s+1][t], |p_s - p_t|)`.
pub fn holder_modulus(path: &PlanarPath, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(LabError::invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    let p = path.vertices();
    let n = p.len();
    if n < 3 {
        return Err(LabError::DegenerateInput(format!("need at least 3 vertices, got {n}")));
    }
    let exponent = 1.0 - delta;
    // row[t] = diam(p[s..=t]) for the current s, built from the row of s + 1
    let mut row = vec![0.0f64; n];
    let mut best = 0.0f64;
    for s in (0..n).rev() {
        let mut prev = 0.0f64;
        for t in s + 1..n {
            let chord = p[s].dist(p[t]);
            let d = prev.max(row[t]).max(chord);
            row[t] = d;
            prev = d;
            if chord > 0.0 {
                best = best.max(d / chord.powf(exponent));
            }
        }
    }
    Ok(best)
}

/// Writes `delta, modulus` rows.
pub fn write_modulus_csv<W: std::io::Write>(rows: &[(f64, f64)], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["delta", "modulus"])?;
    for &(d, m) in rows {
        w.write_record([crate::lfpp::fmt(d), crate::lfpp::fmt(m)])?;
    }
    w.flush()?;
    Ok(())
}
