//! One function per experiment. Replicas compute their files in memory; the
//! caller writes them.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::config::{Experiment, ExperimentConfig};
use crate::analysis::{
    box_counting_dimension, holder_modulus, shadow_sum_estimate, whitney_decomposition, write_modulus_csv, MIN_WALKERS,
};
use crate::crossings::{
    geodesic_crossing_experiment, ks_two_sample, scale_scan, sle_trace_for_annuli, trace_crossings, CrossingFrequency,
    CrossingReport, GEODESIC_CROSSING_LIMIT,
};
use crate::error::Result;
use crate::geom::{Point, Rect};
use crate::grf::{field_to_bytes, good_scale_report, lqg_measure, sample_whole_plane_gff, GridField};
use crate::lfpp::{fmt, geodesic, metric_ball, write_ball_csv, write_path_csv, MetricGraph, ShortestPathTree};
use crate::loewner::write_trace_csv;
use crate::path::{PathKind, PlanarPath};
use crate::rng::derive_stream;

pub(crate) type Files = Vec<(String, Vec<u8>)>;

/// Number of geodesic branches drawn in a ball's fan.
pub const FAN_BRANCHES: usize = 64;
/// Hölder exponents reported for geodesics.
const HOLDER_DELTAS: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];

/// Runs every replica of `cfg` and the aggregation step. Returns the files
/// and the wall-clock seconds of each replica.
pub(crate) fn execute(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<(Files, Vec<f64>)> {
    match cfg.experiment {
        Experiment::Field => simple(seeds, |i, rs| field_replica(cfg, i, rs)),
        Experiment::Geodesic => simple(seeds, |i, rs| geodesic_replica(cfg, i, rs)),
        Experiment::Ball => simple(seeds, |i, rs| ball_replica(cfg, i, rs)),
        Experiment::Sle => sle(cfg, seeds),
        Experiment::Crossings => crossings(cfg, seeds),
        Experiment::Scales => scales(cfg, seeds),
        Experiment::Dimension => dimension(cfg, seeds),
        Experiment::Removability => removability(cfg, seeds),
        Experiment::Compare => compare(cfg, seeds),
    }
}

fn replicas<T: Send>(
    seeds: &[u64],
    f: impl Fn(usize, u64) -> Result<(Files, T)> + Sync,
) -> Result<(Files, Vec<T>, Vec<f64>)> {
    let results = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &rs)| {
            let t = Instant::now();
            f(i, rs).map(|(files, data)| (files, data, t.elapsed().as_secs_f64()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut files = Vec::new();
    let mut data = Vec::with_capacity(results.len());
    let mut seconds = Vec::with_capacity(results.len());
    for (f, d, s) in results {
        files.extend(f);
        data.push(d);
        seconds.push(s);
    }
    Ok((files, data, seconds))
}

fn simple(seeds: &[u64], f: impl Fn(usize, u64) -> Result<Files> + Sync) -> Result<(Files, Vec<f64>)> {
    let (files, _, seconds) = replicas(seeds, |i, rs| f(i, rs).map(|files| (files, ())))?;
    Ok((files, seconds))
}

fn name(i: usize, what: &str) -> String {
    format!("r{i:03}_{what}")
}

fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> Vec<u8> {
    let mut out = Vec::new();
    write(&mut out).expect("writing CSV into memory cannot fail");
    out
}

fn json_bytes(value: &impl Serialize) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("summaries serialize");
    out.push(b'\n');
    out
}

fn sample_field(cfg: &ExperimentConfig, rs: u64) -> Result<GridField> {
    sample_whole_plane_gff(cfg.grid_size, cfg.spacing, derive_stream(rs, "field"))
}

fn sample_graph(cfg: &ExperimentConfig, rs: u64) -> Result<MetricGraph> {
    MetricGraph::new(sample_field(cfg, rs)?, cfg.xi)
}

/// Geodesic between a random far-apart vertex pair.
fn sample_geodesic(graph: &MetricGraph, rs: u64) -> Result<PlanarPath> {
    let (a, b) = crate::crossings::far_vertex_pairs(graph, 1, derive_stream(rs, "geodesic"))[0];
    geodesic(graph, a, b)
}

fn field_replica(cfg: &ExperimentConfig, i: usize, rs: u64) -> Result<Files> {
    let field = sample_field(cfg, rs)?;
    let v = field.values();
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let variance = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64;
    let unit = Rect::from_corners(-0.5, -0.5, 0.5, 0.5);
    let summary = json!({
        "grid_size": field.size(),
        "spacing": field.spacing(),
        "normalization": field.normalization_note(),
        "mean": mean,
        "variance": variance,
        "min": v.iter().copied().fold(f64::INFINITY, f64::min),
        "max": v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        "gamma": cfg.gamma,
        "lqg_measure_unit_square": lqg_measure(&field, cfg.gamma, unit)?,
    });
    Ok(vec![
        (name(i, "field.bin"), field_to_bytes(&field)),
        (name(i, "field.json"), json_bytes(&summary)),
    ])
}

fn geodesic_replica(cfg: &ExperimentConfig, i: usize, rs: u64) -> Result<Files> {
    let graph = sample_graph(cfg, rs)?;
    let path = sample_geodesic(&graph, rs)?;
    let rows = HOLDER_DELTAS
        .iter()
        .map(|&d| Ok((d, holder_modulus(&path, d)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(vec![
        (name(i, "geodesic.csv"), csv_bytes(|w| write_path_csv(&path, w))),
        (name(i, "holder.csv"), csv_bytes(|w| write_modulus_csv(&rows, w))),
    ])
}

/// Metric ball about the central vertex, of half the distance to the grid
/// boundary, with the geodesics from [`FAN_BRANCHES`] boundary points of the
/// ball back to the center.
fn ball_replica(cfg: &ExperimentConfig, i: usize, rs: u64) -> Result<Files> {
    let graph = sample_graph(cfg, rs)?;
    let n = graph.size();
    let center = graph.vertex(n / 2, n / 2);
    let tree = ShortestPathTree::new(&graph, center)?;
    let to_edge = (0..n)
        .flat_map(|k| {
            [
                graph.vertex(k, 0),
                graph.vertex(k, n - 1),
                graph.vertex(0, k),
                graph.vertex(n - 1, k),
            ]
        })
        .map(|v| tree.dist[v])
        .fold(f64::INFINITY, f64::min);
    let ball = metric_ball(&graph, center, to_edge / 2.0)?;

    let c = graph.position(center);
    let mut rim: Vec<(f64, usize)> = ball
        .boundary
        .iter()
        .map(|&v| {
            let p = graph.position(v) - c;
            (p.y.atan2(p.x), v)
        })
        .collect();
    rim.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let branches = FAN_BRANCHES.min(rim.len());
    let mut fan = csv::Writer::from_writer(Vec::new());
    fan.write_record(["branch", "index", "x", "y"])
        .expect("in-memory write");
    for b in 0..branches {
        let v = rim[b * rim.len() / branches].1;
        for (k, u) in tree.branch(v).into_iter().enumerate() {
            let p = graph.position(u);
            fan.write_record([b.to_string(), k.to_string(), fmt(p.x), fmt(p.y)])
                .expect("in-memory write");
        }
    }
    let fan = fan.into_inner().expect("in-memory write");
    Ok(vec![
        (name(i, "ball.csv"), csv_bytes(|w| write_ball_csv(&graph, &ball, w))),
        (name(i, "fan.csv"), fan),
    ])
}

#[derive(Serialize)]
struct FrequencySummary {
    epsilon: f64,
    r_in: f64,
    paths: usize,
    threshold: usize,
    exceed: usize,
    frequency: f64,
    wilson_95: (f64, f64),
    max_counts: Vec<usize>,
}

impl FrequencySummary {
    fn new(f: &CrossingFrequency) -> Self {
        FrequencySummary {
            epsilon: f.epsilon,
            r_in: f.epsilon.powf(f.alpha),
            paths: f.reports.len(),
            threshold: f.threshold,
            exceed: f.exceed,
            frequency: f.frequency,
            wilson_95: f.interval,
            max_counts: f.max_counts(),
        }
    }
}

/// Pools one report per replica into one batch per epsilon.
fn pool(cfg: &ExperimentConfig, per_replica: Vec<Vec<CrossingReport>>) -> Result<Vec<CrossingFrequency>> {
    (0..cfg.epsilon_list.len())
        .map(|j| {
            let reports = per_replica.iter().map(|r| r[j].clone()).collect();
            CrossingFrequency::from_reports(cfg.epsilon_list[j], cfg.alpha, GEODESIC_CROSSING_LIMIT, reports)
        })
        .collect()
}

fn sle_reports(cfg: &ExperimentConfig, rs: u64) -> Result<(PlanarPath, Vec<f64>, Vec<CrossingReport>)> {
    let eps_min = cfg.epsilon_list.iter().copied().fold(f64::INFINITY, f64::min);
    let (trace, driving) = sle_trace_for_annuli(cfg.kappa, cfg.dt, cfg.horizon, eps_min.powf(cfg.alpha), rs)?;
    let reports = cfg
        .epsilon_list
        .iter()
        .map(|&eps| trace_crossings(&trace, eps, cfg.alpha))
        .collect::<Result<_>>()?;
    Ok((trace, driving.times().to_vec(), reports))
}

fn geodesic_reports(cfg: &ExperimentConfig, rs: u64) -> Result<Vec<CrossingReport>> {
    let graph = sample_graph(cfg, rs)?;
    let batches = geodesic_crossing_experiment(&graph, 1, &cfg.epsilon_list, cfg.alpha, derive_stream(rs, "geodesic"))?;
    Ok(batches.into_iter().map(|mut b| b.reports.remove(0)).collect())
}

fn report_files(i: usize, reports: &[CrossingReport]) -> Files {
    reports
        .iter()
        .enumerate()
        .map(|(j, r)| (name(i, &format!("crossings_eps{j}.csv")), csv_bytes(|w| r.write_csv(w))))
        .collect()
}

fn batch_files(prefix: &str, batches: &[CrossingFrequency]) -> Files {
    batches
        .iter()
        .enumerate()
        .map(|(j, b)| (format!("{prefix}_eps{j}.csv"), csv_bytes(|w| b.write_csv(w))))
        .collect()
}

fn sle(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<(Files, Vec<f64>)> {
    let (mut files, reports, seconds) = replicas(seeds, |i, rs| {
        let (trace, times, reports) = sle_reports(cfg, rs)?;
        let mut files = vec![(name(i, "trace.csv"), csv_bytes(|w| write_trace_csv(&trace, &times, w)))];
        files.extend(report_files(i, &reports));
        Ok((files, reports))
    })?;
    let batches = pool(cfg, reports)?;
    files.extend(batch_files("sle", &batches));
    let summary: Vec<_> = batches.iter().map(FrequencySummary::new).collect();
    files.push(("sle_summary.json".into(), json_bytes(&summary)));
    Ok((files, seconds))
}

fn crossings(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<(Files, Vec<f64>)> {
    let (mut files, reports, seconds) = replicas(seeds, |i, rs| {
        let reports = geodesic_reports(cfg, rs)?;
        Ok((report_files(i, &reports), reports))
    })?;
    let batches = pool(cfg, reports)?;
    files.extend(batch_files("crossings", &batches));
    let summary: Vec<_> = batches.iter().map(FrequencySummary::new).collect();
    files.push(("crossings_summary.json".into(), json_bytes(&summary)));
    Ok((files, seconds))
}

/// Geodesic and SLE batches at the same annuli, side by side.
fn compare(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<(Files, Vec<f64>)> {
    let (mut files, pairs, seconds) = replicas(seeds, |_, rs| {
        let geo = geodesic_reports(cfg, rs)?;
        let (_, _, sle) = sle_reports(cfg, derive_stream(rs, "sle"))?;
        Ok((Vec::new(), (geo, sle)))
    })?;
    let (geo, sle): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    let geo = pool(cfg, geo)?;
    let sle = pool(cfg, sle)?;
    files.extend(batch_files("compare_geodesic", &geo));
    files.extend(batch_files("compare_sle", &sle));

    let mut table = csv::Writer::from_writer(Vec::new());
    let header = [
        "epsilon",
        "kind",
        "paths",
        "exceed",
        "frequency",
        "wilson_lo",
        "wilson_hi",
        "mean_max_count",
        "ks_statistic",
        "ks_p_value",
    ];
    table.write_record(header).expect("in-memory write");
    for (g, s) in geo.iter().zip(&sle) {
        let as_f64 = |b: &CrossingFrequency| b.max_counts().iter().map(|&c| c as f64).collect::<Vec<_>>();
        let (d, p) = ks_two_sample(&as_f64(g), &as_f64(s))?;
        for (kind, b) in [("geodesic", g), ("sle", s)] {
            let counts = b.max_counts();
            let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
            table
                .write_record([
                    fmt(b.epsilon),
                    kind.to_string(),
                    counts.len().to_string(),
                    b.exceed.to_string(),
                    fmt(b.frequency),
                    fmt(b.interval.0),
                    fmt(b.interval.1),
                    fmt(mean),
                    fmt(d),
                    fmt(p),
                ])
                .expect("in-memory write");
        }
    }
    files.push((
        "compare_summary.csv".into(),
        table.into_inner().expect("in-memory write"),
    ));
    Ok((files, seconds))
}

/// Annulus scan and M-good test about the lattice center. The good-scale
/// radii are half the scan radii so their disks stay on the lattice.
fn scales(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<(Files, Vec<f64>)> {
    let (mut files, rows, seconds) = replicas(seeds, |i, rs| {
        let graph = sample_graph(cfg, rs)?;
        let z = graph.field().center();
        let scan = scale_scan(&graph, z, cfg.scan_base_radius(), cfg.k, cfg.c)?;
        let good = good_scale_report(graph.field(), z, cfg.half_width(), cfg.k, cfg.m)?;
        let row = json!({
            "replica": i,
            "n_kc": scan.n_kc,
            "s1_below_s2": scan.s1_below_s2,
            "ratios": scan.per_scale.iter().map(|e| e.ratio()).collect::<Vec<_>>(),
            "m_good": good.per_scale_good,
            "fraction_m_good": good.fraction_good,
        });
        Ok((
            vec![(name(i, "scales.csv"), csv_bytes(|w| scan.write_csv(w)))],
            (scan.n_kc, good.fraction_good, row),
        ))
    })?;
    let total = (cfg.k * rows.len()) as f64;
    let summary = json!({
        "K": cfg.k,
        "c": cfg.c,
        "M": cfg.m,
        "base_radius": cfg.scan_base_radius(),
        "fraction_l1_within_c_l2": rows.iter().map(|r| r.0).sum::<usize>() as f64 / total,
        "mean_fraction_m_good": rows.iter().map(|r| r.1).sum::<f64>() / rows.len() as f64,
        "replicas": rows.into_iter().map(|r| r.2).collect::<Vec<_>>(),
    });
    files.push(("scales_summary.json".into(), json_bytes(&summary)));
    Ok((files, seconds))
}

/// Dyadic box sizes `1, 1/2, ...` down to the last one above two lattice
/// steps.
pub fn dimension_scales(spacing: f64) -> Vec<f64> {
    (0..)
        .map(|j| 0.5f64.powi(j))
        .take_while(|&s| s > 2.0 * spacing)
        .collect()
}

/// Box counting of a geodesic and of the straight segment between its
/// endpoints, sampled at the lattice spacing.
fn dimension(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<(Files, Vec<f64>)> {
    let scales = dimension_scales(cfg.spacing);
    let (mut files, slopes, seconds) = replicas(seeds, |i, rs| {
        let graph = sample_graph(cfg, rs)?;
        let path = sample_geodesic(&graph, rs)?;
        let boxes = box_counting_dimension(&path, &scales)?;
        let control =
            PlanarPath::from_points(vec![path.start(), path.end()], PathKind::Synthetic)?.densified(cfg.spacing);
        let control = box_counting_dimension(&control, &scales)?;
        Ok((
            vec![(name(i, "boxcount.csv"), csv_bytes(|w| boxes.write_csv(w)))],
            (boxes.slope, control.slope),
        ))
    })?;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (geo, ctl): (Vec<f64>, Vec<f64>) = slopes.into_iter().unzip();
    let summary = json!({
        "scales": scales,
        "geodesic_slopes": geo,
        "mean_geodesic_slope": mean(&geo),
        "segment_slopes": ctl,
        "mean_segment_slope": mean(&ctl),
    });
    files.push(("dimension_summary.json".into(), json_bytes(&summary)));
    Ok((files, seconds))
}

/// Square around the path's bounding box, 1.25 times its longer side.
pub fn whitney_root(path: &PlanarPath) -> Rect {
    let b = path.bounding_box();
    let half = 0.625 * b.width().max(b.height());
    let c = b.center();
    Rect::new(c - Point::new(half, half), c + Point::new(half, half))
}

/// Deepest level whose squares are still at least a quarter lattice step.
pub fn whitney_depth(root_side: f64, spacing: f64) -> u32 {
    let levels = (root_side / (spacing / 4.0)).log2().floor();
    levels.clamp(0.0, 40.0) as u32
}

fn removability(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<(Files, Vec<f64>)> {
    let (mut files, rows, seconds) = replicas(seeds, |i, rs| {
        let graph = sample_graph(cfg, rs)?;
        let path = sample_geodesic(&graph, rs)?;
        let root = whitney_root(&path);
        let depth = whitney_depth(root.width(), cfg.spacing);
        let wd = whitney_decomposition(&path, &root, depth)?;
        let in_band = wd
            .cubes
            .iter()
            .filter(|c| {
                let d = c.dist_to_path(&path);
                d >= c.side && d <= 8.0 * c.side
            })
            .count();
        let shadows = shadow_sum_estimate(&path, &wd.cubes, MIN_WALKERS, derive_stream(rs, "shadow"))?;
        let per_depth = shadows.per_depth();
        let row = json!({
            "replica": i,
            "max_depth": depth,
            "cubes": wd.cubes.len(),
            "shortfall": wd.shortfall.len(),
            "band_fraction": in_band as f64 / wd.cubes.len().max(1) as f64,
            "shadow_total": shadows.total,
            "per_depth_sum_diam_sq": per_depth.iter().map(|d| d.sum_diam_sq).collect::<Vec<_>>(),
        });
        Ok((vec![(name(i, "shadow.csv"), csv_bytes(|w| shadows.write_csv(w)))], row))
    })?;
    let summary = json!({
        "walkers_per_cube": MIN_WALKERS,
        "harmonic_measure_proxy": true,
        "replicas": rows,
    });
    files.push(("removability_summary.json".into(), json_bytes(&summary)));
    Ok((files, seconds))
}
