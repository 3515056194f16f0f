use std::fs;
use std::path::Path;

use lqglab::grf::GridField;
use lqglab::harness::{
    render, render_png, rerun, run, sha256_hex, Experiment, ExperimentConfig, RenderStyle, RunManifest, MANIFEST_NAME,
    MARKER,
};
use lqglab::lfpp::{metric_ball, write_ball_csv, MetricGraph};
use lqglab::LabError;

fn config(experiment: Experiment, out: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(experiment);
    cfg.output_dir = out.to_path_buf();
    cfg
}

fn decode(png_bytes: &[u8]) -> (usize, usize, Vec<u8>) {
    let mut reader = png::Decoder::new(std::io::Cursor::new(png_bytes)).read_info().unwrap();
    let mut buf = vec![0; reader.output_buffer_size().unwrap()];
    let info = reader.next_frame(&mut buf).unwrap();
    assert_eq!(info.color_type, png::ColorType::Rgb);
    buf.truncate(info.buffer_size());
    (info.width as usize, info.height as usize, buf)
}

/// Pixel `(x, y)` counted from the bottom-left corner.
fn pixel(img: &(usize, usize, Vec<u8>), x: usize, y: usize) -> [u8; 3] {
    let (w, h, rgb) = img;
    let k = 3 * ((h - 1 - y) * w + x);
    [rgb[k], rgb[k + 1], rgb[k + 2]]
}

#[test]
fn field_run_is_recorded_and_reproduced() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(Experiment::Field, &dir.path().join("a"));
    cfg.grid_size = 64;
    cfg.spacing = 4.0 / 64.0;
    cfg.seed = 42;
    let first = run(&cfg).unwrap();
    let names: Vec<&str> = first.outputs.iter().map(|o| o.name.as_str()).collect();
    assert_eq!(names, ["r000_field.bin", "r000_field.json"]);
    for o in &first.outputs {
        let bytes = fs::read(cfg.output_dir.join(&o.name)).unwrap();
        assert_eq!(sha256_hex(&bytes), o.sha256);
        assert_eq!(bytes.len() as u64, o.bytes);
    }
    let manifest = cfg.output_dir.join(MANIFEST_NAME);
    assert_eq!(RunManifest::load(&manifest).unwrap().outputs, first.outputs);
    let again = rerun(&manifest, Some(&dir.path().join("b"))).unwrap();
    assert!(first.differing_outputs(&again).is_empty());
    let bin = |d: &str| fs::read(dir.path().join(d).join("r000_field.bin")).unwrap();
    assert_eq!(bin("a"), bin("b"));
}

#[test]
fn compare_writes_both_batches_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(Experiment::Compare, dir.path());
    cfg.replicas = 50;
    cfg.epsilon_list = vec![0.5, 0.25];
    let m = run(&cfg).unwrap();
    let names: Vec<&str> = m.outputs.iter().map(|o| o.name.as_str()).collect();
    for j in 0..2 {
        for kind in ["geodesic", "sle"] {
            let name = format!("compare_{kind}_eps{j}.csv");
            assert!(names.contains(&name.as_str()), "{names:?}");
            let text = fs::read_to_string(dir.path().join(&name)).unwrap();
            assert_eq!(text.lines().count(), 51, "{name}");
        }
    }
    let mut summary = csv::Reader::from_path(dir.path().join("compare_summary.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = summary.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert_eq!(&r[2], "50");
    }
    assert_eq!(m.replica_seeds.len(), 50);
}

#[test]
fn invalid_gamma_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let mut cfg = config(Experiment::Field, &out);
    cfg.gamma = 3.0;
    let err = run(&cfg).unwrap_err();
    assert!(
        matches!(err, LabError::Validation { ref field, .. } if field == "gamma"),
        "{err}"
    );
    assert_eq!(err.exit_code(), 2);
    assert!(!out.exists());
}

#[test]
fn failed_write_removes_earlier_outputs() {
    let dir = tempfile::tempdir().unwrap();
    // a directory where the second output file should go
    fs::create_dir(dir.path().join("r000_field.json")).unwrap();
    let mut cfg = config(Experiment::Field, dir.path());
    cfg.grid_size = 32;
    cfg.spacing = 4.0 / 32.0;
    assert!(run(&cfg).is_err());
    assert!(!dir.path().join("r000_field.bin").exists());
    assert!(!dir.path().join(MANIFEST_NAME).exists());
}

#[test]
fn rendering_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(Experiment::Ball, dir.path());
    cfg.grid_size = 64;
    cfg.spacing = 4.0 / 64.0;
    run(&cfg).unwrap();
    let input = dir.path().join("r000_ball.csv");
    let a = render_png(&input, RenderStyle::Ball).unwrap();
    let out = render(&input, RenderStyle::Ball).unwrap();
    assert_eq!(out, dir.path().join("r000_ball.png"));
    assert_eq!(fs::read(out).unwrap(), a);
}

#[test]
fn flat_field_ball_renders_as_a_diamond() {
    let dir = tempfile::tempdir().unwrap();
    let n = 33;
    let g = MetricGraph::new(GridField::constant(n, 1.0, 0.0).unwrap(), 0.41).unwrap();
    let center = g.vertex(16, 16);
    // every edge has the same length, so the ball is a lattice diamond
    let edge = g.neighbors(center)[0].1;
    let ball = metric_ball(&g, center, 10.5 * edge).unwrap();
    let input = dir.path().join("flat_ball.csv");
    write_ball_csv(&g, &ball, fs::File::create(&input).unwrap()).unwrap();
    let img = decode(&render_png(&input, RenderStyle::Ball).unwrap());
    // the image spans the ball's 21 x 21 bounding box
    let scale = img.0 / 21;
    assert_eq!((img.0, img.1), (21 * scale, 21 * scale));
    for iy in 0..21i64 {
        for ix in 0..21i64 {
            let inside = (ix - 10).abs() + (iy - 10).abs() <= 10;
            let p = pixel(&img, ix as usize * scale + scale / 2, iy as usize * scale + scale / 2);
            assert_eq!(p != [255, 255, 255], inside, "cell ({ix}, {iy})");
        }
    }
}

#[test]
fn crossings_marker_sits_on_the_first_maximal_row() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(Experiment::Crossings, dir.path());
    cfg.epsilon_list = vec![0.25];
    cfg.seed = 3;
    run(&cfg).unwrap();
    let input = dir.path().join("r000_crossings_eps0.csv");
    let mut rows: Vec<(f64, f64, u64)> = Vec::new();
    for r in csv::Reader::from_path(&input).unwrap().records() {
        let r = r.unwrap();
        rows.push((r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap()));
    }
    let best = rows.iter().map(|r| r.2).max().unwrap();
    let z = rows.iter().find(|r| r.2 == best).unwrap();
    let axis = |pick: fn(&(f64, f64, u64)) -> f64| {
        let mut v: Vec<f64> = rows.iter().map(pick).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let (xs, ys) = (axis(|r| r.0), axis(|r| r.1));
    let ix = xs.iter().position(|&x| x == z.0).unwrap();
    let iy = ys.iter().position(|&y| y == z.1).unwrap();
    let img = decode(&render_png(&input, RenderStyle::Crossings).unwrap());
    let scale = img.0 / xs.len();
    for dy in 0..scale {
        for dx in 0..scale {
            assert_eq!(pixel(&img, ix * scale + dx, iy * scale + dy), MARKER);
        }
    }
}

#[test]
fn replica_outputs_do_not_depend_on_the_batch_size() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(Experiment::Geodesic, &dir.path().join("one"));
    cfg.grid_size = 64;
    cfg.spacing = 4.0 / 64.0;
    cfg.seed = 5;
    let one = run(&cfg).unwrap();
    cfg.replicas = 3;
    cfg.output_dir = dir.path().join("three");
    let three = run(&cfg).unwrap();
    assert_eq!(one.replica_seeds[0], three.replica_seeds[0]);
    for o in &one.outputs {
        let other = three.outputs.iter().find(|t| t.name == o.name).unwrap();
        assert_eq!(o.sha256, other.sha256, "{}", o.name);
    }
}
