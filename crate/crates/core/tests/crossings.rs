use std::f64::consts::TAU;

use lqglab::crossings::{count_crossings, geodesic_crossing_experiment, max_scan_depth, scale_scan, Annulus};
use lqglab::grf::{sample_whole_plane_gff, GridField};
use lqglab::lfpp::MetricGraph;
use lqglab::path::{PathKind, PlanarPath};
use lqglab::Point;
use proptest::prelude::*;

fn polyline(pts: Vec<Point>, step: f64) -> PlanarPath {
    PlanarPath::from_points(pts, PathKind::Synthetic)
        .unwrap()
        .densified(step)
}

/// Logarithmic spiral from radius `r0` to `r1` over `turns` full turns.
fn spiral(r0: f64, r1: f64, turns: f64) -> Vec<Point> {
    let n = 2000;
    (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let r = r0 * (r1 / r0).powf(t);
            let th = TAU * turns * t;
            Point::new(r * th.cos(), r * th.sin())
        })
        .collect()
}

#[test]
fn hand_built_paths_have_known_counts() {
    let ann = Annulus::new(Point::new(0.0, 0.0), 0.5, 1.0).unwrap();
    // two turns inward then two turns back out
    let mut pts = spiral(1.5, 0.2, 2.0);
    pts.extend(spiral(0.2, 1.5, 2.0).into_iter().skip(1));
    assert_eq!(count_crossings(&polyline(pts, 0.01), &ann).unwrap(), 2);
    // in, out, in, out again along four rays
    let zigzag = [(1.5, 0.0), (0.1, 0.1), (0.0, 1.5), (-0.1, -0.1), (0.0, -1.5)]
        .iter()
        .map(|&(x, y)| Point::new(x, y))
        .collect();
    assert_eq!(count_crossings(&polyline(zigzag, 0.01), &ann).unwrap(), 4);
    // winding inside the annulus without reaching the hole
    let mut pts = spiral(1.5, 0.6, 2.0);
    pts.extend(spiral(0.6, 1.5, 2.0).into_iter().skip(1));
    assert_eq!(count_crossings(&polyline(pts, 0.01), &ann).unwrap(), 0);
}

#[test]
fn coarse_segments_near_the_annulus_are_rejected() {
    let ann = Annulus::new(Point::new(0.0, 0.0), 0.4, 1.0).unwrap();
    let p = PlanarPath::from_points(vec![Point::new(-2.0, 0.0), Point::new(2.0, 0.0)], PathKind::Synthetic).unwrap();
    assert!(matches!(
        count_crossings(&p, &ann),
        Err(lqglab::LabError::Resolution(_))
    ));
}

fn flat_graph(n: usize, spacing: f64) -> MetricGraph {
    MetricGraph::new(GridField::constant(n, spacing, 0.0).unwrap(), 0.41).unwrap()
}

#[test]
fn flat_field_geodesics_stay_within_the_limit() {
    let g = flat_graph(128, 1.0 / 32.0);
    let batches = geodesic_crossing_experiment(&g, 20, &[0.5, 0.25], 1.2, 3).unwrap();
    for b in &batches {
        assert!(b.max_counts().iter().all(|&m| m <= 4), "{:?}", b.max_counts());
    }
}

#[test]
fn flat_field_scan_has_every_scale_good() {
    let g = flat_graph(256, 1.0 / 64.0);
    let k = max_scan_depth(2.0, g.spacing());
    assert_eq!(k, 3);
    let scan = scale_scan(&g, g.field().center(), 2.0, k, 16.0).unwrap();
    assert_eq!(scan.n_kc, k);
}

#[test]
fn added_constant_leaves_scan_ratios_unchanged() {
    let f = sample_whole_plane_gff(256, 1.0 / 64.0, 19).unwrap();
    let g = MetricGraph::new(f.clone(), 0.41).unwrap();
    let h = MetricGraph::new(f.plus_constant(-1.3), 0.41).unwrap();
    let z = f.center();
    let a = scale_scan(&g, z, 2.0, 3, 16.0).unwrap();
    let b = scale_scan(&h, z, 2.0, 3, 16.0).unwrap();
    assert_eq!(a.n_kc, b.n_kc);
    assert_eq!(a.s1_below_s2, b.s1_below_s2);
    for (x, y) in a.per_scale.iter().zip(&b.per_scale) {
        assert!((x.ratio() - y.ratio()).abs() <= 1e-12 * x.ratio());
    }
}

#[test]
fn geodesic_batches_are_deterministic() {
    let f = sample_whole_plane_gff(64, 1.0 / 16.0, 2).unwrap();
    let g = MetricGraph::new(f, 0.41).unwrap();
    let a = geodesic_crossing_experiment(&g, 4, &[0.5], 1.2, 77).unwrap();
    let b = geodesic_crossing_experiment(&g, 4, &[0.5], 1.2, 77).unwrap();
    assert_eq!(a, b);
}

fn random_path() -> impl Strategy<Value = PlanarPath> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 2..12)
        .prop_map(|v| polyline(v.into_iter().map(|(x, y)| Point::new(x, y)).collect(), 0.02))
}

fn random_annulus() -> impl Strategy<Value = Annulus> {
    (-1.5..1.5f64, -1.5..1.5f64, 0.2..0.5f64, 1.2..2.5f64)
        .prop_map(|(x, y, r, k)| Annulus::new(Point::new(x, y), r, r * k).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn count_ignores_direction(p in random_path(), a in random_annulus()) {
        prop_assert_eq!(count_crossings(&p, &a).unwrap(), count_crossings(&p.reversed(), &a).unwrap());
    }

    #[test]
    fn count_ignores_subdivision(p in random_path(), a in random_annulus(), step in 0.002..0.02f64) {
        prop_assert_eq!(count_crossings(&p, &a).unwrap(), count_crossings(&p.densified(step), &a).unwrap());
    }

    #[test]
    fn count_follows_translation(p in random_path(), a in random_annulus(), dx in -3.0..3.0f64, dy in -3.0..3.0f64) {
        let by = Point::new(dx, dy);
        let moved = Annulus::new(a.center + by, a.r_in, a.r_out).unwrap();
        prop_assert_eq!(count_crossings(&p, &a).unwrap(), count_crossings(&p.translated(by), &moved).unwrap());
    }
}

#[test]
fn spiral_counts_over_nested_annuli() {
    // in along one turn to radius 0.1, out along one turn, in again to 0.35
    let mut pts = spiral(2.0, 0.1, 1.0);
    pts.extend(spiral(0.1, 2.0, 1.0).into_iter().skip(1));
    pts.extend(spiral(2.0, 0.35, 1.0).into_iter().skip(1));
    let path = polyline(pts, 0.005);
    let z = Point::new(0.0, 0.0);
    // (r_in, r_out, expected): the third leg only reaches annuli with r_in >= 0.35
    let cases = [
        (0.12, 0.5, 2),
        (0.2, 0.6, 2),
        (0.3, 1.0, 2),
        (0.4, 1.2, 3),
        (0.6, 1.8, 3),
    ];
    for (r_in, r_out, want) in cases {
        let ann = Annulus::new(z, r_in, r_out).unwrap();
        assert_eq!(count_crossings(&path, &ann).unwrap(), want, "annulus ({r_in}, {r_out})");
    }
}

#[test]
fn path_with_five_crossings_and_a_cheap_loop_is_not_a_geodesic() {
    use lqglab::lfpp::{annulus_crossing_length, annulus_separating_length, distance};
    let (n, s) = (64, 1.0 / 16.0);
    let z = Point::new(0.0, 0.0);
    let (r_in, r_out) = (0.5, 1.0);
    // expensive annulus with a cheap ring channel through its middle
    let f = GridField::from_fn(n, s, |p| {
        let r = p.dist(z);
        if r > r_in && r < r_out && (r - 0.75).abs() > s {
            8.0
        } else {
            0.0
        }
    })
    .unwrap();
    let g = MetricGraph::new(f, 1.0).unwrap();
    let l1 = annulus_separating_length(&g, z, r_in, r_out).unwrap();
    let l2 = annulus_crossing_length(&g, z, r_in, r_out).unwrap();
    assert!(l1 < l2, "{l1} vs {l2}");

    // lattice path through axis-aligned waypoints: out, in, out, in, out, in, out
    let way = [(-20i64, 0i64), (0, 0), (0, 20), (0, 0), (20, 0), (0, 0), (0, -20)];
    let c = (n / 2) as i64;
    let mut verts = vec![g.vertex((c + way[0].0) as usize, (c + way[0].1) as usize)];
    for w in way.windows(2) {
        let (mut x, mut y) = (c + w[0].0, c + w[0].1);
        let (tx, ty) = (c + w[1].0, c + w[1].1);
        while (x, y) != (tx, ty) {
            x += (tx - x).signum();
            if x == tx {
                y += (ty - y).signum();
            }
            verts.push(g.vertex(x as usize, y as usize));
        }
    }
    verts.dedup();
    let length: f64 = verts.windows(2).map(|w| g.edge_weight(w[0], w[1]).unwrap()).sum();
    let pts: Vec<Point> = verts.iter().map(|&v| g.position(v)).collect();
    let path = PlanarPath::from_points(pts, PathKind::Synthetic).unwrap();
    assert!(count_crossings(&path, &Annulus::new(z, r_in, r_out).unwrap()).unwrap() >= 5);
    let d = distance(&g, verts[0], *verts.last().unwrap()).unwrap();
    assert!(d < length, "{d} vs {length}");
}

#[test]
fn batch_frequency_ignores_replica_order() {
    use lqglab::crossings::CrossingFrequency;
    let f = sample_whole_plane_gff(64, 1.0 / 16.0, 5).unwrap();
    let g = MetricGraph::new(f, 0.41).unwrap();
    let batch = geodesic_crossing_experiment(&g, 6, &[0.5], 1.2, 12).unwrap().remove(0);
    let mut reports = batch.reports.clone();
    reports.reverse();
    reports.swap(0, 3);
    let other = CrossingFrequency::from_reports(batch.epsilon, batch.alpha, batch.threshold, reports).unwrap();
    assert_eq!(
        (batch.exceed, batch.frequency, batch.interval),
        (other.exceed, other.frequency, other.interval)
    );
    let mut a = batch.max_counts();
    let mut b = other.max_counts();
    a.sort_unstable();
    b.sort_unstable();
    assert_eq!(a, b);
}
