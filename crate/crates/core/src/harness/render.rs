//! PNG figures of fields, metric balls with their geodesic fans, SLE traces
//! and crossing-count maps.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{LabError, Result};
use crate::geom::Point;
use crate::grf::field_from_bytes;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderStyle {
    /// Field binary as a heat map.
    Heat,
    /// Ball CSV colored by distance to the center, with the sibling
    /// `*fan.csv` drawn on top when present.
    Ball,
    /// Trace CSV, with the best annulus of the sibling `*crossings_eps0.csv`
    /// when present.
    Trace,
    /// Crossing-report CSV as a count map with the argmax center marked.
    Crossings,
}

impl RenderStyle {
    pub const ALL: [RenderStyle; 4] = [
        RenderStyle::Heat,
        RenderStyle::Ball,
        RenderStyle::Trace,
        RenderStyle::Crossings,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RenderStyle::Heat => "heat",
            RenderStyle::Ball => "ball",
            RenderStyle::Trace => "trace",
            RenderStyle::Crossings => "crossings",
        }
    }
}

impl fmt::Display for RenderStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RenderStyle {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        RenderStyle::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| LabError::Validation {
                field: "style".into(),
                message: format!("unknown style `{s}`, expected heat, ball, trace or crossings"),
            })
    }
}

/// Side of the rendered image, roughly: small inputs are scaled up by an
/// integer factor to reach it.
pub const TARGET_SIZE: usize = 512;

/// Marker color for the argmax center; absent from the color map.
pub const MARKER: [u8; 3] = [255, 0, 0];
const WHITE: [u8; 3] = [255, 255, 255];
const BLACK: [u8; 3] = [0, 0, 0];
const INNER: [u8; 3] = [0, 90, 255];

/// Renders `input` and writes the PNG next to it with extension `png`.
pub fn render(input: &Path, style: RenderStyle) -> Result<PathBuf> {
    let png = render_png(input, style)?;
    let out = input.with_extension("png");
    std::fs::write(&out, png).map_err(|e| LabError::io(&out, e))?;
    Ok(out)
}

/// PNG bytes for `input`; identical inputs give identical bytes.
pub fn render_png(input: &Path, style: RenderStyle) -> Result<Vec<u8>> {
    let canvas = match style {
        RenderStyle::Heat => heat(input)?,
        RenderStyle::Ball => ball(input)?,
        RenderStyle::Trace => trace(input)?,
        RenderStyle::Crossings => crossings(input)?,
    };
    Ok(canvas.encode())
}

/// Five-stop approximation of the viridis map, `t` in `[0, 1]`.
pub fn color_map(t: f64) -> [u8; 3] {
    const STOPS: [[f64; 3]; 5] = [
        [68.0, 1.0, 84.0],
        [59.0, 82.0, 139.0],
        [33.0, 145.0, 140.0],
        [94.0, 201.0, 98.0],
        [253.0, 231.0, 37.0],
    ];
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let x = t * 4.0;
    let i = (x.floor() as usize).min(3);
    let f = x - i as f64;
    let mut out = [0u8; 3];
    for c in 0..3 {
        out[c] = (STOPS[i][c] + f * (STOPS[i + 1][c] - STOPS[i][c])).round() as u8;
    }
    out
}

struct Canvas {
    width: usize,
    height: usize,
    rgb: Vec<u8>,
}

impl Canvas {
    fn new(width: usize, height: usize) -> Self {
        Canvas {
            width,
            height,
            rgb: WHITE.repeat(width * height),
        }
    }

    /// `(x, y)` with `y` growing upwards; out-of-range pixels are ignored.
    fn set(&mut self, x: i64, y: i64, c: [u8; 3]) {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return;
        }
        let row = self.height - 1 - y as usize;
        let k = 3 * (row * self.width + x as usize);
        self.rgb[k..k + 3].copy_from_slice(&c);
    }

    fn block(&mut self, x: usize, y: usize, scale: usize, c: [u8; 3]) {
        for dy in 0..scale {
            for dx in 0..scale {
                self.set((x * scale + dx) as i64, (y * scale + dy) as i64, c);
            }
        }
    }

    fn line(&mut self, a: (f64, f64), b: (f64, f64), c: [u8; 3]) {
        let steps = ((b.0 - a.0).abs().max((b.1 - a.1).abs()).ceil() as usize).max(1);
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            let x = a.0 + t * (b.0 - a.0);
            let y = a.1 + t * (b.1 - a.1);
            self.set(x.floor() as i64, y.floor() as i64, c);
        }
    }

    fn circle(&mut self, center: (f64, f64), r: f64, c: [u8; 3]) {
        let steps = ((2.0 * std::f64::consts::PI * r).ceil() as usize * 2).max(16);
        let at = |k: usize| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / steps as f64;
            (center.0 + r * th.cos(), center.1 + r * th.sin())
        };
        for k in 0..steps {
            self.line(at(k), at(k + 1), c);
        }
    }

    fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, self.width as u32, self.height as u32);
            enc.set_color(png::ColorType::Rgb);
            enc.set_depth(png::BitDepth::Eight);
            let mut w = enc.write_header().expect("PNG header into memory");
            w.write_image_data(&self.rgb).expect("PNG data into memory");
        }
        out
    }
}

/// Maps plane points to pixels with one uniform scale.
struct View {
    min: Point,
    scale: f64,
}

impl View {
    fn fit(min: Point, max: Point, size: usize) -> (View, usize, usize) {
        let w = (max.x - min.x).max(f64::MIN_POSITIVE);
        let h = (max.y - min.y).max(f64::MIN_POSITIVE);
        let scale = (size as f64 - 1.0) / w.max(h);
        let (pw, ph) = ((w * scale).ceil() as usize + 1, (h * scale).ceil() as usize + 1);
        (View { min, scale }, pw, ph)
    }

    fn px(&self, p: Point) -> (f64, f64) {
        (
            (p.x - self.min.x) * self.scale + 0.5,
            (p.y - self.min.y) * self.scale + 0.5,
        )
    }
}

fn parse_err(offset: u64, message: impl Into<String>) -> LabError {
    LabError::Parse {
        offset,
        message: message.into(),
    }
}

/// Numeric CSV with the named columns, as rows in file order.
fn read_table(path: &Path, columns: &[&str]) -> Result<Vec<Vec<f64>>> {
    let bytes = std::fs::read(path).map_err(|e| LabError::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(bytes.as_slice());
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(e.position().map_or(0, |p| p.byte()), e.to_string()))?
        .clone();
    let idx = columns
        .iter()
        .map(|c| {
            headers
                .iter()
                .position(|h| h == *c)
                .ok_or_else(|| parse_err(0, format!("missing column `{c}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| parse_err(e.position().map_or(0, |p| p.byte()), e.to_string()))?;
        let at = rec.position().map_or(0, |p| p.byte());
        let row = idx
            .iter()
            .map(|&i| {
                let field = rec.get(i).unwrap_or("");
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| parse_err(at, format!("`{field}` in column `{}` is not a number", &headers[i])))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(bytes.len() as u64, "no data rows"));
    }
    Ok(rows)
}

/// Sibling file obtained by replacing the `from` suffix of the name.
fn sibling(path: &Path, from: &str, to: &str) -> Option<PathBuf> {
    let name = path.file_name()?.to_str()?;
    let stem = name.strip_suffix(from)?;
    let p = path.with_file_name(format!("{stem}{to}"));
    p.exists().then_some(p)
}

fn heat(input: &Path) -> Result<Canvas> {
    let bytes = std::fs::read(input).map_err(|e| LabError::io(input, e))?;
    let field = field_from_bytes(&bytes)?;
    let n = field.size();
    let v = field.values();
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let scale = (TARGET_SIZE / n).max(1);
    let mut c = Canvas::new(n * scale, n * scale);
    for iy in 0..n {
        for ix in 0..n {
            c.block(ix, iy, scale, color_map((field.at(ix, iy) - lo) / span));
        }
    }
    Ok(c)
}

/// Sorted distinct values and the smallest gap between them.
fn lattice_axis(values: impl Iterator<Item = f64>) -> (Vec<f64>, f64) {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    let gap = v.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    (v, gap)
}

fn ball(input: &Path) -> Result<Canvas> {
    let rows = read_table(input, &["x", "y", "dist_to_center"])?;
    let (xs, gx) = lattice_axis(rows.iter().map(|r| r[0]));
    let (ys, gy) = lattice_axis(rows.iter().map(|r| r[1]));
    let step = match gx.min(gy) {
        g if g.is_finite() && g > 0.0 => g,
        _ => 1.0,
    };
    let min = Point::new(xs[0], ys[0]);
    let nx = ((xs[xs.len() - 1] - min.x) / step).round() as usize + 1;
    let ny = ((ys[ys.len() - 1] - min.y) / step).round() as usize + 1;
    let scale = (TARGET_SIZE / nx.max(ny)).max(1);
    let mut c = Canvas::new(nx * scale, ny * scale);
    let dmax = rows.iter().map(|r| r[2]).fold(0.0, f64::max);
    let dmax = if dmax > 0.0 { dmax } else { 1.0 };
    let cell = |p: Point| {
        (
            ((p.x - min.x) / step).round() as usize,
            ((p.y - min.y) / step).round() as usize,
        )
    };
    for r in &rows {
        let (ix, iy) = cell(Point::new(r[0], r[1]));
        c.block(ix, iy, scale, color_map(r[2] / dmax));
    }
    if let Some(fan) = sibling(input, "ball.csv", "fan.csv") {
        let pts = read_table(&fan, &["branch", "x", "y"])?;
        let half = scale as f64 / 2.0;
        let px = |r: &Vec<f64>| {
            (
                (r[1] - min.x) / step * scale as f64 + half,
                (r[2] - min.y) / step * scale as f64 + half,
            )
        };
        for w in pts.windows(2) {
            if w[0][0] == w[1][0] {
                c.line(px(&w[0]), px(&w[1]), BLACK);
            }
        }
    }
    Ok(c)
}

/// First row attaining the largest count, as `(center, count, r_in, r_out)`.
fn report_argmax(rows: &[Vec<f64>]) -> (Point, f64, f64, f64) {
    let best = rows.iter().map(|r| r[2]).fold(f64::NEG_INFINITY, f64::max);
    let r = rows.iter().find(|r| r[2] == best).expect("table is not empty");
    (Point::new(r[0], r[1]), r[2], r[3], r[4])
}

const REPORT_COLUMNS: [&str; 5] = ["center_x", "center_y", "count", "r_in", "r_out"];

fn trace(input: &Path) -> Result<Canvas> {
    let rows = read_table(input, &["x", "y"])?;
    let pts: Vec<Point> = rows.iter().map(|r| Point::new(r[0], r[1])).collect();
    let annulus = match sibling(input, "trace.csv", "crossings_eps0.csv") {
        Some(p) => Some(report_argmax(&read_table(&p, &REPORT_COLUMNS)?)),
        None => None,
    };
    let (mut lo, mut hi) = (pts[0], pts[0]);
    for p in &pts {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    if let Some((z, _, _, r_out)) = annulus {
        lo = Point::new(lo.x.min(z.x - r_out), lo.y.min(z.y - r_out));
        hi = Point::new(hi.x.max(z.x + r_out), hi.y.max(z.y + r_out));
    }
    let (view, w, h) = View::fit(lo, hi, TARGET_SIZE);
    let mut c = Canvas::new(w, h);
    for s in pts.windows(2) {
        c.line(view.px(s[0]), view.px(s[1]), BLACK);
    }
    if let Some((z, _, r_in, r_out)) = annulus {
        c.circle(view.px(z), r_out * view.scale, MARKER);
        c.circle(view.px(z), r_in * view.scale, INNER);
    }
    Ok(c)
}

fn crossings(input: &Path) -> Result<Canvas> {
    let rows = read_table(input, &REPORT_COLUMNS)?;
    let (xs, _) = lattice_axis(rows.iter().map(|r| r[0]));
    let (ys, _) = lattice_axis(rows.iter().map(|r| r[1]));
    let scale = (TARGET_SIZE / xs.len().max(ys.len())).max(1);
    let mut c = Canvas::new(xs.len() * scale, ys.len() * scale);
    let cell = |p: Point| {
        (
            xs.binary_search_by(|v| v.total_cmp(&p.x)).expect("x is a grid value"),
            ys.binary_search_by(|v| v.total_cmp(&p.y)).expect("y is a grid value"),
        )
    };
    let (z, best, _, _) = report_argmax(&rows);
    let top = if best > 0.0 { best } else { 1.0 };
    for r in &rows {
        let (ix, iy) = cell(Point::new(r[0], r[1]));
        c.block(ix, iy, scale, color_map(r[2] / top));
    }
    let (ix, iy) = cell(z);
    c.block(ix, iy, scale, MARKER);
    let (cx, cy) = (
        ((ix * scale) as f64 + scale as f64 / 2.0),
        ((iy * scale) as f64 + scale as f64 / 2.0),
    );
    let arm = 2.0 * scale as f64 + 3.0;
    c.line((cx - arm, cy), (cx + arm, cy), MARKER);
    c.line((cx, cy - arm), (cx, cy + arm), MARKER);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn color_map_endpoints_and_marker() {
        assert_eq!(color_map(0.0), [68, 1, 84]);
        assert_eq!(color_map(1.0), [253, 231, 37]);
        assert_eq!(color_map(f64::NAN), [68, 1, 84]);
        for k in 0..=100 {
            assert_ne!(color_map(k as f64 / 100.0), MARKER);
        }
    }

    #[test]
    fn bad_number_reports_its_row_offset() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r000_ball.csv");
        // header 19 bytes, first row 6
        std::fs::write(&p, "x,y,dist_to_center\n0,0,0\n1,zz,1\n").unwrap();
        match render_png(&p, RenderStyle::Ball) {
            Err(LabError::Parse { offset, .. }) => assert_eq!(offset, 25),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn style_names_round_trip() {
        for s in RenderStyle::ALL {
            assert_eq!(s.name().parse::<RenderStyle>().unwrap(), s);
        }
        assert!("pie".parse::<RenderStyle>().is_err());
    }
}
