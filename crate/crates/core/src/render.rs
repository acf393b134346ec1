//! Implicit-curve rasterization and figure output.
//!
//! Marching squares over a rational viewport: the curve polynomial is
//! evaluated in f64 on a (grid+1)² lattice, each cell contributes contour
//! segments by the sign pattern of its corners (negative means strictly
//! `< 0`), crossing points are placed by linear interpolation along cell
//! edges, and segments are stitched into polylines by shared lattice-edge
//! identity. Saddle cells are disambiguated by the sign at the cell
//! center. With the `parallel` feature, lattice rows and cell rows are
//! computed across workers and merged in row order, so output is
//! identical to the sequential path.

use std::collections::HashMap;

use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::locus::ImplicitCurve;
use crate::poly::rational_to_f64;
use crate::rational::{rat_int, Rational};

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("viewport is empty: min must be below max on both axes")]
    EmptyViewport,
    #[error("grid of {0} is too coarse; at least 8 cells per axis")]
    GridTooCoarse(u32),
}

/// Rational plot window plus the cell count per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Viewport {
    pub xmin: Rational,
    pub xmax: Rational,
    pub ymin: Rational,
    pub ymax: Rational,
    pub grid: u32,
}

pub const DEFAULT_GRID: u32 = 512;
const MIN_GRID: u32 = 8;

impl Viewport {
    pub fn new(
        xmin: Rational,
        xmax: Rational,
        ymin: Rational,
        ymax: Rational,
        grid: u32,
    ) -> Result<Self, RenderError> {
        if xmin >= xmax || ymin >= ymax {
            return Err(RenderError::EmptyViewport);
        }
        if grid < MIN_GRID {
            return Err(RenderError::GridTooCoarse(grid));
        }
        Ok(Viewport {
            xmin,
            xmax,
            ymin,
            ymax,
            grid,
        })
    }

    /// Centered square window [-half, half]².
    pub fn square(half: i64, grid: u32) -> Result<Self, RenderError> {
        Viewport::new(rat_int(-half), rat_int(half), rat_int(-half), rat_int(half), grid)
    }
}

impl Default for Viewport {
    fn default() -> Self {
        Viewport::square(5, DEFAULT_GRID).expect("static bounds")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CurvePaths {
    pub paths: Vec<Polyline>,
}

// ------------------------------------------------------ marching squares

fn neg(v: f64) -> bool {
    v < 0.0
}

/// Lattice-edge identity: horizontal edge rightward from (i, j) or
/// vertical edge upward from (i, j).
fn h_edge(i: usize, j: usize, n: usize) -> u64 {
    ((j * (n + 1) + i) as u64) << 1
}

fn v_edge(i: usize, j: usize, n: usize) -> u64 {
    (((j * (n + 1) + i) as u64) << 1) | 1
}

struct Lattice {
    xs: Vec<f64>,
    ys: Vec<f64>,
    values: Vec<Vec<f64>>,
}

fn lattice(curve: &ImplicitCurve, vp: &Viewport) -> Lattice {
    let n = vp.grid as usize;
    let (x0, x1) = (rational_to_f64(&vp.xmin), rational_to_f64(&vp.xmax));
    let (y0, y1) = (rational_to_f64(&vp.ymin), rational_to_f64(&vp.ymax));
    let xs: Vec<f64> = (0..=n).map(|i| x0 + (x1 - x0) * i as f64 / n as f64).collect();
    let ys: Vec<f64> = (0..=n).map(|j| y0 + (y1 - y0) * j as f64 / n as f64).collect();
    let row = |j: &usize| -> Vec<f64> {
        xs.iter().map(|&x| curve.poly().eval_f64(&[x, ys[*j]])).collect()
    };
    #[cfg(feature = "parallel")]
    let values: Vec<Vec<f64>> = (0..=n).collect::<Vec<_>>().par_iter().map(row).collect();
    #[cfg(not(feature = "parallel"))]
    let values: Vec<Vec<f64>> = (0..=n).collect::<Vec<_>>().iter().map(row).collect();
    Lattice { xs, ys, values }
}

/// Contour segments of one cell row, as pairs of lattice-edge ids.
fn row_segments(curve: &ImplicitCurve, lat: &Lattice, j: usize, n: usize) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for i in 0..n {
        let bl = lat.values[j][i];
        let br = lat.values[j][i + 1];
        let tr = lat.values[j + 1][i + 1];
        let tl = lat.values[j + 1][i];
        let case = (neg(bl) as u8)
            | (neg(br) as u8) << 1
            | (neg(tr) as u8) << 2
            | (neg(tl) as u8) << 3;
        if case == 0 || case == 15 {
            continue;
        }
        let b = h_edge(i, j, n);
        let t = h_edge(i, j + 1, n);
        let l = v_edge(i, j, n);
        let r = v_edge(i + 1, j, n);
        match case {
            1 | 14 => out.push((l, b)),
            2 | 13 => out.push((b, r)),
            3 | 12 => out.push((l, r)),
            4 | 11 => out.push((r, t)),
            6 | 9 => out.push((b, t)),
            7 | 8 => out.push((t, l)),
            5 | 10 => {
                let cx = (lat.xs[i] + lat.xs[i + 1]) / 2.0;
                let cy = (lat.ys[j] + lat.ys[j + 1]) / 2.0;
                let center_neg = neg(curve.poly().eval_f64(&[cx, cy]));
                // join the corners that share the center's sign
                let bl_joined = neg(bl) == center_neg;
                if (case == 5) == bl_joined {
                    out.push((t, l));
                    out.push((b, r));
                } else {
                    out.push((l, b));
                    out.push((r, t));
                }
            }
            _ => unreachable!("cases 0 and 15 skipped"),
        }
    }
    out
}

/// Root position on a lattice edge by linear interpolation.
fn edge_point(lat: &Lattice, id: u64, n: usize) -> (f64, f64) {
    let vertical = id & 1 == 1;
    let cell = (id >> 1) as usize;
    let i = cell % (n + 1);
    let j = cell / (n + 1);
    if vertical {
        let (v0, v1) = (lat.values[j][i], lat.values[j + 1][i]);
        let t = v0 / (v0 - v1);
        (lat.xs[i], lat.ys[j] + (lat.ys[j + 1] - lat.ys[j]) * t)
    } else {
        let (v0, v1) = (lat.values[j][i], lat.values[j][i + 1]);
        let t = v0 / (v0 - v1);
        (lat.xs[i] + (lat.xs[i + 1] - lat.xs[i]) * t, lat.ys[j])
    }
}

pub fn rasterize(curve: &ImplicitCurve, vp: &Viewport) -> CurvePaths {
    let n = vp.grid as usize;
    let lat = lattice(curve, vp);
    let rows: Vec<usize> = (0..n).collect();
    #[cfg(feature = "parallel")]
    let per_row: Vec<Vec<(u64, u64)>> = rows
        .par_iter()
        .map(|&j| row_segments(curve, &lat, j, n))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let per_row: Vec<Vec<(u64, u64)>> = rows
        .iter()
        .map(|&j| row_segments(curve, &lat, j, n))
        .collect();
    stitch(&lat, per_row, n)
}

/// Single-threaded rasterization regardless of features; the parallel
/// path must agree with this bit for bit.
pub fn rasterize_seq(curve: &ImplicitCurve, vp: &Viewport) -> CurvePaths {
    let n = vp.grid as usize;
    let lat = lattice_seq(curve, vp);
    let per_row: Vec<Vec<(u64, u64)>> = (0..n).map(|j| row_segments(curve, &lat, j, n)).collect();
    stitch(&lat, per_row, n)
}

fn lattice_seq(curve: &ImplicitCurve, vp: &Viewport) -> Lattice {
    let n = vp.grid as usize;
    let (x0, x1) = (rational_to_f64(&vp.xmin), rational_to_f64(&vp.xmax));
    let (y0, y1) = (rational_to_f64(&vp.ymin), rational_to_f64(&vp.ymax));
    let xs: Vec<f64> = (0..=n).map(|i| x0 + (x1 - x0) * i as f64 / n as f64).collect();
    let ys: Vec<f64> = (0..=n).map(|j| y0 + (y1 - y0) * j as f64 / n as f64).collect();
    let values = (0..=n)
        .map(|j| xs.iter().map(|&x| curve.poly().eval_f64(&[x, ys[j]])).collect())
        .collect();
    Lattice { xs, ys, values }
}

/// Chains segments into polylines: every crossing point sits on a unique
/// lattice edge, so shared edge ids are the joints. Open chains start at
/// degree-1 nodes; what remains are closed loops. Node order (ascending
/// edge id) fixes the traversal, keeping output deterministic.
fn stitch(lat: &Lattice, per_row: Vec<Vec<(u64, u64)>>, n: usize) -> CurvePaths {
    let mut adjacency: HashMap<u64, Vec<u64>> = HashMap::new();
    for row in per_row {
        for (a, b) in row {
            adjacency.entry(a).or_default().push(b);
            adjacency.entry(b).or_default().push(a);
        }
    }
    let mut ids: Vec<u64> = adjacency.keys().copied().collect();
    ids.sort_unstable();

    let mut visited: HashMap<u64, bool> = HashMap::new();
    let mut paths = Vec::new();
    // open chains first
    for &start in ids.iter().filter(|id| adjacency[id].len() == 1) {
        if visited.get(&start).copied().unwrap_or(false) {
            continue;
        }
        paths.push(walk(lat, &adjacency, &mut visited, start, false, n));
    }
    // remaining components are loops
    for &start in &ids {
        if visited.get(&start).copied().unwrap_or(false) {
            continue;
        }
        paths.push(walk(lat, &adjacency, &mut visited, start, true, n));
    }
    CurvePaths { paths }
}

fn walk(
    lat: &Lattice,
    adjacency: &HashMap<u64, Vec<u64>>,
    visited: &mut HashMap<u64, bool>,
    start: u64,
    closed: bool,
    n: usize,
) -> Polyline {
    let mut points = Vec::new();
    let mut cur = start;
    let mut prev: Option<u64> = None;
    loop {
        visited.insert(cur, true);
        points.push(edge_point(lat, cur, n));
        let next = adjacency[&cur]
            .iter()
            .copied()
            .find(|&nb| Some(nb) != prev && !visited.get(&nb).copied().unwrap_or(false));
        match next {
            Some(nb) => {
                prev = Some(cur);
                cur = nb;
            }
            None => break,
        }
    }
    Polyline { points, closed }
}

// --------------------------------------------------------------- output

fn fmt2(v: f64) -> String {
    format!("{v:.2}")
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

const CANVAS: f64 = 640.0;

/// Window-to-canvas maps plus the SVG header, ground, and axis lines.
fn svg_head(out: &mut String, vp: &Viewport) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    let (x0, x1) = (rational_to_f64(&vp.xmin), rational_to_f64(&vp.xmax));
    let (y0, y1) = (rational_to_f64(&vp.ymin), rational_to_f64(&vp.ymax));
    let sx = move |x: f64| (x - x0) / (x1 - x0) * CANVAS;
    let sy = move |y: f64| CANVAS - (y - y0) / (y1 - y0) * CANVAS;

    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{c}\" height=\"{c}\" viewBox=\"0 0 {c} {c}\">\n",
        c = CANVAS as u32
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    if x0 < 0.0 && 0.0 < x1 {
        out.push_str(&format!(
            "<line x1=\"{x}\" y1=\"0\" x2=\"{x}\" y2=\"{c}\" stroke=\"#cccccc\"/>\n",
            x = fmt2(sx(0.0)),
            c = CANVAS as u32
        ));
    }
    if y0 < 0.0 && 0.0 < y1 {
        out.push_str(&format!(
            "<line x1=\"0\" y1=\"{y}\" x2=\"{c}\" y2=\"{y}\" stroke=\"#cccccc\"/>\n",
            y = fmt2(sy(0.0)),
            c = CANVAS as u32
        ));
    }
    (sx, sy)
}

fn svg_tail(out: &mut String, annotation: &str) {
    out.push_str(&format!(
        "<text x=\"12\" y=\"24\" font-family=\"monospace\" font-size=\"14\">{}</text>\n",
        xml_escape(annotation)
    ));
    out.push_str("</svg>\n");
}

/// Standalone SVG 1.1 document: white ground, gray axes where they cross
/// the window, one path element per polyline, and the equation as an
/// on-canvas text annotation. Identical input yields identical bytes.
pub fn emit_svg(paths: &CurvePaths, vp: &Viewport, annotation: &str) -> String {
    let mut out = String::new();
    let (sx, sy) = svg_head(&mut out, vp);
    for pl in &paths.paths {
        let mut d = String::new();
        for (k, (x, y)) in pl.points.iter().enumerate() {
            let cmd = if k == 0 { 'M' } else { 'L' };
            d.push_str(&format!("{cmd}{} {} ", fmt2(sx(*x)), fmt2(sy(*y))));
        }
        if pl.closed {
            d.push('Z');
        }
        out.push_str(&format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"#1a6fb4\" stroke-width=\"1.5\"/>\n",
            d.trim_end()
        ));
    }
    svg_tail(&mut out, annotation);
    out
}

/// Scatter variant for sampled traces: one dot per point, same scaffold.
pub fn emit_svg_points(points: &[(f64, f64)], vp: &Viewport, annotation: &str) -> String {
    let mut out = String::new();
    let (sx, sy) = svg_head(&mut out, vp);
    let (x0, x1) = (rational_to_f64(&vp.xmin), rational_to_f64(&vp.xmax));
    let (y0, y1) = (rational_to_f64(&vp.ymin), rational_to_f64(&vp.ymax));
    for &(x, y) in points {
        if !x.is_finite() || !y.is_finite() || x < x0 || x > x1 || y < y0 || y > y1 {
            continue;
        }
        out.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"#1a6fb4\"/>\n",
            fmt2(sx(x)),
            fmt2(sy(y))
        ));
    }
    svg_tail(&mut out, annotation);
    out
}

/// One `x,y,path_id` row per vertex.
pub fn emit_csv(paths: &CurvePaths) -> String {
    let mut out = String::from("x,y,path_id\n");
    for (id, pl) in paths.paths.iter().enumerate() {
        for (x, y) in &pl.points {
            out.push_str(&format!("{x},{y},{id}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locus::plane_registry;
    use crate::text::parse_poly;

    fn curve(s: &str) -> ImplicitCurve {
        ImplicitCurve::new(parse_poly(s, plane_registry()).unwrap()).unwrap()
    }

    fn circle_error(grid: u32) -> f64 {
        let vp = Viewport::square(3, grid).unwrap();
        let paths = rasterize(&curve("x^2 + y^2 - 4"), &vp);
        assert_eq!(paths.paths.len(), 1, "one component");
        assert!(paths.paths[0].closed, "circle closes");
        paths.paths[0]
            .points
            .iter()
            .map(|(x, y)| ((x * x + y * y).sqrt() - 2.0).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn circle_vertices_hug_the_true_circle() {
        let cell = 6.0 / 512.0;
        assert!(circle_error(512) < 2.0 * cell);
    }

    #[test]
    fn doubling_the_grid_shrinks_the_error() {
        let coarse = circle_error(64);
        let fine = circle_error(128);
        assert!(fine < coarse, "refinement helps at all");
        assert!(fine <= coarse / 2.0 * 3.0, "halving within factor 3");
    }

    #[test]
    fn empty_real_locus_gives_no_paths() {
        let vp = Viewport::square(5, 64).unwrap();
        assert!(rasterize(&curve("x^2 + y^2 + 1"), &vp).paths.is_empty());
    }

    #[test]
    fn axis_line_is_a_single_open_polyline() {
        let vp = Viewport::square(1, 64).unwrap();
        let paths = rasterize(&curve("y"), &vp);
        assert_eq!(paths.paths.len(), 1);
        let pl = &paths.paths[0];
        assert!(!pl.closed);
        assert!(pl.points.iter().all(|(_, y)| y.abs() < 1e-9));
        let xs: Vec<f64> = pl.points.iter().map(|(x, _)| *x).collect();
        let span = xs.iter().cloned().fold(f64::MIN, f64::max)
            - xs.iter().cloned().fold(f64::MAX, f64::min);
        assert!(span > 1.9, "crosses the whole window");
    }

    #[test]
    fn factored_curves_split_into_multiple_paths() {
        // (y + 1)(x - y - 2): two crossing lines
        let vp = Viewport::square(5, 128).unwrap();
        let paths = rasterize(&curve("xy + x - y^2 - 3y - 2"), &vp);
        assert!(paths.paths.len() >= 2, "got {}", paths.paths.len());
        let svg = emit_svg(&paths, &vp, "xy + x - y^2 - 3y - 2 = 0");
        assert!(svg.matches("<path ").count() >= 2);
    }

    #[test]
    fn every_vertex_stays_inside_the_viewport() {
        let vp = Viewport::square(3, 64).unwrap();
        for pl in rasterize(&curve("x^2 + y^2 - 4"), &vp).paths {
            for (x, y) in pl.points {
                assert!((-3.0..=3.0).contains(&x) && (-3.0..=3.0).contains(&y));
            }
        }
    }

    #[test]
    fn svg_bytes_are_deterministic_and_annotated() {
        let vp = Viewport::square(3, 64).unwrap();
        let c = curve("x^2 + y^2 - 4");
        let a = emit_svg(&rasterize(&c, &vp), &vp, "x^2 + y^2 - 4 = 0 & <check>");
        let b = emit_svg(&rasterize(&c, &vp), &vp, "x^2 + y^2 - 4 = 0 & <check>");
        assert_eq!(a, b);
        assert!(a.contains("x^2 + y^2 - 4 = 0 &amp; &lt;check&gt;"));
        assert!(a.starts_with("<svg xmlns"));
    }

    #[test]
    fn empty_paths_still_emit_the_annotation() {
        let vp = Viewport::square(2, 64).unwrap();
        let svg = emit_svg(&CurvePaths::default(), &vp, "nothing real");
        assert!(!svg.contains("<path "));
        assert!(svg.contains("nothing real"));
    }

    #[test]
    fn point_markers_clip_to_the_window() {
        let vp = Viewport::square(2, 64).unwrap();
        let pts = [(0.5, 0.5), (10.0, 0.0), (f64::NAN, 0.0)];
        let svg = emit_svg_points(&pts, &vp, "dots");
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains("dots"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn csv_rows_carry_path_ids() {
        let vp = Viewport::square(3, 32).unwrap();
        let csv = emit_csv(&rasterize(&curve("x^2 + y^2 - 4"), &vp));
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x,y,path_id"));
        for line in lines {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols.len(), 3);
            cols[0].parse::<f64>().unwrap();
            cols[1].parse::<f64>().unwrap();
            assert_eq!(cols[2], "0");
        }
    }

    #[test]
    fn viewport_rejects_degenerate_windows() {
        assert_eq!(
            Viewport::new(rat_int(1), rat_int(1), rat_int(0), rat_int(1), 64).unwrap_err(),
            RenderError::EmptyViewport
        );
        assert_eq!(
            Viewport::square(5, 4).unwrap_err(),
            RenderError::GridTooCoarse(4)
        );
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_and_sequential_rasterization_agree() {
        let vp = Viewport::square(5, 128).unwrap();
        for eq in ["x^2 + y^2 - 4", "xy + x - y^2 - 3y - 2", "y"] {
            let c = curve(eq);
            assert_eq!(rasterize(&c, &vp), rasterize_seq(&c, &vp));
        }
    }
}
