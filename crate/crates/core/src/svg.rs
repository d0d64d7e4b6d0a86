//! Deterministic SVG 1.1 rendering of path configurations, frozen curves
//! and sampled height fields.

use std::fmt::Write as _;

use crate::limit::FrozenCurve;
use crate::paths::{HeightField, PathConfig};

/// Anything [`render_svg`] can draw.
#[derive(Clone, Copy, Debug)]
pub enum Artifact<'a> {
    Paths(&'a PathConfig),
    Frozen(&'a FrozenCurve),
    Height(&'a HeightField),
}

const UNIT: f64 = 60.0;
const MARGIN: f64 = 30.0;
const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

fn header(out: &mut String, w: f64, h: f64) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="white"/>"#);
}

fn points(pts: &[(f64, f64)]) -> String {
    pts.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect::<Vec<_>>().join(" ")
}

pub fn render_svg(artifact: Artifact<'_>) -> String {
    match artifact {
        Artifact::Paths(p) => render_paths(p),
        Artifact::Frozen(f) => render_frozen(f),
        Artifact::Height(h) => render_height(h),
    }
}

/// Columns `0..=max_col` of the lecture hall graph with one polyline per path.
fn render_paths(p: &PathConfig) -> String {
    let g = p.graph;
    let t = g.t as f64;
    let w = 2.0 * MARGIN + g.max_col as f64 * UNIT;
    let h = 2.0 * MARGIN + t * UNIT;
    let map = |x: f64, y: f64| (MARGIN + x * UNIT, MARGIN + (t - y) * UNIT);
    let mut out = String::new();
    header(&mut out, w, h);
    let _ = writeln!(out, r##"<g class="grid" stroke="#cccccc" stroke-width="1">"##);
    for col in 0..=g.max_col {
        let (x0, y0) = map(col as f64, 0.0);
        let (_, y1) = map(col as f64, t);
        let _ = writeln!(out, r#"<line class="grid-col" x1="{x0:.3}" y1="{y0:.3}" x2="{x0:.3}" y2="{y1:.3}"/>"#);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r##"<g class="vertices" fill="#888888">"##);
    for v in g.vertices() {
        let (x, y) = map(v.x(), v.height());
        let _ = writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="1.5"/>"#);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g class="paths" fill="none" stroke-width="3">"#);
    for (i, path) in p.paths.iter().enumerate() {
        let pts: Vec<(f64, f64)> = path.iter().map(|v| map(v.x(), v.height())).collect();
        let _ = writeln!(
            out,
            r#"<polyline class="path" stroke="{}" points="{}"/>"#,
            PALETTE[i % PALETTE.len()],
            points(&pts)
        );
    }
    let _ = writeln!(out, "</g>\n</svg>");
    out
}

/// The `(χ, s)` curve over `[χ_min, χ_max] × [0, 1]`, broken at gaps.
fn render_frozen(f: &FrozenCurve) -> String {
    let pts: Vec<(f64, f64)> = f.samples.iter().flatten().map(|s| (s.chi, s.s)).collect();
    let (lo, hi) = pts.iter().fold((0.0f64, 1.0f64), |(a, b), &(x, _)| (a.min(x), b.max(x)));
    let (wu, hu) = (8.0 * UNIT, 5.0 * UNIT);
    let map = |x: f64, s: f64| (MARGIN + (x - lo) / (hi - lo) * wu, MARGIN + (1.0 - s.clamp(-0.1, 1.1)) * hu);
    let mut out = String::new();
    header(&mut out, wu + 2.0 * MARGIN, hu + 2.0 * MARGIN);
    let (x0, y0) = map(lo, 0.0);
    let (x1, y1) = map(hi, 1.0);
    let _ = writeln!(
        out,
        r##"<rect class="frame" x="{x0:.3}" y="{y1:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="#999999"/>"##,
        x1 - x0,
        y0 - y1
    );
    let mut run: Vec<(f64, f64)> = Vec::new();
    let flush = |run: &mut Vec<(f64, f64)>, out: &mut String| {
        if run.len() >= 2 {
            let _ = writeln!(out, r##"<polyline class="frozen" fill="none" stroke="#d62728" stroke-width="2" points="{}"/>"##, points(run));
        }
        run.clear();
    };
    for s in &f.samples {
        match s {
            Some(s) if (-0.1..=1.1).contains(&s.s) => run.push(map(s.chi, s.s)),
            _ => flush(&mut run, &mut out),
        }
    }
    flush(&mut run, &mut out);
    let _ = writeln!(out, "</svg>");
    out
}

/// One square per sample, shaded by height.
fn render_height(hf: &HeightField) -> String {
    let (mut xl, mut xh, mut yl, mut yh, mut hmax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN, 1u32);
    for &((x, y), h) in &hf.samples {
        xl = xl.min(x);
        xh = xh.max(x);
        yl = yl.min(y);
        yh = yh.max(y);
        hmax = hmax.max(h);
    }
    if hf.samples.is_empty() {
        (xl, xh, yl, yh) = (0.0, 1.0, 0.0, 1.0);
    }
    let span = |a: f64, b: f64| if b > a { b - a } else { 1.0 };
    let (wu, hu) = (8.0 * UNIT, 5.0 * UNIT);
    let map = |x: f64, y: f64| (MARGIN + (x - xl) / span(xl, xh) * wu, MARGIN + (yh - y) / span(yl, yh) * hu);
    let mut out = String::new();
    header(&mut out, wu + 2.0 * MARGIN, hu + 2.0 * MARGIN);
    for &((x, y), h) in &hf.samples {
        let (px, py) = map(x, y);
        let _ = writeln!(
            out,
            r##"<rect class="height" x="{:.3}" y="{:.3}" width="6" height="6" fill="#1f77b4" fill-opacity="{:.3}"/>"##,
            px - 3.0,
            py - 3.0,
            h as f64 / hmax as f64
        );
    }
    let _ = writeln!(out, "</svg>");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::{tableau_to_paths, LhGraph};
    use crate::partition::Partition;
    use crate::tableau::LectureHallTableau;

    fn five_path_example() -> PathConfig {
        let l = LectureHallTableau::from_rows(5, 4, &[vec![16, 8, 9, 4], vec![11, 5, 6], vec![7]]).unwrap();
        tableau_to_paths(&l).unwrap()
    }

    #[test]
    fn five_path_example_renders() {
        let p = five_path_example();
        let svg = render_svg(Artifact::Paths(&p));
        assert_eq!(svg.matches("<polyline").count(), 5);
        assert_eq!(svg.matches("class=\"grid-col\"").count(), 9);
        assert_eq!(p.graph.max_col, 8);
        assert_eq!(svg, render_svg(Artifact::Paths(&five_path_example())));
    }

    #[test]
    fn empty_configuration_is_grid_only() {
        let p = PathConfig { graph: LhGraph::new(2, 3), n: 0, lambda: Partition::empty(), paths: vec![] };
        let svg = render_svg(Artifact::Paths(&p));
        assert_eq!(svg.matches("<polyline").count(), 0);
        assert_eq!(svg.matches("class=\"grid-col\"").count(), 4);
    }

    #[test]
    fn height_field_renders() {
        let hf = HeightField { samples: vec![((0.0, 0.0), 0), ((1.0, 0.5), 2)] };
        let svg = render_svg(Artifact::Height(&hf));
        assert_eq!(svg.matches("class=\"height\"").count(), 2);
        assert!(render_svg(Artifact::Height(&HeightField { samples: vec![] })).ends_with("</svg>\n"));
    }
}
