//! Minimal deterministic scatter-plot SVG: one circle per point, axis box,
//! min/max labels, parameter annotation, manifest embedded as XML comments.

use super::manifest::RunManifest;
use crate::error::{Error, Result};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct AxesSpec {
    pub x_label: String,
    pub y_label: String,
    pub title: String,
    pub width: u32,
    pub height: u32,
}

impl AxesSpec {
    pub fn new(x_label: &str, y_label: &str, title: &str) -> Self {
        Self {
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            title: title.to_string(),
            width: 800,
            height: 600,
        }
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Data range widened by a 5% margin each side; degenerate spans padded to
/// unit width so single-valued data stays renderable.
fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let m = 0.05 * (hi - lo);
        (lo - m, hi + m)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

pub fn render_svg(points: &[(f64, f64)], axes: &AxesSpec, manifest: &RunManifest) -> Result<String> {
    if points.is_empty() {
        return Err(Error::InvalidConfig("refusing to render an empty dataset".into()));
    }
    if points.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidConfig("dataset contains non-finite points".into()));
    }

    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    let (x0, x1) = padded_range(x_lo, x_hi);
    let (y0, y1) = padded_range(y_lo, y_hi);

    // Plot box inside fixed margins for the labels.
    let (ml, mr, mt, mb) = (70.0, 20.0, 40.0, 50.0);
    let (w, h) = (axes.width as f64, axes.height as f64);
    let (pw, ph) = (w - ml - mr, h - mt - mb);
    let px = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| mt + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        axes.width, axes.height, axes.width, axes.height
    );
    for line in manifest.comment_lines() {
        let _ = writeln!(s, "<!-- {} -->", esc(line.trim_start_matches("# ")));
    }
    let _ = writeln!(s, "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>", axes.width, axes.height);
    let _ = writeln!(
        s,
        "<rect x=\"{ml}\" y=\"{mt}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>"
    );

    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"14\">{}</text>",
        w / 2.0,
        esc(&axes.title)
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\">{}</text>",
        w / 2.0,
        h - 12.0,
        esc(&axes.x_label)
    );
    let _ = writeln!(
        s,
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\" transform=\"rotate(-90 16 {})\">{}</text>",
        h / 2.0,
        h / 2.0,
        esc(&axes.y_label)
    );

    // Min/max labels at the box corners.
    let _ = writeln!(
        s,
        "<text x=\"{ml}\" y=\"{}\" text-anchor=\"start\" font-family=\"monospace\" font-size=\"11\">{}</text>",
        h - mb + 16.0,
        fmt_label(x0)
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">{}</text>",
        w - mr,
        h - mb + 16.0,
        fmt_label(x1)
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">{}</text>",
        ml - 6.0,
        h - mb,
        fmt_label(y0)
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">{}</text>",
        ml - 6.0,
        mt + 10.0,
        fmt_label(y1)
    );

    for &(x, y) in points {
        let _ = writeln!(
            s,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.2\" fill=\"#1a4a7a\" fill-opacity=\"0.7\"/>",
            px(x),
            py(y)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn fmt_label(v: f64) -> String {
    format!("{v:.4}")
}
