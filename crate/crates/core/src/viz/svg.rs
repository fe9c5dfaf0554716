//! SVG scatter and flow plots.
//!
//! The axis transform is linear and documented here so plotted coordinates
//! can be recovered from the emitted file:
//!
//! ```text
//! px(v) = MARGIN_LEFT + (v - x_min) / (x_max - x_min) * plot_width
//! py(v) = MARGIN_TOP  + (y_max - v) / (y_max - y_min) * plot_height
//! ```
//!
//! where `plot_width = width - MARGIN_LEFT - MARGIN_RIGHT` and
//! `plot_height = height - MARGIN_TOP - MARGIN_BOTTOM`. Auto ranges are the
//! data bounds padded by 5% per side; a degenerate axis (min = max) is
//! padded by 1.0 so the data centers on the canvas.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::shift::{top_k_shifts, ShiftRecord};

use super::{PlotSpec, VizError};

pub const MARGIN_LEFT: f64 = 60.0;
pub const MARGIN_RIGHT: f64 = 15.0;
pub const MARGIN_TOP: f64 = 30.0;
pub const MARGIN_BOTTOM: f64 = 45.0;

pub const SCATTER_MARKER_COLOR: &str = "#3a6ea5";
pub const FLOW_STROKE_COLOR: &str = "#8a97a8";
pub const FLOW_HIGHLIGHT_COLOR: &str = "#d62728";

/// The linear data-to-pixel mapping of one plot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisTransform {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub width: u32,
    pub height: u32,
}

impl AxisTransform {
    /// Auto range: data bounds padded 5% per side, 1.0 when degenerate.
    pub fn fit(points: &[[f64; 2]], spec: &PlotSpec) -> Self {
        let pad = |min: f64, max: f64| {
            let span = max - min;
            if span > 0.0 {
                (min - 0.05 * span, max + 0.05 * span)
            } else {
                (min - 1.0, max + 1.0)
            }
        };
        let (x_min, x_max) = spec.x_range.unwrap_or_else(|| {
            let min = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let max = points
                .iter()
                .map(|p| p[0])
                .fold(f64::NEG_INFINITY, f64::max);
            pad(min, max)
        });
        let (y_min, y_max) = spec.y_range.unwrap_or_else(|| {
            let min = points.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
            let max = points
                .iter()
                .map(|p| p[1])
                .fold(f64::NEG_INFINITY, f64::max);
            pad(min, max)
        });
        AxisTransform {
            x_min,
            x_max,
            y_min,
            y_max,
            width: spec.width,
            height: spec.height,
        }
    }

    fn plot_box(&self) -> (f64, f64, f64, f64) {
        (
            MARGIN_LEFT,
            MARGIN_TOP,
            self.width as f64 - MARGIN_LEFT - MARGIN_RIGHT,
            self.height as f64 - MARGIN_TOP - MARGIN_BOTTOM,
        )
    }

    pub fn to_px(&self, p: [f64; 2]) -> (f64, f64) {
        let (x0, y0, w, h) = self.plot_box();
        let px = x0 + (p[0] - self.x_min) / (self.x_max - self.x_min) * w;
        let py = y0 + (self.y_max - p[1]) / (self.y_max - self.y_min) * h;
        (px, py)
    }

    pub fn from_px(&self, px: f64, py: f64) -> [f64; 2] {
        let (x0, y0, w, h) = self.plot_box();
        [
            self.x_min + (px - x0) / w * (self.x_max - self.x_min),
            self.y_max - (py - y0) / h * (self.y_max - self.y_min),
        ]
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn check_points(points: &[[f64; 2]]) -> Result<(), VizError> {
    if points.is_empty() {
        return Err(VizError::EmptyInput);
    }
    for (index, p) in points.iter().enumerate() {
        if !p[0].is_finite() || !p[1].is_finite() {
            return Err(VizError::NonFinitePoint { index });
        }
    }
    Ok(())
}

fn svg_open(out: &mut String, spec: &PlotSpec) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = spec.width,
        h = spec.height
    );
    let _ = writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>",
        spec.width, spec.height
    );
}

fn svg_frame(out: &mut String, spec: &PlotSpec, t: &AxisTransform) {
    let (x0, y0, w, h) = t.plot_box();
    let _ = writeln!(
        out,
        "<rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>"
    );
    // Axis extent labels and names.
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"start\">{:.3}</text>",
        x0, y0 + h + 16.0, t.x_min
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{:.3}</text>",
        x0 + w, y0 + h + 16.0, t.x_max
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{:.3}</text>",
        x0 - 4.0, y0 + h, t.y_min
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{:.3}</text>",
        x0 - 4.0, y0 + 10.0, t.y_max
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">PC-1</text>",
        x0 + w / 2.0, y0 + h + 34.0
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 {cx:.2} {cy:.2})\">PC-2</text>",
        x0 - 44.0, y0 + h / 2.0, cx = x0 - 44.0, cy = y0 + h / 2.0
    );
    if !spec.title.is_empty() {
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
            spec.width as f64 / 2.0,
            xml_escape(&spec.title)
        );
    }
}

/// Scatter plot of PC points: one circle marker per point.
pub fn render_era_scatter(points: &[[f64; 2]], spec: &PlotSpec) -> Result<String, VizError> {
    check_points(points)?;
    let t = AxisTransform::fit(points, spec);
    let mut out = String::new();
    svg_open(&mut out, spec);
    svg_frame(&mut out, spec, &t);
    for p in points {
        let (px, py) = t.to_px(*p);
        let _ = writeln!(
            out,
            "<circle class=\"pt\" cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"2\" fill=\"{SCATTER_MARKER_COLOR}\" fill-opacity=\"0.6\"/>"
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Flow plot: one arrow per shift record from its pre point to its post
/// point; the `spec.highlight_count` largest magnitudes are drawn in the
/// highlight color above everything else.
pub fn render_flow_plot(records: &[ShiftRecord], spec: &PlotSpec) -> Result<String, VizError> {
    let mut points = Vec::with_capacity(records.len() * 2);
    for r in records {
        points.push(r.pre);
        points.push(r.post);
    }
    check_points(&points)?;
    let t = AxisTransform::fit(&points, spec);

    let top = top_k_shifts(records, spec.highlight_count);
    let top_keys: HashSet<(u64, (i32, i32, i32))> = top
        .iter()
        .map(|r| (r.magnitude.to_bits(), r.pair.base_head.yzx_key()))
        .collect();
    let is_top =
        |r: &ShiftRecord| top_keys.contains(&(r.magnitude.to_bits(), r.pair.base_head.yzx_key()));

    let mut out = String::new();
    svg_open(&mut out, spec);
    let _ = writeln!(
        out,
        "<defs><marker id=\"ah\" markerWidth=\"6\" markerHeight=\"6\" refX=\"5\" refY=\"3\" orient=\"auto\"><path d=\"M0,0 L6,3 L0,6 z\" fill=\"context-stroke\"/></marker></defs>"
    );
    svg_frame(&mut out, spec, &t);

    let arrow = |out: &mut String, r: &ShiftRecord, color: &str, class: &str| {
        let (x1, y1) = t.to_px(r.pre);
        let (x2, y2) = t.to_px(r.post);
        let _ = writeln!(
            out,
            "<line class=\"{class}\" x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{color}\" stroke-width=\"1.2\" marker-end=\"url(#ah)\"/>"
        );
    };
    for r in records.iter().filter(|r| !is_top(r)) {
        arrow(&mut out, r, FLOW_STROKE_COLOR, "arrow");
    }
    for r in &top {
        arrow(&mut out, r, FLOW_HIGHLIGHT_COLOR, "arrow hl");
    }
    out.push_str("</svg>\n");
    Ok(out)
}
