//! Minimal SVG 1.1 plots. Output depends only on the inputs, so identical
//! data gives identical bytes.

use std::fmt::Write;

use xtalk_core::Record;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    Line,
    Heatmap,
}

/// Which fitted quantity a record plot shows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Theta,
    Loss,
    Influence,
}

impl Metric {
    fn label(self) -> &'static str {
        match self {
            Metric::Theta => "theta (rad)",
            Metric::Loss => "fit loss",
            Metric::Influence => "influence norm",
        }
    }

    fn of(self, r: &Record) -> Option<f64> {
        match self {
            Metric::Theta => r.theta,
            Metric::Loss => r.loss,
            Metric::Influence => r.influence_norm,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Cell values indexed `[row][column]`; rows run top to bottom.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub x_labels: Vec<String>,
    pub y_labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-2..1e4).contains(&a) {
        let s = format!("{x:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".into() } else { s.into() }
    } else {
        format!("{x:.2e}")
    }
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo <= f64::EPSILON * lo.abs().max(hi.abs()).max(1e-300) {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.5 };
        (lo - pad, hi + pad)
    } else {
        (lo, hi)
    }
}

fn frame(out: &mut String, title: &str, xlabel: &str, ylabel: &str) {
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(out, "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>", W / 2.0, esc(title));
    let cx = LEFT + (W - LEFT - RIGHT) / 2.0;
    let _ = writeln!(out, "<text x=\"{cx:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>", H - 14.0, esc(xlabel));
    let cy = TOP + (H - TOP - BOTTOM) / 2.0;
    let _ = writeln!(
        out,
        "<text x=\"18\" y=\"{cy:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {cy:.1})\">{}</text>",
        esc(ylabel)
    );
}

/// One polyline per series over shared linear axes.
pub fn line_chart(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let mut out = String::new();
    frame(&mut out, title, xlabel, ylabel);
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let (x0, x1) = span(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = span(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let _ = writeln!(out, "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">");
    let _ = writeln!(out, "<line x1=\"{LEFT:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\"/>", TOP + ph, LEFT + pw, TOP + ph);
    let _ = writeln!(out, "<line x1=\"{LEFT:.1}\" y1=\"{TOP:.1}\" x2=\"{LEFT:.1}\" y2=\"{:.1}\"/>", TOP + ph);
    out.push_str("</g>\n<g class=\"ticks\" text-anchor=\"middle\">\n");
    for k in 0..TICKS {
        let f = k as f64 / (TICKS - 1) as f64;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let _ = writeln!(out, "<text x=\"{:.1}\" y=\"{:.1}\">{}</text>", sx(xv), TOP + ph + 18.0, tick(xv));
        let _ = writeln!(out, "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>", LEFT - 6.0, sy(yv) + 4.0, tick(yv));
    }
    out.push_str("</g>\n");

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"><title>{}</title></polyline>",
            pts.join(" "),
            esc(&s.label)
        );
        let ly = TOP + 14.0 + 18.0 * i as f64;
        let lx = W - RIGHT + 12.0;
        let _ = writeln!(out, "<line x1=\"{lx:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>", lx + 18.0);
        let _ = writeln!(out, "<text x=\"{:.1}\" y=\"{:.1}\">{}</text>", lx + 24.0, ly + 4.0, esc(&s.label));
    }
    out.push_str("</svg>\n");
    out
}

fn shade(f: f64) -> String {
    let f = if f.is_finite() { f.clamp(0.0, 1.0) } else { 0.0 };
    let c = |lo: f64, hi: f64| (lo + (hi - lo) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", c(247.0, 8.0), c(251.0, 48.0), c(255.0, 107.0))
}

/// One filled rect per cell, shaded linearly from the grid minimum to maximum.
pub fn heatmap(title: &str, xlabel: &str, ylabel: &str, grid: &Grid) -> String {
    let mut out = String::new();
    frame(&mut out, title, xlabel, ylabel);
    let rows = grid.values.len();
    let cols = grid.values.iter().map(Vec::len).max().unwrap_or(0);
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let (lo, hi) = span(grid.values.iter().flatten().copied());
    let cw = pw / cols.max(1) as f64;
    let ch = ph / rows.max(1) as f64;

    out.push_str("<g class=\"cells\" stroke=\"white\" stroke-width=\"0.5\">\n");
    for (r, row) in grid.values.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            let _ = writeln!(
                out,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{cw:.2}\" height=\"{ch:.2}\" fill=\"{}\"><title>{}</title></rect>",
                LEFT + c as f64 * cw,
                TOP + r as f64 * ch,
                shade((v - lo) / (hi - lo)),
                tick(v)
            );
        }
    }
    out.push_str("</g>\n<g class=\"labels\" text-anchor=\"middle\">\n");
    for (c, l) in grid.x_labels.iter().enumerate().take(cols) {
        let _ = writeln!(out, "<text x=\"{:.2}\" y=\"{:.1}\">{}</text>", LEFT + (c as f64 + 0.5) * cw, TOP + ph + 18.0, esc(l));
    }
    for (r, l) in grid.y_labels.iter().enumerate().take(rows) {
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            LEFT - 6.0,
            TOP + (r as f64 + 0.5) * ch + 4.0,
            esc(l)
        );
    }
    out.push_str("</g>\n");
    let lx = W - RIGHT + 16.0;
    let _ = writeln!(out, "<text x=\"{lx:.1}\" y=\"{:.1}\">max {}</text>", TOP + 12.0, tick(hi));
    let _ = writeln!(out, "<rect x=\"{lx:.1}\" y=\"{:.1}\" width=\"16\" height=\"16\" fill=\"{}\"/>", TOP + 20.0, shade(1.0));
    let _ = writeln!(out, "<rect x=\"{lx:.1}\" y=\"{:.1}\" width=\"16\" height=\"16\" fill=\"{}\"/>", TOP + 40.0, shade(0.0));
    let _ = writeln!(out, "<text x=\"{lx:.1}\" y=\"{:.1}\">min {}</text>", TOP + 72.0, tick(lo));
    out.push_str("</svg>\n");
    out
}

/// Sweep records as a chart. Line: one series per `config_id` against the
/// swept value. Heatmap: rows are `config_id`s, columns the distinct swept
/// values in first-seen order.
pub fn render_records(records: &[Record], kind: PlotKind, metric: Metric, title: &str) -> String {
    let mut ids: Vec<&str> = Vec::new();
    for r in records {
        if !ids.contains(&r.config_id.as_str()) {
            ids.push(&r.config_id);
        }
    }
    let xlabel = records.first().map_or("value", |r| r.swept_name.as_str());
    match kind {
        PlotKind::Line => {
            let series: Vec<Series> = ids
                .iter()
                .map(|id| Series {
                    label: (*id).to_string(),
                    points: records
                        .iter()
                        .filter(|r| r.config_id == *id)
                        .filter_map(|r| metric.of(r).map(|y| (r.swept_value, y)))
                        .collect(),
                })
                .collect();
            line_chart(title, xlabel, metric.label(), &series)
        }
        PlotKind::Heatmap => {
            let mut xs: Vec<f64> = Vec::new();
            for r in records {
                if !xs.contains(&r.swept_value) {
                    xs.push(r.swept_value);
                }
            }
            let values = ids
                .iter()
                .map(|id| {
                    xs.iter()
                        .map(|&x| {
                            records
                                .iter()
                                .find(|r| r.config_id == *id && r.swept_value == x)
                                .and_then(|r| metric.of(r))
                                .unwrap_or(f64::NAN)
                        })
                        .collect()
                })
                .collect();
            let grid = Grid {
                x_labels: xs.iter().map(|&x| tick(x)).collect(),
                y_labels: ids.iter().map(|s| s.to_string()).collect(),
                values,
            };
            heatmap(title, xlabel, metric.label(), &grid)
        }
    }
}

/// Writes [`render_records`] to `path`.
pub fn render_svg(records: &[Record], kind: PlotKind, metric: Metric, path: &std::path::Path) -> std::io::Result<()> {
    std::fs::write(path, render_records(records, kind, metric, ""))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks() {
        assert_eq!(tick(0.0), "0");
        assert_eq!(tick(0.25), "0.25");
        assert_eq!(tick(90.0), "90");
        assert_eq!(tick(1.5e-6), "1.50e-6");
    }

    #[test]
    fn escapes_labels() {
        let s = line_chart("a<b", "x", "y", &[]);
        assert!(s.contains("a&lt;b"));
    }

    #[test]
    fn degenerate_span_is_padded() {
        let (lo, hi) = span([3.0, 3.0].into_iter());
        assert!(lo < 3.0 && hi > 3.0);
    }
}
