//! Minimal self-contained SVG line plots for the experiment commands: a
//! fixed-size canvas, one polyline per series, optional horizontal
//! reference lines, and a legend. No external assets or dependencies.

use std::fmt::Write as _;

/// One named polyline.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// A line chart with labeled axes.
#[derive(Debug, Clone)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub h_lines: Vec<f64>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.into()
    }
}

impl LinePlot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        LinePlot {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
            h_lines: Vec::new(),
        }
    }

    pub fn add_series(&mut self, label: &str, points: Vec<(f64, f64)>) {
        self.series.push(Series { label: label.into(), points });
    }

    pub fn add_h_line(&mut self, y: f64) {
        self.h_lines.push(y);
    }

    fn data_ranges(&self) -> ((f64, f64), (f64, f64)) {
        let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in &self.series {
            for &(x, y) in &s.points {
                if x.is_finite() && y.is_finite() {
                    x_min = x_min.min(x);
                    x_max = x_max.max(x);
                    y_min = y_min.min(y);
                    y_max = y_max.max(y);
                }
            }
        }
        for &y in &self.h_lines {
            if y.is_finite() {
                y_min = y_min.min(y);
                y_max = y_max.max(y);
            }
        }
        if !x_min.is_finite() {
            (x_min, x_max) = (0.0, 1.0);
        }
        if !y_min.is_finite() {
            (y_min, y_max) = (0.0, 1.0);
        }
        if x_min == x_max {
            let pad = if x_min == 0.0 { 1.0 } else { x_min.abs() * 0.1 };
            (x_min, x_max) = (x_min - pad, x_max + pad);
        }
        if y_min == y_max {
            let pad = if y_min == 0.0 { 1.0 } else { y_min.abs() * 0.1 };
            (y_min, y_max) = (y_min - pad, y_max + pad);
        }
        let x_pad = (x_max - x_min) * 0.04;
        let y_pad = (y_max - y_min) * 0.06;
        ((x_min - x_pad, x_max + x_pad), (y_min - y_pad, y_max + y_pad))
    }

    /// Renders the chart as a standalone SVG document.
    pub fn to_svg(&self) -> String {
        let ((x_min, x_max), (y_min, y_max)) = self.data_ranges();
        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let sx = |x: f64| MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w;
        let sy = |y: f64| MARGIN_TOP + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            escape_xml(&self.title)
        );

        // Axes and ticks.
        let x0 = MARGIN_LEFT;
        let x1 = WIDTH - MARGIN_RIGHT;
        let y0 = MARGIN_TOP;
        let y1 = HEIGHT - MARGIN_BOTTOM;
        let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="black"/>"#);
        let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);
        for i in 0..=4 {
            let fx = x_min + (x_max - x_min) * i as f64 / 4.0;
            let px = sx(fx);
            let _ = writeln!(svg, r#"<line x1="{px:.1}" y1="{y1}" x2="{px:.1}" y2="{:.1}" stroke="black"/>"#, y1 + 5.0);
            let _ = writeln!(
                svg,
                r#"<text x="{px:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
                y1 + 18.0,
                fmt_tick(fx)
            );
            let fy = y_min + (y_max - y_min) * i as f64 / 4.0;
            let py = sy(fy);
            let _ = writeln!(svg, r#"<line x1="{:.1}" y1="{py:.1}" x2="{x0}" y2="{py:.1}" stroke="black"/>"#, x0 - 5.0);
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
                x0 - 8.0,
                py + 4.0,
                fmt_tick(fy)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 12.0,
            escape_xml(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="16" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape_xml(&self.y_label)
        );

        for &h in &self.h_lines {
            if h.is_finite() {
                let py = sy(h);
                let _ = writeln!(
                    svg,
                    r##"<line x1="{x0}" y1="{py:.1}" x2="{x1}" y2="{py:.1}" stroke="#888888" stroke-dasharray="6 4"/>"##
                );
            }
        }

        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let finite: Vec<(f64, f64)> = s
                .points
                .iter()
                .copied()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .collect();
            if finite.is_empty() {
                continue;
            }
            let mut path = String::new();
            for (x, y) in &finite {
                let _ = write!(path, "{:.2},{:.2} ", sx(*x), sy(*y));
            }
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.8" points="{}"/>"#,
                path.trim_end()
            );
            for (x, y) in &finite {
                let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="2.4" fill="{color}"/>"#, sx(*x), sy(*y));
            }
        }

        // Legend, top-right corner of the plot area.
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let ly = y0 + 14.0 + 16.0 * i as f64;
            let _ = writeln!(
                svg,
                r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
                x1 - 120.0,
                x1 - 96.0
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11">{}</text>"#,
                x1 - 90.0,
                ly + 4.0,
                escape_xml(&s.label)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}
