//! Self-contained SVG line charts and heatmaps.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 78.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Clone, Debug, PartialEq)]
pub struct Line {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

impl Line {
    pub fn new(label: &str, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.to_string(),
            points,
            dashed: false,
        }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub lines: Vec<Line>,
    pub annotation: Option<String>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64, log: bool) -> String {
    let x = if log { 10f64.powf(v) } else { v };
    if x == 0.0 {
        "0".into()
    } else if x.abs() >= 1e4 || x.abs() < 1e-2 {
        format!("{x:.1e}")
    } else {
        format!("{}", (x * 1000.0).round() / 1000.0)
    }
}

impl Chart {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            ..Self::default()
        }
    }

    fn transform(&self, (x, y): (f64, f64)) -> Option<(f64, f64)> {
        let tx = if self.log_x { (x > 0.0).then(|| x.log10())? } else { x };
        let ty = if self.log_y { (y > 0.0).then(|| y.log10())? } else { y };
        (tx.is_finite() && ty.is_finite()).then_some((tx, ty))
    }

    pub fn render(&self) -> String {
        let series: Vec<Vec<(f64, f64)>> = self
            .lines
            .iter()
            .map(|l| l.points.iter().filter_map(|&p| self.transform(p)).collect())
            .collect();
        let all = series.iter().flatten();
        let (mut x0, mut x1, mut y0, mut y1) = all.fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
        );
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 - x0 <= 0.0 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if y1 - y0 <= 0.0 {
            let pad = if y0 == 0.0 { 1.0 } else { 0.1 * y0.abs() };
            y0 -= pad;
            y1 += pad;
        } else {
            let pad = 0.05 * (y1 - y0);
            y0 -= pad;
            y1 += pad;
        }
        let pw = WIDTH - MARGIN_L - MARGIN_R;
        let ph = HEIGHT - MARGIN_T - MARGIN_B;
        let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| MARGIN_T + (y1 - y) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r##"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##
        );
        for i in 0..=5 {
            let fx = x0 + (x1 - x0) * i as f64 / 5.0;
            let fy = y0 + (y1 - y0) * i as f64 / 5.0;
            let (px, py) = (sx(fx), sy(fy));
            let _ = writeln!(
                s,
                r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#333"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
                MARGIN_T + ph,
                MARGIN_T + ph + 5.0,
                MARGIN_T + ph + 19.0,
                tick_label(fx, self.log_x)
            );
            let _ = writeln!(
                s,
                r##"<line x1="{:.2}" y1="{py:.2}" x2="{MARGIN_L}" y2="{py:.2}" stroke="#333"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
                MARGIN_L - 5.0,
                MARGIN_L - 8.0,
                py + 4.0,
                tick_label(fy, self.log_y)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_L + pw / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            MARGIN_T + ph / 2.0,
            MARGIN_T + ph / 2.0,
            escape(&self.y_label)
        );
        for (i, (line, pts)) in self.lines.iter().zip(&series).enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let dash = if line.dashed { r#" stroke-dasharray="6 4""# } else { "" };
            let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(
                s,
                r#"<polyline class="series" data-label="{}" fill="none" stroke="{color}" stroke-width="1.6"{dash} points="{}"/>"#,
                escape(&line.label),
                path.join(" ")
            );
            if pts.len() == 1 || (self.log_x && self.log_y) {
                for &(x, y) in pts {
                    let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(x), sy(y));
                }
            }
            let ly = MARGIN_T + 14.0 + 16.0 * i as f64;
            let lx = MARGIN_L + pw - 150.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"{dash}/><text x="{:.2}" y="{ly:.2}">{}</text>"#,
                ly - 4.0,
                lx + 20.0,
                ly - 4.0,
                lx + 26.0,
                escape(&line.label)
            );
        }
        if let Some(a) = &self.annotation {
            let _ = writeln!(
                s,
                r#"<text class="annotation" x="{:.2}" y="{:.2}">{}</text>"#,
                MARGIN_L + 10.0,
                MARGIN_T + ph - 10.0,
                escape(a)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn colormap(t: f64) -> (u8, u8, u8) {
    // dark blue → teal → yellow
    let t = t.clamp(0.0, 1.0);
    let stops = [(0.0, (20.0, 24.0, 82.0)), (0.5, (32.0, 146.0, 140.0)), (1.0, (250.0, 230.0, 40.0))];
    let (a, b) = if t < 0.5 { (stops[0], stops[1]) } else { (stops[1], stops[2]) };
    let u = (t - a.0) / (b.0 - a.0);
    let mix = |p: f64, q: f64| (p + (q - p) * u).round() as u8;
    (mix(a.1 .0, b.1 .0), mix(a.1 .1, b.1 .1), mix(a.1 .2, b.1 .2))
}

/// Phase-space density as a raster of rects (x horizontal, v vertical),
/// downsampled to at most 128 × 128 blocks.
pub fn heatmap(f: &PhaseGrid<f64>, title: &str) -> String {
    let (nx, nv) = (f.nx(), f.nv());
    let bx = nx.div_ceil(128);
    let bv = nv.div_ceil(128);
    let (cx, cv) = (nx.div_ceil(bx), nv.div_ceil(bv));
    let mut blocks = vec![0.0; cx * cv];
    for j in 0..nx {
        for k in 0..nv {
            blocks[(j / bx) * cv + k / bv] += f.get(j, k) / (bx * bv) as f64;
        }
    }
    let vmax = blocks.iter().copied().fold(0.0, f64::max);
    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let (w, h) = (pw / cx as f64, ph / cv as f64);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12" shape-rendering="crispEdges">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{} (t = {:.4}, max f = {:.4e})</text>"#,
        WIDTH / 2.0,
        escape(title),
        f.t(),
        vmax
    );
    for a in 0..cx {
        for b in 0..cv {
            let val = blocks[a * cv + b];
            let (r, g, bl) = colormap(if vmax > 0.0 { val / vmax } else { 0.0 });
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({r},{g},{bl})"/>"#,
                MARGIN_L + a as f64 * w,
                MARGIN_T + (cv - 1 - b) as f64 * h,
                w + 0.05,
                h + 0.05
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">x ∈ [-{:.3}, {:.3}]</text>"#,
        MARGIN_L + pw / 2.0,
        HEIGHT - 14.0,
        f.lx(),
        f.lx()
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{0:.2}" text-anchor="middle" transform="rotate(-90 16 {0:.2})">v ∈ [-{1:.3}, {1:.3}]</text>"#,
        MARGIN_T + ph / 2.0,
        f.lv()
    );
    s.push_str("</svg>\n");
    s
}

pub fn write_svg(path: &Path, svg: &str) -> Result<()> {
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}
