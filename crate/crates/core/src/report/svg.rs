//! Minimal line charts as standalone SVG documents on a 640x480 canvas.

use std::fmt::Write;

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stroke {
    Solid,
    Dashed,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    /// Optional `(lower, upper)` envelope aligned with `points`.
    pub band: Option<Vec<(f64, f64)>>,
    pub stroke: Stroke,
}

impl Series {
    pub fn line(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            points,
            band: None,
            stroke: Stroke::Solid,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Round step for roughly five ticks over `span`.
fn tick_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.0 {
        2.0
    } else if norm < 7.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = tick_step(hi - lo);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{:.4}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-12 * (1.0 + lo.abs()) {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

impl Chart {
    pub fn render(&self) -> String {
        let xs = self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
        let (x0, x1) = {
            let (lo, hi) = range(xs);
            let first = self.series.iter().flat_map(|s| s.points.first()).map(|p| p.0).fold(f64::INFINITY, f64::min);
            let last = self.series.iter().flat_map(|s| s.points.last()).map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
            if first.is_finite() && last > first { (first, last) } else { (lo, hi) }
        };
        let ys = self.series.iter().flat_map(|s| {
            s.points
                .iter()
                .map(|p| p.1)
                .chain(s.band.iter().flatten().flat_map(|b| [b.0, b.1]))
                .collect::<Vec<_>>()
        });
        let (y0, y1) = range(ys);
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

        let mut o = String::new();
        let _ = writeln!(
            o,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="640" height="480" viewBox="0 0 640 480" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(o, r#"<rect width="640" height="480" fill="white"/>"#);
        let _ = writeln!(
            o,
            r#"<text x="320" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            escape(&self.title)
        );
        for t in ticks(y0, y1) {
            let y = sy(t);
            let _ = writeln!(
                o,
                r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##,
                LEFT + pw
            );
            let _ = writeln!(
                o,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                y + 4.0,
                fmt_tick(t)
            );
        }
        for t in ticks(x0, x1) {
            let x = sx(t);
            let _ = writeln!(
                o,
                r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#444"/>"##,
                TOP + ph,
                TOP + ph + 5.0
            );
            let _ = writeln!(
                o,
                r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                TOP + ph + 18.0,
                fmt_tick(t)
            );
        }
        if y0 < 0.0 && y1 > 0.0 {
            let y = sy(0.0);
            let _ = writeln!(
                o,
                r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#888" stroke-dasharray="2,3"/>"##,
                LEFT + pw
            );
        }
        let _ = writeln!(
            o,
            r##"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="#444"/>"##
        );
        let _ = writeln!(
            o,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            o,
            r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );

        for (i, s) in self.series.iter().enumerate() {
            let colour = PALETTE[i % PALETTE.len()];
            if let Some(band) = &s.band {
                let mut d = String::new();
                for (k, (p, b)) in s.points.iter().zip(band).enumerate() {
                    let _ = write!(d, "{}{:.2},{:.2} ", if k == 0 { "M" } else { "L" }, sx(p.0), sy(b.1));
                }
                for (p, b) in s.points.iter().zip(band).rev() {
                    let _ = write!(d, "L{:.2},{:.2} ", sx(p.0), sy(b.0));
                }
                let _ = writeln!(
                    o,
                    r#"<path d="{}Z" fill="{colour}" fill-opacity="0.2" stroke="none"/>"#,
                    d
                );
            }
            let pts: Vec<String> = s
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1)))
                .collect();
            let dash = match s.stroke {
                Stroke::Solid => "",
                Stroke::Dashed => r#" stroke-dasharray="6,4""#,
            };
            let _ = writeln!(
                o,
                r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="2"{dash}/>"#,
                pts.join(" ")
            );
            let ly = TOP + 16.0 + 16.0 * i as f64;
            let lx = LEFT + pw - 150.0;
            let _ = writeln!(
                o,
                r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{colour}" stroke-width="2"{dash}/>"#,
                ly - 4.0,
                lx + 20.0,
                ly - 4.0
            );
            let _ = writeln!(o, r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#, lx + 26.0, escape(&s.name));
        }
        o.push_str("</svg>\n");
        o
    }
}
