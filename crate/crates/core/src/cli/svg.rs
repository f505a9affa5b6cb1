//! Self-contained 800×500 SVG line plots.

use std::fmt::Write;

use super::output::read_csv;
use super::{EVAL_HEADER, SWEEP_HEADER};
use crate::error::{Error, Result};
use crate::spaces::SpaceInstance;

const W: f64 = 800.0;
const H: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub(super) struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<(String, Vec<(f64, f64)>)>,
    /// Dashed horizontal reference lines.
    pub levels: Vec<(String, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * (1.0 + hi.abs()) {
        let pad = 0.5 * (1.0 + hi.abs()) * 0.1;
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

impl Plot {
    pub fn render(&self) -> String {
        let (x0, x1) = range(self.series.iter().flat_map(|(_, p)| p.iter().map(|q| q.0)));
        let (y0, y1) = range(
            self.series
                .iter()
                .flat_map(|(_, p)| p.iter().map(|q| q.1))
                .chain(self.levels.iter().map(|l| l.1)),
        );
        let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r##"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 800 500" width="800" height="500" font-family="sans-serif" font-size="12">"##
        );
        let _ = writeln!(s, r##"<rect x="0" y="0" width="800" height="500" fill="white"/>"##);
        let _ = writeln!(
            s,
            r##"<text x="400" y="28" text-anchor="middle" font-size="16">{}</text>"##,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333" stroke-width="1"/>"##
        );
        for k in 0..=4 {
            let fx = x0 + (x1 - x0) * k as f64 / 4.0;
            let fy = y0 + (y1 - y0) * k as f64 / 4.0;
            let (px, py) = (sx(fx), sy(fy));
            let _ = writeln!(
                s,
                r##"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{:.2}" stroke="#ddd"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
                TOP + ph,
                TOP + ph + 18.0,
                tick(fx)
            );
            let _ = writeln!(
                s,
                r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
                LEFT + pw,
                LEFT - 6.0,
                py + 4.0,
                tick(fy)
            );
        }
        let _ = writeln!(
            s,
            r##"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            LEFT + pw / 2.0,
            H - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r##"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"##,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );
        for (label, y) in &self.levels {
            let py = sy(*y);
            let _ = writeln!(
                s,
                r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#555" stroke-dasharray="6 4"/><text x="{:.2}" y="{:.2}" text-anchor="end" fill="#555">{}</text>"##,
                LEFT + pw,
                LEFT + pw - 4.0,
                py - 5.0,
                escape(label)
            );
        }
        for (i, (label, pts)) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let path: Vec<String> = pts
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                s,
                r##"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"##,
                path.join(" ")
            );
            for p in &path {
                let (cx, cy) = p.split_once(',').expect("formatted pairs");
                let _ = writeln!(s, r##"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"##);
            }
            let ly = TOP + 16.0 + 16.0 * i as f64;
            let _ = writeln!(
                s,
                r##"<text x="{:.2}" y="{ly:.2}" fill="{color}">{}</text>"##,
                LEFT + 10.0,
                escape(label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn num(field: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Validation(format!("`{field}` is not a number")))
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).expect("header checked")
}

/// Plot of a CSV written by `eval` (value along the listed points, one
/// series per exponent) or `sweep` (normalized value against log₂ p with
/// the maximal function as a dashed level).
pub(super) fn from_csv(text: &str) -> Result<String> {
    let (header, rows) = read_csv(text)?;
    if header == SWEEP_HEADER {
        let mut pts = Vec::new();
        let mut level = f64::NAN;
        for r in &rows {
            let p = num(&r[0])?;
            level = num(&r[column(&header, "maximal")])?;
            if p.is_finite() {
                pts.push((p.log2(), num(&r[column(&header, "normalized")])?));
            }
        }
        let mut plot = Plot {
            title: "normalized integral-function against log2 p".into(),
            x_label: "log2 p".into(),
            y_label: "I / ||w||^(1/p)".into(),
            series: vec![("normalized".into(), pts)],
            levels: Vec::new(),
        };
        if level.is_finite() {
            plot.levels.push((format!("Mf = {}", tick(level)), level));
        }
        return Ok(plot.render());
    }
    if header == EVAL_HEADER {
        let mut series: Vec<(String, Vec<(f64, f64)>, Option<String>)> = Vec::new();
        for r in &rows {
            let space: SpaceInstance = r[0].parse()?;
            let x = space.parse_point(&r[4])?;
            let v = num(&r[5])?;
            let label = format!("p = {}", r[3]);
            let i = match series.iter().position(|s| s.0 == label) {
                Some(i) => i,
                None => {
                    series.push((label, Vec::new(), None));
                    series.len() - 1
                }
            };
            let entry = &mut series[i];
            let t = match (entry.1.last(), &entry.2) {
                (Some(&(t, _)), Some(prev)) => t + space.distance(&space.parse_point(prev)?, &x)?,
                _ => 0.0,
            };
            entry.1.push((t, v));
            entry.2 = Some(r[4].clone());
        }
        let title = rows
            .first()
            .map(|r| format!("{} on {} with weight {}", r[1], r[0], r[2]))
            .unwrap_or_default();
        return Ok(Plot {
            title,
            x_label: "arclength along the points".into(),
            y_label: "value".into(),
            series: series.into_iter().map(|(l, p, _)| (l, p)).collect(),
            levels: Vec::new(),
        }
        .render());
    }
    Err(Error::Validation(format!(
        "unrecognized CSV header `{}`; expected the output of eval or sweep",
        header.join(",")
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_plots_carry_the_level() {
        let csv = "p,i_value,normalized,gap_to_max,maximal\n1,0.5,0.5,0.5,1\n2,0.8,0.8,0.2,1\ninf,1,1,0,1\n";
        let svg = from_csv(csv).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains(r##"viewBox="0 0 800 500""##));
        assert!(svg.contains("stroke-dasharray"));
        assert_eq!(svg.matches("<circle").count(), 2);
    }

    #[test]
    fn unknown_tables_are_rejected() {
        assert!(matches!(from_csv("a,b\n1,2\n"), Err(Error::Validation(_))));
    }
}
