//! Minimal SVG line chart of the junction gradients: `ΔTp` red, `ΔTs` black.
//! Output depends only on the input numbers, so identical CSVs give
//! byte-identical files.

use std::fmt::Write as _;

use crate::output::GradientSeries;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 5;

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if lo > hi {
        return None;
    }
    if hi - lo < 1e-12 * hi.abs().max(1.0) {
        let pad = 0.5 * hi.abs().max(1.0);
        return Some((lo - pad, hi + pad));
    }
    Some((lo, hi))
}

/// Polyline runs of one series, split wherever a value is not finite.
fn runs(frame: &Frame, t: &[f64], v: &[f64]) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for (&x, &y) in t.iter().zip(v) {
        if x.is_finite() && y.is_finite() {
            if !cur.is_empty() {
                cur.push(' ');
            }
            let _ = write!(cur, "{:.2},{:.2}", frame.px(x), frame.py(y));
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-3) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

pub fn render_svg(series: &GradientSeries, title: &str) -> String {
    let x = range(series.t.iter().copied()).unwrap_or((0.0, 1.0));
    let y = range(series.dtp.iter().chain(&series.dts).copied()).unwrap_or((0.0, 1.0));
    let frame = Frame { x, y };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    // axes and ticks
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(s, r##"<g stroke="#444" stroke-width="1" fill="none">"##);
    let _ = writeln!(s, r#"<path d="M{x0:.2},{y0:.2} L{x0:.2},{y1:.2} L{x1:.2},{y1:.2}"/>"#);
    for k in 0..=TICKS {
        let f = k as f64 / TICKS as f64;
        let tx = frame.px(x.0 + f * (x.1 - x.0));
        let ty = frame.py(y.0 + f * (y.1 - y.0));
        let _ = writeln!(s, r#"<line x1="{tx:.2}" y1="{y1:.2}" x2="{tx:.2}" y2="{:.2}"/>"#, y1 + 5.0);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{ty:.2}" x2="{x0:.2}" y2="{ty:.2}"/>"#, x0 - 5.0);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g font-family="sans-serif" font-size="11" fill="#222">"##);
    for k in 0..=TICKS {
        let f = k as f64 / TICKS as f64;
        let (vx, vy) = (x.0 + f * (x.1 - x.0), y.0 + f * (y.1 - y.0));
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            frame.px(vx),
            y1 + 18.0,
            label(vx)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 8.0,
            frame.py(vy) + 4.0,
            label(vy)
        );
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"#, (x0 + x1) / 2.0, HEIGHT - 10.0);
    let _ = writeln!(s, "</g>");

    for (name, values, color) in [("dTp", &series.dtp, "red"), ("dTs", &series.dts, "black")] {
        let _ = writeln!(s, r#"<g class="{name}" stroke="{color}" stroke-width="1.5" fill="none">"#);
        for pts in runs(&frame, &series.t, values) {
            let _ = writeln!(s, r#"<polyline points="{pts}"/>"#);
        }
        let _ = writeln!(s, "</g>");
    }

    // legend
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="12">"#);
    for (i, (name, color)) in [("ΔTp", "red"), ("ΔTs", "black")].iter().enumerate() {
        let ly = TOP + 15.0 + 18.0 * i as f64;
        let lx = x1 - 90.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 25.0
        );
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{name}</text>"#, lx + 32.0, ly + 4.0);
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_rows() -> GradientSeries {
        GradientSeries { t: vec![0.0, 1.0], dtp: vec![1.0, 2.0], dts: vec![1.0, 0.5] }
    }

    #[test]
    fn one_segment_per_series() {
        let svg = render_svg(&two_rows(), "x");
        assert_eq!(svg.matches("<polyline").count(), 2);
        let red = svg.split(r#"stroke="red" stroke-width="1.5""#).nth(1).unwrap();
        let pts = red.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(pts.split(' ').count(), 2);
    }

    #[test]
    fn deterministic() {
        assert_eq!(render_svg(&two_rows(), "a & b"), render_svg(&two_rows(), "a & b"));
        assert!(render_svg(&two_rows(), "a & b").contains("a &amp; b"));
    }

    #[test]
    fn gaps_split_lines() {
        let g = GradientSeries { t: vec![0.0, 1.0, 2.0, 3.0], dtp: vec![1.0, f64::INFINITY, 2.0, 3.0], dts: vec![0.0; 4] };
        let svg = render_svg(&g, "");
        assert_eq!(svg.matches("<polyline").count(), 3);
    }
}
