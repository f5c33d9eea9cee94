//! Static SVG line chart of normalized q-cost summaries against n.

use std::fmt::Write as _;

use crate::error::{invalid, Result};
use crate::experiments::SummaryRow;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub const X_LABEL: &str = "n";
pub const Y_LABEL: &str = "cost / n^{1\u{2212}q/d}";

/// Padded `[lo, hi]`, widened when the data span a single value.
fn span(lo: f64, hi: f64, pad: f64) -> (f64, f64) {
    if hi > lo {
        let w = (hi - lo) * pad;
        (lo - w, hi + w)
    } else {
        let w = if lo == 0.0 { 0.5 } else { lo.abs() * 0.1 };
        (lo - w, hi + w)
    }
}

fn fmt_num(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e5) {
        format!("{v:.2e}")
    } else {
        format!("{:.4}", v).trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// One polyline with markers per q, on a log-scaled n axis.
pub fn render_svg(rows: &[SummaryRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(invalid("nothing to plot"));
    }
    if rows.iter().any(|r| r.n == 0 || !r.mean.is_finite()) {
        return Err(invalid("summary rows need n > 0 and finite means"));
    }
    let mut qs: Vec<f64> = Vec::new();
    for r in rows {
        if !qs.contains(&r.q) {
            qs.push(r.q);
        }
    }
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();

    let lx = |n: usize| (n as f64).log10();
    let (x0, x1) = span(lx(ns[0]), lx(*ns.last().unwrap()), 0.05);
    let ymin = rows.iter().map(|r| r.mean).fold(f64::INFINITY, f64::min);
    let ymax = rows.iter().map(|r| r.mean).fold(f64::NEG_INFINITY, f64::max);
    let (y0, y1) = span(ymin, ymax, 0.1);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |n: usize| LEFT + (lx(n) - x0) / (x1 - x0) * pw;
    let sy = |v: f64| TOP + (y1 - v) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );

    for &n in &ns {
        let x = sx(n);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{n}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0
        );
    }
    for k in 0..=4 {
        let v = y0 + (y1 - y0) * k as f64 / 4.0;
        let y = sy(v);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            fmt_num(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text class="x-label" x="{:.2}" y="{:.2}" text-anchor="middle">{X_LABEL}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text class="y-label" x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{Y_LABEL}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    for (k, &q) in qs.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut pts: Vec<(usize, f64)> = rows.iter().filter(|r| r.q == q).map(|r| (r.n, r.mean)).collect();
        pts.sort_by_key(|&(n, _)| n);
        let coords: Vec<String> = pts.iter().map(|&(n, v)| format!("{:.2},{:.2}", sx(n), sy(v))).collect();
        let _ = writeln!(s, r#"<g class="series" data-q="{q}">"#);
        if coords.len() > 1 {
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                coords.join(" ")
            );
        }
        for &(n, v) in &pts {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{color}"/>"#, sx(n), sy(v));
        }
        let ly = TOP + 10.0 + 20.0 * k as f64;
        let lx0 = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx0:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">q = {q}</text>"#,
            lx0 + 25.0,
            lx0 + 30.0,
            ly + 4.0
        );
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    Ok(s)
}
