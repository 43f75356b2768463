//! Four-panel SVG overlay of limit curves, drawn from plain geometry.

use std::fmt::Write as _;

use angelesco_core::LimitCurve;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 28.0;
const MARGIN_B: f64 = 40.0;
const LEGEND_H: f64 = 36.0;
const COLORS: [&str; 6] = [
    "#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400", "#555555",
];
const DASHES: [&str; 3] = ["", "8 4", "2 3"];
const TITLES: [&str; 4] = ["A1(s)", "A2(s)", "B1(s)", "B2(s)"];

/// One labelled curve.
pub struct Series<'a> {
    pub label: String,
    pub curve: &'a LimitCurve,
}

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / 5.0;
    let p = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * p)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * p);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Renders the panels. Curves whose grid differs from the first one are
/// resampled onto it; each such case is noted in a leading comment.
pub fn render(series: &[Series<'_>]) -> String {
    let mut warnings = Vec::new();
    let base = series.first().map(|s| s.curve.grid()).unwrap_or_default();
    let sampled: Vec<Vec<(f64, [f64; 4])>> = series
        .iter()
        .map(|ser| {
            if ser.curve.grid() == base {
                ser.curve.points.iter().map(|p| (p.s, p.values())).collect()
            } else {
                warnings.push(format!(
                    "{} resampled onto the grid of {}",
                    ser.label, series[0].label
                ));
                base.iter()
                    .filter_map(|&s| ser.curve.interpolate(s).map(|p| (s, p.values())))
                    .collect()
            }
        })
        .collect();

    let width = 2.0 * PANEL_W;
    let height = 2.0 * PANEL_H + LEGEND_H;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    for w in &warnings {
        let _ = writeln!(out, "<!-- warning: {w} -->");
    }
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );

    for (j, title) in TITLES.iter().enumerate() {
        let ox = (j % 2) as f64 * PANEL_W;
        let oy = (j / 2) as f64 * PANEL_H;
        let (x0, x1) = (ox + MARGIN_L, ox + PANEL_W - MARGIN_R);
        let (y0, y1) = (oy + MARGIN_T, oy + PANEL_H - MARGIN_B);

        let vals = sampled.iter().flatten().map(|(_, v)| v[j]);
        let (mut lo, mut hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.05 * (hi - lo);
        let (lo, hi) = (lo - pad, hi + pad);
        let px = |s: f64| x0 + s * (x1 - x0);
        let py = |v: f64| y1 - (v - lo) / (hi - lo) * (y1 - y0);

        let _ = writeln!(out, r#"<g id="panel-{}">"#, title.trim_end_matches("(s)"));
        let _ = writeln!(
            out,
            r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black" stroke-width="0.8"/>"#,
            x1 - x0,
            y1 - y0
        );
        for t in nice_ticks(0.0, 1.0) {
            let x = px(t);
            let _ = writeln!(
                out,
                r#"<line x1="{x:.2}" y1="{y1:.2}" x2="{x:.2}" y2="{:.2}" stroke="black" stroke-width="0.8"/>"#,
                y1 + 4.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                y1 + 16.0,
                tick_label(t)
            );
        }
        for t in nice_ticks(lo, hi) {
            let y = py(t);
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black" stroke-width="0.8"/>"#,
                x0 - 4.0
            );
            let _ = writeln!(
                out,
                r##"<line x1="{x0:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}" stroke="#dddddd" stroke-width="0.5"/>"##
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                x0 - 6.0,
                y + 4.0,
                tick_label(t)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">{title}</text>"#,
            0.5 * (x0 + x1),
            oy + 18.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">s</text>"#,
            0.5 * (x0 + x1),
            y1 + 32.0
        );

        for (k, pts) in sampled.iter().enumerate() {
            let coords: Vec<String> = pts
                .iter()
                .map(|(s, v)| format!("{:.2},{:.2}", px(*s), py(v[j])))
                .collect();
            let dash = DASHES[k % DASHES.len()];
            let dash_attr = if dash.is_empty() {
                String::new()
            } else {
                format!(r#" stroke-dasharray="{dash}""#)
            };
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.4"{dash_attr} points="{}"/>"#,
                COLORS[k % COLORS.len()],
                coords.join(" ")
            );
        }
        let _ = writeln!(out, "</g>");
    }

    let ly = 2.0 * PANEL_H + 20.0;
    let _ = writeln!(out, r#"<g id="legend">"#);
    for (k, ser) in series.iter().enumerate() {
        let lx = MARGIN_L + 150.0 * k as f64;
        let dash = DASHES[k % DASHES.len()];
        let dash_attr = if dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{dash}""#)
        };
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"{dash_attr}/>"#,
            lx + 28.0,
            COLORS[k % COLORS.len()]
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 34.0,
            ly + 4.0,
            escape(&ser.label)
        );
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
