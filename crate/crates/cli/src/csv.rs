//! `s,A1,A2,B1,B2` tables with 12 significant digits in positional notation.

use std::fmt::Write as _;

use angelesco_core::{LimitCurve, LimitPoint, Method};

use crate::error::CliError;

pub const HEADER: &str = "s,A1,A2,B1,B2";

/// `x` with 12 significant digits and no exponent.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (11 - mag).clamp(0, 340) as usize;
    let s = format!("{x:.decimals$}");
    if s.starts_with("-0") && s.trim_start_matches(['-', '0', '.']).is_empty() {
        s[1..].to_string()
    } else {
        s
    }
}

pub fn emit(curve: &LimitCurve) -> String {
    let mut out = String::with_capacity(80 * (curve.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for p in &curve.points {
        let cols = [p.s, p.a1, p.a2, p.b1, p.b2].map(format_sig12);
        let _ = writeln!(out, "{}", cols.join(","));
    }
    out
}

/// Reads a table written by [`emit`]. `path` only labels errors.
pub fn parse(text: &str, method: Method, path: &str) -> Result<LimitCurve, CliError> {
    let err = |msg: String| CliError::Csv {
        path: path.to_string(),
        msg,
    };
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == HEADER => {}
        Some(h) => return Err(err(format!("unexpected header `{h}`"))),
        None => return Err(err("empty file".into())),
    }
    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        let vals: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| err(format!("row {}: {e}", i + 1)))?;
        if vals.len() != 5 {
            return Err(err(format!(
                "row {}: expected 5 columns, got {}",
                i + 1,
                vals.len()
            )));
        }
        points.push(LimitPoint {
            s: vals[0],
            a1: vals[1],
            a2: vals[2],
            b1: vals[3],
            b2: vals[4],
        });
    }
    if points.is_empty() {
        return Err(err("no data rows".into()));
    }
    LimitCurve::new(points, method).map_err(|e| err(e.to_string()))
}
