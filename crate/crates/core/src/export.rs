//! Plain-text exports of traces and results.
//!
//! Trace CSV layout, one row per iterate:
//!
//! ```text
//! n,x_1,...,x_d,residual,ratio
//! ```
//!
//! `residual` on row `n` is `d(x_{n+1}, x_n)` and is empty on the last row;
//! `ratio` is `residual_n / residual_{n-1}` and is empty on row 0 and
//! wherever the previous residual is zero. Numbers use [`format_number`].
//! Lines end with `\n`, no quoting.

use crate::error::Result;
use crate::solver::{FixedPointResult, IterationTrace};

/// Shortest decimal that round-trips to the same `f64`; scientific notation
/// (`1.5e-7`) when `0 < |v| < 1e-5` or `|v| ≥ 1e16`.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn trace_to_csv(trace: &IterationTrace) -> String {
    let dim = trace.points[0].dim();
    let mut out = String::from("n");
    for i in 1..=dim {
        out.push_str(&format!(",x_{i}"));
    }
    out.push_str(",residual,ratio\n");
    for (n, point) in trace.points.iter().enumerate() {
        out.push_str(&n.to_string());
        for c in point.coords() {
            out.push(',');
            out.push_str(&format_number(*c));
        }
        out.push(',');
        if let Some(r) = trace.residuals.get(n) {
            out.push_str(&format_number(*r));
        }
        out.push(',');
        if let Some(Some(g)) = n.checked_sub(1).and_then(|k| trace.ratios.get(k)) {
            out.push_str(&format_number(*g));
        }
        out.push('\n');
    }
    out
}

/// Pretty-printed JSON with a trailing newline.
pub fn result_to_json(result: &FixedPointResult) -> Result<String> {
    Ok(to_json(result))
}

pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}
