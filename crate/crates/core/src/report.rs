//! CSV, JSON and SVG output for sweeps and trajectories.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::pipeline::{SweepConfig, SweepRow, SweepSeries};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Shortest `%.12g`-style rendering.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_fraction(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_fraction(mantissa.to_string()))
    }
}

fn trim_fraction(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Rounds to [`SIGNIFICANT_DIGITS`] through the text form, so JSON and CSV agree.
pub fn round_sig(v: f64) -> f64 {
    if v.is_finite() {
        fmt_sig(v).parse().expect("round trip")
    } else {
        v
    }
}

/// File-name tag for a correlation value: -1 -> "m1", 0.5 -> "0p5".
pub fn delta_tag(delta0: f64) -> String {
    let s = fmt_sig(delta0).replace('.', "p");
    match s.strip_prefix('-') {
        Some(rest) => format!("m{rest}"),
        None => s,
    }
}

fn config_comments(config: &SweepConfig, delta0: f64) -> String {
    format!(
        "# omega={}\n# delta0={}\n# t_min={}\n# t_max={}\n# t_count={}\n# t_zero_limit={}\n",
        fmt_sig(config.omega),
        fmt_sig(delta0),
        fmt_sig(config.t_min),
        fmt_sig(config.t_max),
        config.t_count,
        config.t_zero_limit
    )
}

pub fn csv_line(values: &[f64]) -> String {
    let cells: Vec<String> = values.iter().map(|&v| fmt_sig(v)).collect();
    cells.join(",")
}

pub fn sweep_csv(config: &SweepConfig, series: &SweepSeries) -> String {
    let mut out = config_comments(config, series.delta0);
    out.push_str(&SweepRow::HEADER.join(","));
    out.push('\n');
    for row in &series.rows {
        out.push_str(&csv_line(&row.values()));
        out.push('\n');
    }
    out
}

fn row_json(row: &SweepRow) -> Value {
    let mut m = Map::new();
    for (k, v) in SweepRow::HEADER.iter().zip(row.values()) {
        m.insert((*k).to_string(), json!(round_sig(v)));
    }
    Value::Object(m)
}

pub fn sweep_json(config: &SweepConfig, series: &SweepSeries) -> String {
    let doc = json!({
        "config": {
            "omega": round_sig(config.omega),
            "delta0": round_sig(series.delta0),
            "t_min": round_sig(config.t_min),
            "t_max": round_sig(config.t_max),
            "t_count": config.t_count,
            "t_zero_limit": config.t_zero_limit,
        },
        "rows": series.rows.iter().map(row_json).collect::<Vec<_>>(),
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

/// One sample of a dynamics run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicsRow {
    pub tau: f64,
    pub fidelity: f64,
    pub delta: f64,
    pub uncertainty: f64,
    pub bound: f64,
}

impl DynamicsRow {
    pub const HEADER: [&'static str; 5] = ["tau", "fidelity", "delta", "U", "bound"];

    pub fn values(&self) -> [f64; 5] {
        [self.tau, self.fidelity, self.delta, self.uncertainty, self.bound]
    }
}

pub fn dynamics_csv(comments: &[(&str, String)], rows: &[DynamicsRow]) -> String {
    let mut out = String::new();
    for (k, v) in comments {
        let _ = writeln!(out, "# {k}={v}");
    }
    out.push_str(&DynamicsRow::HEADER.join(","));
    out.push('\n');
    for r in rows {
        out.push_str(&csv_line(&r.values()));
        out.push('\n');
    }
    out
}

pub fn dynamics_json(comments: &[(&str, String)], rows: &[DynamicsRow]) -> String {
    let config: Map<String, Value> = comments
        .iter()
        .map(|(k, v)| ((*k).to_string(), Value::String(v.clone())))
        .collect();
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            let m: Map<String, Value> = DynamicsRow::HEADER
                .iter()
                .zip(r.values())
                .map(|(k, v)| ((*k).to_string(), json!(round_sig(v))))
                .collect();
            Value::Object(m)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&json!({ "config": config, "rows": rows }))
        .expect("serializable");
    s.push('\n');
    s
}

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Line plot of several curves sharing the x axis.
pub fn svg_plot(title: &str, x_label: &str, x: &[f64], curves: &[(&str, Vec<f64>)]) -> String {
    let (w, h, pad) = (640.0, 420.0, 56.0);
    let finite = |v: &&f64| v.is_finite();
    let (x0, x1) = bounds(x.iter().filter(finite).copied());
    let (mut y0, mut y1) = bounds(curves.iter().flat_map(|c| c.1.iter().filter(finite).copied()));
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |v: f64| pad + (v - x0) / (x1 - x0).max(1e-300) * (w - 2.0 * pad);
    let sy = |v: f64| h - pad - (v - y0) / (y1 - y0) * (h - 2.0 * pad);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#,
        w / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    for (v, anchor_y) in [(y0, sy(y0)), (y1, sy(y1))] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
            pad - 4.0,
            anchor_y + 4.0,
            fmt_tick(v)
        );
    }
    for v in [x0, x1] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
            sx(v),
            h - pad + 16.0,
            fmt_tick(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        w / 2.0,
        h - 12.0,
        escape(x_label)
    );
    for (k, (name, ys)) in curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = x
            .iter()
            .zip(ys)
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(&a, &b)| format!("{:.2},{:.2}", sx(a), sy(b)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = pad + 16.0 + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" fill="{color}" font-family="sans-serif" font-size="12">{}</text>"#,
            w - pad - 60.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 1.0)
    }
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    trim_fraction(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Uncertainty panel (U, bound, tightness) for one sweep.
pub fn eur_svg(series: &SweepSeries) -> String {
    let t: Vec<f64> = series.rows.iter().map(|r| r.temperature).collect();
    let pick = |f: fn(&SweepRow) -> f64| series.rows.iter().map(f).collect::<Vec<_>>();
    svg_plot(
        &format!("Delta0 = {}", fmt_sig(series.delta0)),
        "T",
        &t,
        &[
            ("U", pick(|r| r.uncertainty)),
            ("bound", pick(|r| r.bound)),
            ("delta", pick(|r| r.tightness)),
        ],
    )
}

/// Correlation panel (D, M) for one sweep.
pub fn correlations_svg(series: &SweepSeries) -> String {
    let t: Vec<f64> = series.rows.iter().map(|r| r.temperature).collect();
    let pick = |f: fn(&SweepRow) -> f64| series.rows.iter().map(f).collect::<Vec<_>>();
    svg_plot(
        &format!("Delta0 = {}", fmt_sig(series.delta0)),
        "T",
        &t,
        &[("D", pick(|r| r.discord)), ("M", pick(|r| r.missing_info))],
    )
}
