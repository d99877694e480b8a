//! SVG line plots of sweep tables.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::sweep::{SweepMode, SweepRow, SweepTable};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 100.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

struct Series {
    label: &'static str,
    color: &'static str,
    value: fn(&SweepRow) -> f64,
}

const SERIES: [Series; 4] = [
    Series {
        label: "time machine",
        color: "#d62728",
        value: |r| r.p_tm,
    },
    Series {
        label: "Poincare AdS2",
        color: "#1f77b4",
        value: |r| r.p_ads2,
    },
    Series {
        label: "Einstein cylinder",
        color: "#2ca02c",
        value: |r| r.p_ec,
    },
    Series {
        label: "Minkowski",
        color: "#7f7f7f",
        value: |r| r.p_m,
    },
];

fn range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if lo > hi {
        return None;
    }
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 1e-3 };
        return Some((lo - pad, hi + pad));
    }
    let pad = 0.05 * (hi - lo);
    Some((lo - pad, hi + pad))
}

/// Decimal places that resolve a tick spacing of `step`.
fn decimals(step: f64) -> usize {
    if !(step > 0.0) || !step.is_finite() {
        return 3;
    }
    (1.0 - step.log10().floor()).clamp(0.0, 15.0) as usize
}

/// Two significant digits without trailing zeros.
fn short(x: f64) -> String {
    let text = format!("{x:.*}", decimals(x.abs()));
    if text.contains('.') {
        text.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        text
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PlotOptions {
    /// Labels the horizontal axis.
    pub mode: Option<SweepMode>,
    /// Logarithmic horizontal axis; needs positive swept values.
    pub log_x: bool,
}

/// Renders `P` against the swept value for every geometry.
///
/// A single row is drawn as markers only. Output depends only on the input.
pub fn render_svg(table: &SweepTable, opts: PlotOptions) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::Input("sweep table has no data rows".into()));
    }
    if opts.log_x && table.rows.iter().any(|r| !(r.swept > 0.0)) {
        return Err(Error::Input(
            "logarithmic axis needs positive swept values".into(),
        ));
    }
    let fx = |x: f64| if opts.log_x { x.log10() } else { x };
    let (x0, x1) = range(table.rows.iter().map(|r| fx(r.swept)))
        .ok_or_else(|| Error::Input("sweep table has no finite swept values".into()))?;
    let (y0, y1) = range(
        table
            .rows
            .iter()
            .flat_map(|r| SERIES.iter().map(move |s| (s.value)(r))),
    )
    .ok_or_else(|| Error::Input("sweep table has no finite probabilities".into()))?;
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (fx(x) - x0) / (x1 - x0) * pw;
    let py = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut svg = String::new();
    let w = &mut svg;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        w,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        w,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );

    // x ticks span the data, y ticks the padded axis
    let (xa, xb) = table
        .rows
        .iter()
        .map(|r| fx(r.swept))
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        });
    let x_ticks = if xa == xb { 0 } else { TICKS };
    let xd = decimals((xb - xa) / TICKS as f64);
    let yd = decimals((y1 - y0) / TICKS as f64);
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let y = y0 + f * (y1 - y0);
        let sy = py(y);
        let _ = writeln!(
            w,
            r#"<line x1="{l:.2}" y1="{sy:.2}" x2="{LEFT:.2}" y2="{sy:.2}" stroke="black"/><text x="{t:.2}" y="{ty:.2}" text-anchor="end">{y:.yd$}</text>"#,
            l = LEFT - 5.0,
            t = LEFT - 8.0,
            ty = sy + 4.0,
        );
    }
    for i in 0..=x_ticks {
        let f = if x_ticks == 0 {
            0.0
        } else {
            i as f64 / x_ticks as f64
        };
        let x = xa + f * (xb - xa);
        let x = if opts.log_x { 10f64.powf(x) } else { x };
        let sx = px(x);
        let label = if opts.log_x {
            short(x)
        } else {
            format!("{x:.xd$}")
        };
        let _ = writeln!(
            w,
            r#"<line x1="{sx:.2}" y1="{b:.2}" x2="{sx:.2}" y2="{b2:.2}" stroke="black"/><text x="{sx:.2}" y="{t:.2}" text-anchor="middle">{label}</text>"#,
            b = TOP + ph,
            b2 = TOP + ph + 5.0,
            t = TOP + ph + 20.0,
        );
    }
    let x_label = opts.mode.map_or("swept parameter", SweepMode::axis_label);
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x_label}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        w,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">excitation probability P / lambda^2</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    for s in &SERIES {
        let points: Vec<(f64, f64)> = table
            .rows
            .iter()
            .map(|r| (r.swept, (s.value)(r)))
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(x, y)| (px(x), py(y)))
            .collect();
        if points.len() > 1 {
            let path: Vec<String> = points
                .iter()
                .map(|(x, y)| format!("{x:.2},{y:.2}"))
                .collect();
            let _ = writeln!(
                w,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                s.color,
                path.join(" ")
            );
        }
        for (x, y) in &points {
            let _ = writeln!(
                w,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{}"/>"#,
                s.color
            );
        }
    }

    for (i, s) in SERIES.iter().enumerate() {
        let lx = WIDTH - RIGHT + 15.0;
        let ly = TOP + 15.0 + 20.0 * i as f64;
        let _ = writeln!(
            w,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            s.color,
            lx + 25.0,
            ly + 4.0,
            s.label
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
