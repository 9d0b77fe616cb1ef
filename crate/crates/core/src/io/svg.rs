use std::collections::BTreeMap;
use std::fmt::Write;

use super::{FlowRecord, FreeBoundaryRecord, ValueRecord};
use crate::{Error, Result};

/// Inputs of the figure: space runs left to right, time bottom to top.
#[derive(Debug, Clone, Default)]
pub struct RenderData {
    pub flows: Vec<FlowRecord>,
    pub free_boundary: Vec<FreeBoundaryRecord>,
    pub value: Vec<ValueRecord>,
    pub title: String,
    /// Top of the time axis; `None` fits the trajectories.
    pub t_max: Option<f64>,
}

const W: f64 = 800.0;
const H: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 780.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 360.0;
/// Overlap of neighbouring contact columns, hides anti-aliasing seams.
const SEAM: f64 = 0.4;

/// SVG 1.1 figure of the contact region `{J = φ⁻}` (shaded), the free
/// boundary and the characteristic trajectories. One-dimensional data only.
/// The output depends only on the input records.
pub fn render_svg(data: &RenderData) -> Result<String> {
    let ys = data.flows.iter().map(|f| f.y).chain(data.free_boundary.iter().map(|f| f.y)).chain(data.value.iter().map(|v| v.y));
    if ys.into_iter().any(|y| y != 0.0) {
        return Err(Error::Unsupported("render draws one-dimensional data only".into()));
    }
    let xs: Vec<f64> =
        data.value.iter().map(|v| v.x).chain(data.free_boundary.iter().map(|f| f.x)).chain(data.flows.iter().map(|f| f.x)).collect();
    if xs.is_empty() {
        return Err(Error::Input("nothing to render".into()));
    }
    let x_lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let x_hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let x_span = if x_hi > x_lo { x_hi - x_lo } else { 1.0 };
    let t_max = data.t_max.unwrap_or_else(|| {
        let t = data.flows.iter().map(|f| f.t).fold(0.0, f64::max);
        let t = if t > 0.0 { t } else { data.free_boundary.iter().filter_map(|f| f.tau_inv).fold(0.0, f64::max) };
        if t > 0.0 { 1.25 * t } else { 1.0 }
    });
    let px = |x: f64| LEFT + (x - x_lo) / x_span * (RIGHT - LEFT);
    let py = |t: f64| BOTTOM - t.clamp(0.0, t_max) / t_max * (BOTTOM - TOP);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);

    // contact region, one column of merged runs per node
    let mut columns: BTreeMap<usize, Vec<&ValueRecord>> = BTreeMap::new();
    for v in &data.value {
        columns.entry(v.node).or_default().push(v);
    }
    let cell = columns.len().max(2) as f64 - 1.0;
    let half = 0.5 * x_span / cell;
    let _ = writeln!(s, r##"<g id="contact" fill="#cfe0f3" stroke="none">"##);
    for col in columns.values_mut() {
        col.sort_by_key(|v| v.layer);
        let dt = if col.len() > 1 { col[1].t - col[0].t } else { 0.0 };
        let mut run: Option<(f64, f64)> = None;
        let flush = |s: &mut String, r: (f64, f64), x: f64| {
            let (a, b) = (r.0.min(t_max), r.1.min(t_max));
            if b > a {
                let (x0, x1) = (px((x - half).max(x_lo)), px((x + half).min(x_hi)));
                let _ = writeln!(s, r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#, x0, py(b), x1 - x0 + SEAM, py(a) - py(b));
            }
        };
        for v in col.iter() {
            run = match (run, v.contact) {
                (Some((a, _)), true) => Some((a, v.t + dt)),
                (None, true) => Some((v.t, v.t + dt)),
                (Some(r), false) => {
                    flush(&mut s, r, v.x);
                    None
                }
                (None, false) => None,
            };
        }
        if let Some(r) = run {
            flush(&mut s, r, col[0].x);
        }
    }
    let _ = writeln!(s, "</g>");

    // axes
    let _ = writeln!(s, r#"<g id="axes" stroke="black" stroke-width="1" fill="none">"#);
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{BOTTOM}" x2="{RIGHT}" y2="{BOTTOM}"/>"#);
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{BOTTOM}" x2="{LEFT}" y2="{TOP}"/>"#);
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g id="labels" font-family="sans-serif" font-size="12" fill="black">"#);
    for k in 0..=4 {
        let x = x_lo + x_span * k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, px(x), BOTTOM + 16.0, label(x));
        let t = t_max * k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, py(t) + 4.0, label(t));
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">x</text>"#, 0.5 * (LEFT + RIGHT), BOTTOM + 34.0);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"#, LEFT - 40.0, 0.5 * (TOP + BOTTOM));
    if !data.title.is_empty() {
        let _ = writeln!(s, r#"<text x="{:.2}" y="20" text-anchor="middle">{}</text>"#, 0.5 * W, escape(&data.title));
    }
    let _ = writeln!(s, "</g>");

    // trajectories
    let mut flows: BTreeMap<usize, Vec<&FlowRecord>> = BTreeMap::new();
    for f in &data.flows {
        flows.entry(f.flow).or_default().push(f);
    }
    let _ = writeln!(s, r##"<g id="trajectories" stroke="#b03a2e" stroke-width="0.8" fill="none">"##);
    for samples in flows.values() {
        if samples.len() < 2 {
            continue;
        }
        let pts: Vec<String> = samples.iter().map(|f| format!("{:.2},{:.2}", px(f.x), py(f.t))).collect();
        let _ = writeln!(s, r#"<polyline points="{}"/>"#, pts.join(" "));
    }
    let _ = writeln!(s, "</g>");

    // free boundary, broken where it is undefined or jumps
    let mut fb: Vec<&FreeBoundaryRecord> = data.free_boundary.iter().collect();
    fb.sort_by(|a, b| a.x.total_cmp(&b.x));
    let _ = writeln!(s, r#"<g id="free-boundary" stroke="black" stroke-width="1.6" fill="none">"#);
    let mut piece: Vec<(f64, f64)> = vec![];
    let gap = 4.0 * half;
    let jump = 0.1 * t_max;
    let emit = |s: &mut String, piece: &mut Vec<(f64, f64)>| {
        if piece.len() > 1 {
            let pts: Vec<String> = piece.iter().map(|&(x, t)| format!("{:.2},{:.2}", px(x), py(t))).collect();
            let _ = writeln!(s, r#"<polyline points="{}"/>"#, pts.join(" "));
        }
        piece.clear();
    };
    for f in fb {
        match f.tau_inv {
            Some(t) => {
                if let Some(&(x0, t0)) = piece.last() {
                    if f.x - x0 > gap || (t - t0).abs() > jump {
                        emit(&mut s, &mut piece);
                    }
                }
                piece.push((f.x, t));
            }
            None => emit(&mut s, &mut piece),
        }
    }
    emit(&mut s, &mut piece);
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

fn label(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
