//! Output formats: structured text (pretty JSON), CSV and SVG.

use std::fmt::Write as _;

use clap::ValueEnum;
use ipset_core::ipset::{convex_hull, Membership};
use ipset_core::BeliefDistribution;

use crate::error::{CliError, CliResult};
use crate::run::{CommandResult, LabeledSet, ResultBundle};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Svg,
}

pub fn emit(bundle: &ResultBundle, format: Format) -> CliResult<String> {
    match format {
        Format::Text => {
            let mut s = serde_json::to_string_pretty(bundle).expect("bundle serializes");
            s.push('\n');
            Ok(s)
        }
        Format::Csv => Ok(csv(bundle)),
        Format::Svg => svg(bundle),
    }
}

/// Nine significant digits, trailing zeros trimmed.
pub fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_nan() {
            String::new()
        } else if x == 0.0 {
            "0".into()
        } else {
            format!("{x}")
        };
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..=12).contains(&mag) {
        return format!("{x:.8e}");
    }
    let decimals = (8 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn row(out: &mut String, head: &[String], nums: &[f64]) {
    let cells: Vec<String> = head.iter().cloned().chain(nums.iter().map(|&x| sig9(x))).collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

fn header(out: &mut String, fixed: &[&str], prefix: &str, n: usize, tail: &[&str]) {
    let cols: Vec<String> = fixed
        .iter()
        .map(|s| s.to_string())
        .chain((1..=n).map(|i| format!("{prefix}{i}")))
        .chain(tail.iter().map(|s| s.to_string()))
        .collect();
    out.push_str(&cols.join(","));
    out.push('\n');
}

fn atom_rows(out: &mut String, record: &str, tau: &BeliefDistribution) {
    for (i, a) in tau.atoms().iter().enumerate() {
        let nums: Vec<f64> = std::iter::once(a.weight).chain(a.atom.belief.iter().copied()).collect();
        row(out, &[record.into(), i.to_string()], &nums);
    }
}

fn csv(bundle: &ResultBundle) -> String {
    let mut out = String::new();
    let n = bundle.profile_dim();
    match &bundle.result {
        CommandResult::Sets { sets } => {
            header(&mut out, &["set", "record", "index"], "x", n, &["value"]);
            for s in sets {
                let vertices: Vec<Vec<f64>> = match &s.polygon {
                    Some(p) => p.iter().map(|v| v.to_vec()).collect(),
                    None => s.approx.inner_vertices.iter().map(|v| v.values.clone()).collect(),
                };
                for (i, v) in vertices.iter().enumerate() {
                    let mut line: Vec<String> = vec![s.label.clone(), "vertex".into(), i.to_string()];
                    line.extend(v.iter().map(|&x| sig9(x)));
                    line.push(String::new());
                    out.push_str(&line.join(","));
                    out.push('\n');
                }
                for (i, sample) in s.approx.support_samples.iter().enumerate() {
                    let nums: Vec<f64> = sample
                        .direction
                        .lambda()
                        .iter()
                        .copied()
                        .chain([sample.value])
                        .collect();
                    row(&mut out, &[s.label.clone(), "support".into(), i.to_string()], &nums);
                }
            }
        }
        CommandResult::Membership { target, outcome } => {
            header(&mut out, &["record", "index", "weight"], "x", n, &[]);
            row(
                &mut out,
                &["target".into(), "0".into()],
                &[&[f64::NAN][..], &target.values].concat(),
            );
            match outcome {
                Membership::InClosure { certificate } => atom_rows(&mut out, "atom", certificate),
                Membership::Outside { separating, margin } => {
                    let nums: Vec<f64> = std::iter::once(*margin)
                        .chain(separating.lambda().iter().copied())
                        .collect();
                    row(&mut out, &["separating".into(), "0".into()], &nums);
                }
            }
        }
        CommandResult::Boundary { support } => {
            header(&mut out, &["record", "index", "weight"], "x", n, &[]);
            let nums: Vec<f64> = std::iter::once(support.value)
                .chain(support.profile.values.iter().copied())
                .collect();
            row(&mut out, &["profile".into(), "0".into()], &nums);
            atom_rows(&mut out, "atom", &support.tau);
        }
        CommandResult::Maxmin { solution } => {
            header(&mut out, &["record", "index", "weight"], "x", n, &[]);
            let nums: Vec<f64> = std::iter::once(solution.value)
                .chain(solution.profile.values.iter().copied())
                .collect();
            row(&mut out, &["profile".into(), "0".into()], &nums);
            atom_rows(&mut out, "atom", &solution.tau);
        }
        CommandResult::Commeq { low, high } => {
            out.push_str("low,high\n");
            row(&mut out, &[], &[*low, *high]);
        }
        CommandResult::Bipool {
            solution,
            distribution,
            lp_value,
        } => {
            header(&mut out, &["record", "index", "weight"], "x", n, &[]);
            let t = solution.policy.target;
            let mut value_row = vec![solution.value];
            value_row.extend(solution.policy.pool_probs.iter().copied());
            row(&mut out, &["pool".into(), t.to_string()], &value_row);
            row(&mut out, &["lp".into(), t.to_string()], &[*lp_value]);
            atom_rows(&mut out, "atom", distribution);
        }
        CommandResult::Diagnose { entries } => {
            header(
                &mut out,
                &["index"],
                "lambda",
                n,
                &["value", "attained", "one_sided_atoms"],
            );
            for (i, e) in entries.iter().enumerate() {
                let nums: Vec<f64> = e
                    .direction
                    .lambda()
                    .iter()
                    .copied()
                    .chain([e.value, e.attained as u8 as f64, e.one_sided_atoms as f64])
                    .collect();
                row(&mut out, &[i.to_string()], &nums);
            }
        }
        CommandResult::Reduce {
            reduced,
            profile_before,
            profile_after,
            ..
        } => {
            header(&mut out, &["record", "index", "weight"], "x", n, &[]);
            row(
                &mut out,
                &["before".into(), "0".into()],
                &[&[f64::NAN][..], &profile_before.values].concat(),
            );
            row(
                &mut out,
                &["after".into(), "0".into()],
                &[&[f64::NAN][..], &profile_after.values].concat(),
            );
            atom_rows(&mut out, "atom", reduced);
        }
    }
    out
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const SIZE: f64 = 520.0;
const MARGIN: f64 = 60.0;

/// Clips a convex polygon to `λᵀx ≤ h`.
fn clip(poly: &[[f64; 2]], l: &[f64], h: f64) -> Vec<[f64; 2]> {
    let inside = |p: &[f64; 2]| l[0] * p[0] + l[1] * p[1] <= h + 1e-12;
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let (ia, ib) = (inside(&a), inside(&b));
        if ia {
            out.push(a);
        }
        if ia != ib {
            let fa = l[0] * a[0] + l[1] * a[1] - h;
            let fb = l[0] * b[0] + l[1] * b[1] - h;
            let t = fa / (fa - fb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Tick spacing giving roughly five ticks over `span`.
fn tick_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let base = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * base)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * base)
}

fn svg(bundle: &ResultBundle) -> CliResult<String> {
    let CommandResult::Sets { sets } = &bundle.result else {
        return Err(CliError::Usage(format!(
            "svg output is only available for set commands, not `{}`",
            bundle.command
        )));
    };
    let dim = bundle.profile_dim();
    if dim != 2 {
        return Err(CliError::UnsupportedDimension(dim));
    }
    let hulls: Vec<Vec<[f64; 2]>> = sets.iter().map(|s| s.polygon.clone().unwrap_or_default()).collect();
    let pts = hulls.iter().flatten();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(0.2);
    let pad = 0.1 * span;
    let (x0, y0) = (lo[0] - pad, lo[1] - pad);
    let side = span + 2.0 * pad;
    let plot = SIZE - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + (x - x0) / side * plot;
    let sy = |y: f64| SIZE - MARGIN - (y - y0) / side * plot;
    let path = |poly: &[[f64; 2]]| {
        poly.iter()
            .map(|p| format!("{:.2},{:.2}", sx(p[0]), sy(p[1])))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{plot}" height="{plot}" fill="none" stroke="black"/>"#
    );
    let step = tick_step(side);
    let mut t = (x0 / step).ceil() * step;
    while t <= x0 + side + 1e-12 {
        let (px, py) = (sx(t), sy(t));
        let label = sig9((t / step).round() * step);
        if (MARGIN..=SIZE - MARGIN).contains(&px) {
            let _ = writeln!(
                s,
                r#"<line x1="{px:.2}" y1="{b}" x2="{px:.2}" y2="{b2}" stroke="black"/>"#,
                b = SIZE - MARGIN,
                b2 = SIZE - MARGIN + 5.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{px:.2}" y="{y}" text-anchor="middle">{label}</text>"#,
                y = SIZE - MARGIN + 18.0
            );
        }
        if (MARGIN..=SIZE - MARGIN).contains(&py) {
            let _ = writeln!(
                s,
                r#"<line x1="{a}" y1="{py:.2}" x2="{MARGIN}" y2="{py:.2}" stroke="black"/>"#,
                a = MARGIN - 5.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{x}" y="{y:.2}" text-anchor="end">{label}</text>"#,
                x = MARGIN - 8.0,
                y = py + 4.0
            );
        }
        t += step;
    }
    let _ = writeln!(
        s,
        r#"<text x="{x}" y="{y}" text-anchor="middle">w1</text>"#,
        x = SIZE / 2.0,
        y = SIZE - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{y}" text-anchor="middle" transform="rotate(-90 15 {y})">w2</text>"#,
        y = SIZE / 2.0
    );
    let frame = [[x0, y0], [x0 + side, y0], [x0 + side, y0 + side], [x0, y0 + side]];
    for (i, (set, hull)) in sets.iter().zip(&hulls).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        draw_set(&mut s, set, hull, &frame, color, &path, (&sx, &sy));
        let ly = MARGIN + 16.0 * i as f64 + 4.0;
        let lx = SIZE - MARGIN - 110.0;
        let _ = writeln!(
            s,
            r#"<rect x="{lx}" y="{ly}" width="10" height="10" fill="{color}" fill-opacity="0.5"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}">{label}</text>"#,
            x = lx + 14.0,
            y = ly + 9.0,
            label = escape(&set.label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

type Scale<'a> = (&'a dyn Fn(f64) -> f64, &'a dyn Fn(f64) -> f64);

fn draw_set(
    s: &mut String,
    set: &LabeledSet,
    hull: &[[f64; 2]],
    frame: &[[f64; 2]],
    color: &str,
    path: &dyn Fn(&[[f64; 2]]) -> String,
    (sx, sy): Scale,
) {
    let mut outer = frame.to_vec();
    for h in &set.approx.outer_halfspaces {
        outer = clip(&outer, h.direction.lambda(), h.offset);
        if outer.is_empty() {
            break;
        }
    }
    let outer = convex_hull(&outer, 1e-12);
    if outer.len() >= 3 {
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="none" stroke="{color}" stroke-dasharray="4 3"/>"#,
            path(&outer)
        );
    }
    match hull.len() {
        0 => {}
        1 => {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/>"#,
                sx(hull[0][0]),
                sy(hull[0][1])
            );
        }
        2 => {
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="3"/>"#,
                path(hull)
            );
        }
        _ => {
            let _ = writeln!(
                s,
                r#"<polygon points="{}" fill="{color}" fill-opacity="0.35" stroke="{color}"/>"#,
                path(hull)
            );
        }
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
