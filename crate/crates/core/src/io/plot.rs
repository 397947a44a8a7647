//! Static SVG figure: one row per trajectory, vortex paths on the unit square
//! on the left and `x_1(t)`, `y_1(t)` on the right.

use crate::error::{Error, Result};
use crate::geom::TorusVec;
use crate::reduced::Trajectory;
use std::fmt::Write as _;
use std::path::Path;

const SQUARE: f64 = 240.0;
const WIDE: f64 = 360.0;
const ROW: f64 = 290.0;
const LEFT_X: f64 = 50.0;
const RIGHT_X: f64 = 350.0;
const TOP: f64 = 30.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Splits a wrapped path wherever consecutive points jump by more than half a
/// period in either coordinate (a seam crossing).
pub fn split_at_seams(points: &[(f64, f64)]) -> Vec<Vec<(f64, f64)>> {
    let mut out: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut cur: Vec<(f64, f64)> = Vec::new();
    for &p in points {
        if let Some(&(x, y)) = cur.last() {
            if (p.0 - x).abs() > 0.5 || (p.1 - y).abs() > 0.5 {
                out.push(std::mem::take(&mut cur));
            }
        }
        cur.push(p);
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn moves(seg: &[(f64, f64)]) -> bool {
    seg.windows(2).any(|w| w[0] != w[1])
}

fn polyline(svg: &mut String, pts: impl Iterator<Item = (f64, f64)>, color: &str) {
    let coords: Vec<String> = pts.map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
        coords.join(" ")
    );
}

fn glyph(svg: &mut String, x: f64, y: f64, degree: i32) {
    let r = 5.0;
    let (class, a, b) = if degree > 0 {
        ("plus", [(x - r, y), (x + r, y)], [(x, y - r), (x, y + r)])
    } else {
        (
            "cross",
            [(x - r, y - r), (x + r, y + r)],
            [(x - r, y + r), (x + r, y - r)],
        )
    };
    let _ = writeln!(
        svg,
        r#"<g class="glyph {class}" stroke="black" stroke-width="1.5"><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/></g>"#,
        a[0].0, a[0].1, a[1].0, a[1].1, b[0].0, b[0].1, b[1].0, b[1].1
    );
}

fn axes(svg: &mut String, x0: f64, y0: f64, w: f64, h: f64, xlabel: &str, xmax: f64) {
    let _ = writeln!(
        svg,
        r#"<rect x="{x0:.2}" y="{y0:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle">{xlabel}</text>"#,
        x0 + 0.5 * w,
        y0 + h + 24.0
    );
    for (v, lx, ly, anchor) in [
        ("0", x0, y0 + h + 12.0, "middle"),
        (&*format!("{xmax}"), x0 + w, y0 + h + 12.0, "middle"),
        ("1", x0 - 4.0, y0 + 4.0, "end"),
    ] {
        let _ = writeln!(
            svg,
            r#"<text x="{lx:.2}" y="{ly:.2}" font-size="10" text-anchor="{anchor}">{v}</text>"#
        );
    }
}

/// Renders the figure. `labels[i]` titles row `i`.
pub fn render_plot(trajectories: &[Trajectory], labels: &[String]) -> Result<String> {
    if trajectories.is_empty() {
        return Err(Error::Parameter("plot needs at least one trajectory".into()));
    }
    let rows = trajectories.len();
    let width = RIGHT_X + WIDE + 30.0;
    let height = TOP + ROW * rows as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (r, traj) in trajectories.iter().enumerate() {
        let y0 = TOP + ROW * r as f64;
        let label = labels.get(r).cloned().unwrap_or_default();
        let _ = writeln!(
            svg,
            r#"<text x="{LEFT_X:.2}" y="{:.2}" font-size="12">{label}</text>"#,
            y0 - 8.0
        );
        axes(&mut svg, LEFT_X, y0, SQUARE, SQUARE, "x", 1.0);
        let t_end = traj.samples.last().map(|s| s.t).unwrap_or(0.0);
        let t_max = if t_end > 0.0 { t_end } else { 1.0 };
        axes(&mut svg, RIGHT_X, y0, WIDE, SQUARE, "t", (t_max * 1e4).round() / 1e4);
        let to_sq = |(x, y): (f64, f64)| (LEFT_X + x * SQUARE, y0 + (1.0 - y) * SQUARE);
        let m = traj.degrees.len();
        let mut moved = false;
        for j in 0..m {
            let path: Vec<(f64, f64)> = traj
                .samples
                .iter()
                .map(|s| {
                    let p = TorusVec::from_planar(s.lifted_positions[j]);
                    (p.x(), p.y())
                })
                .collect();
            for seg in split_at_seams(&path) {
                if moves(&seg) {
                    moved = true;
                    polyline(&mut svg, seg.into_iter().map(to_sq), COLORS[j % COLORS.len()]);
                }
            }
        }
        // time series of the first vortex; flat and uninformative if nothing moves
        if moved {
            let to_wide = |t: f64, v: f64| (RIGHT_X + t / t_max * WIDE, y0 + (1.0 - v) * SQUARE);
            for (c, color) in [(0, COLORS[0]), (1, COLORS[1])] {
                let series: Vec<(f64, f64)> = traj
                    .samples
                    .iter()
                    .map(|s| {
                        let p = TorusVec::from_planar(s.lifted_positions[0]);
                        (s.t, if c == 0 { p.x() } else { p.y() })
                    })
                    .collect();
                // seams only matter in the value coordinate
                let mut seg: Vec<(f64, f64)> = Vec::new();
                let mut flush = |seg: &mut Vec<(f64, f64)>| {
                    if seg.len() > 1 {
                        polyline(&mut svg, seg.iter().map(|&(t, v)| to_wide(t, v)), color);
                    }
                    seg.clear();
                };
                for p in series {
                    if seg.last().is_some_and(|q| (p.1 - q.1).abs() > 0.5) {
                        flush(&mut seg);
                    }
                    seg.push(p);
                }
                flush(&mut seg);
            }
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" font-size="10" fill="{}">x1</text><text x="{:.2}" y="{:.2}" font-size="10" fill="{}">y1</text>"#,
                RIGHT_X + WIDE - 40.0,
                y0 - 8.0,
                COLORS[0],
                RIGHT_X + WIDE - 20.0,
                y0 - 8.0,
                COLORS[1]
            );
        }
        if let Some(first) = traj.samples.first() {
            for (p, d) in first.lifted_positions.iter().zip(&traj.degrees) {
                let w = TorusVec::from_planar(*p);
                let (x, y) = to_sq((w.x(), w.y()));
                glyph(&mut svg, x, y, *d);
            }
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn write_plot(trajectories: &[Trajectory], labels: &[String], path: &Path) -> Result<()> {
    let svg = render_plot(trajectories, labels)?;
    std::fs::write(path, svg)?;
    Ok(())
}
