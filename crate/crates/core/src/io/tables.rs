//! CSV tables: trajectories, diagnostics, sweep and comparison records.

use crate::error::Result;
use crate::geom::TorusVec;
use crate::pde::PdeCompareReport;
use crate::reduced::{SweepReport, Trajectory};
use std::io::{Read, Write};
use std::path::Path;

/// 17 significant digits, which round-trips every finite f64.
pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn trajectory_header(vortices: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for j in 1..=vortices {
        for c in ["x", "y", "lx", "ly", "vx", "vy"] {
            h.push(format!("{c}_{j}"));
        }
    }
    h.extend(["qx", "qy", "W", "invariant", "min_sep"].map(String::from));
    h
}

/// Numeric rows in file order: wrapped, lifted and velocity per vortex, then
/// the momentum, energy, conserved quantity and minimum pair distance.
pub fn trajectory_rows(traj: &Trajectory) -> Vec<Vec<f64>> {
    traj.samples
        .iter()
        .zip(&traj.diagnostics)
        .map(|(s, d)| {
            let mut row = vec![s.t];
            for (p, v) in s.lifted_positions.iter().zip(&s.velocities) {
                let w = TorusVec::from_planar(*p);
                row.extend([w.x(), w.y(), p.x, p.y, v.x, v.y]);
            }
            // diagnostics keep a quarter of the minimum separation
            row.extend([d.q.x, d.q.y, d.energy, d.invariant, 4.0 * d.min_separation]);
            row
        })
        .collect()
}

fn write_rows<W: Write>(w: W, header: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for r in rows {
        out.write_record(r.iter().map(|v| fmt_num(*v)))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_trajectory_to<W: Write>(traj: &Trajectory, w: W) -> Result<()> {
    write_rows(w, &trajectory_header(traj.degrees.len()), &trajectory_rows(traj))
}

pub fn write_trajectory(traj: &Trajectory, path: &Path) -> Result<()> {
    write_trajectory_to(traj, std::fs::File::create(path)?)
}

/// Header and numeric rows of any table written by this module.
pub fn read_table_from<R: Read>(r: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rd = csv::Reader::from_reader(r);
    let header = rd.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| crate::error::Error::Config(format!("bad number {s:?}: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    read_table_from(std::fs::File::open(path)?)
}

/// Per-sample energy bookkeeping: `W`, kinetic term, the conserved
/// combination, its drift from `t = 0`, and `r(a)`.
pub fn write_diagnostics(traj: &Trajectory, path: &Path) -> Result<()> {
    let header = ["t", "W", "kinetic", "invariant", "drift", "r_a"].map(String::from);
    let i0 = traj.diagnostics.first().map(|d| d.invariant).unwrap_or(0.0);
    let rows: Vec<Vec<f64>> = traj
        .samples
        .iter()
        .zip(&traj.diagnostics)
        .map(|(s, d)| {
            vec![
                s.t,
                d.energy,
                d.kinetic,
                d.invariant,
                d.invariant - i0,
                d.min_separation,
            ]
        })
        .collect();
    write_rows(std::fs::File::create(path)?, &header, &rows)
}

/// One line per mu; `deviation = inf` marks runs that ended before the window.
pub fn write_sweep_report(report: &SweepReport, path: &Path) -> Result<()> {
    let mut out = csv::Writer::from_path(path)?;
    out.write_record([
        "mu",
        "deviation",
        "deviation_common",
        "compared_until",
        "termination",
        "end_time",
        "invariant_drift",
    ])?;
    for e in &report.entries {
        out.write_record([
            fmt_num(e.mu),
            fmt_num(e.deviation),
            fmt_num(e.deviation_common),
            fmt_num(e.compared_until),
            format!("{:?}", e.termination),
            fmt_num(e.end_time),
            fmt_num(e.invariant_drift),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Tracked and reduced positions at each comparison time.
pub fn write_compare_samples(report: &PdeCompareReport, path: &Path) -> Result<()> {
    let m = report.samples.first().map(|s| s.pde.len()).unwrap_or(0);
    let mut header = vec!["t".to_string()];
    for j in 1..=m {
        header.extend([
            format!("pde_x_{j}"),
            format!("pde_y_{j}"),
            format!("red_x_{j}"),
            format!("red_y_{j}"),
        ]);
    }
    header.extend(["distance", "hamiltonian", "mass", "losses"].map(String::from));
    let rows: Vec<Vec<f64>> = report
        .samples
        .iter()
        .map(|s| {
            let mut r = vec![s.t];
            for (a, b) in s.pde.iter().zip(&s.reduced) {
                r.extend([a.x(), a.y(), b.x(), b.y()]);
            }
            r.extend([s.distance, s.hamiltonian, s.mass, s.losses as f64]);
            r
        })
        .collect();
    write_rows(std::fs::File::create(path)?, &header, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, f64::MIN_POSITIVE, 0.0] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(fmt_num(f64::INFINITY).parse::<f64>().unwrap(), f64::INFINITY);
    }

    #[test]
    fn header_layout() {
        let h = trajectory_header(2);
        assert_eq!(h.len(), 1 + 12 + 5);
        assert_eq!(&h[1..4], &["x_1", "y_1", "lx_1"]);
        assert_eq!(h.last().unwrap(), "min_sep");
    }
}
