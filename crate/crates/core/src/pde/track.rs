//! Vortex detection by plaquette winding and identity tracking.

use crate::energy::VortexConfig;
use crate::exec::ExecPolicy;
use crate::geom::{TorusVec, Vec2};
use crate::harmonic::GridField;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackedVortices {
    pub positions: Vec<TorusVec>,
    pub degrees: Vec<i32>,
    pub t: f64,
    /// Set once a vortex has no matching detection; its position freezes.
    pub lost: Vec<bool>,
    /// Detections that matched no tracked vortex.
    pub extra: Vec<(TorusVec, i32)>,
}

impl TrackedVortices {
    pub fn from_config(cfg: &VortexConfig, t: f64) -> Self {
        TrackedVortices {
            positions: cfg.positions().to_vec(),
            degrees: cfg.degrees().to_vec(),
            t,
            lost: vec![false; cfg.len()],
            extra: Vec::new(),
        }
    }

    pub fn losses(&self) -> usize {
        self.lost.iter().filter(|&&l| l).count()
    }

    /// Smallest wrap distance between two vortices that are still tracked.
    pub fn min_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.positions.len() {
            for j in i + 1..self.positions.len() {
                if !self.lost[i] && !self.lost[j] {
                    best = best.min(self.positions[i].wrap_dist(&self.positions[j]));
                }
            }
        }
        best
    }
}

/// Zero of the bilinear interpolant on the unit cell, by Newton from the centre.
fn bilinear_zero(c: [Complex64; 4]) -> Option<(f64, f64)> {
    let [u00, u10, u01, u11] = c;
    let (mut s, mut t) = (0.5, 0.5);
    for _ in 0..30 {
        let f = u00 * (1.0 - s) * (1.0 - t) + u10 * s * (1.0 - t) + u01 * (1.0 - s) * t + u11 * s * t;
        let fs = (u10 - u00) * (1.0 - t) + (u11 - u01) * t;
        let ft = (u01 - u00) * (1.0 - s) + (u11 - u10) * s;
        let det = fs.re * ft.im - ft.re * fs.im;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let ds = (f.re * ft.im - ft.re * f.im) / det;
        let dt = (fs.re * f.im - f.re * fs.im) / det;
        s -= ds;
        t -= dt;
        if ds.abs() < 1e-14 && dt.abs() < 1e-14 {
            break;
        }
    }
    if (-0.5..=1.5).contains(&s) && (-0.5..=1.5).contains(&t) {
        Some((s.clamp(0.0, 1.0), t.clamp(0.0, 1.0)))
    } else {
        None
    }
}

/// Every plaquette with nonzero winding, located at the bilinear zero (or the
/// cell centre if the interpolant has no zero nearby).
pub fn detect_vortices(u: &GridField, policy: ExecPolicy) -> Vec<(TorusVec, i32)> {
    let n = u.n();
    let h = u.h();
    let rows: Vec<Vec<(TorusVec, i32)>> = policy.map_range(n, |i| {
        let i = i as isize;
        let mut found = Vec::new();
        for j in 0..n as isize {
            let w = u.plaquette_winding(i, j);
            if w == 0 {
                continue;
            }
            let c = [u.get(i, j), u.get(i + 1, j), u.get(i, j + 1), u.get(i + 1, j + 1)];
            let (s, t) = bilinear_zero(c).unwrap_or((0.5, 0.5));
            let p = Vec2::new((i as f64 + s) * h, (j as f64 + t) * h);
            found.push((TorusVec::from_planar(p), w as i32));
        }
        found
    });
    rows.into_iter().flatten().collect()
}

/// Detects vortices and matches them to `previous` by nearest neighbour of the
/// same degree within `r(a)/2`.
pub fn track_vortices(u: &GridField, t: f64, previous: &TrackedVortices, policy: ExecPolicy) -> TrackedVortices {
    let found = detect_vortices(u, policy);
    let m = previous.positions.len();
    let mut sep = f64::INFINITY;
    for a in 0..m {
        for b in a + 1..m {
            sep = sep.min(previous.positions[a].wrap_dist(&previous.positions[b]));
        }
    }
    let radius = if sep.is_finite() { 0.125 * sep } else { 0.25 };
    // all admissible pairs, closest first
    let mut pairs = Vec::new();
    for (k, p) in previous.positions.iter().enumerate() {
        if previous.lost[k] {
            continue;
        }
        for (f, (q, d)) in found.iter().enumerate() {
            let dist = p.wrap_dist(q);
            if *d == previous.degrees[k] && dist <= radius {
                pairs.push((dist, k, f));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut positions = previous.positions.clone();
    let mut matched = vec![false; m];
    let mut used = vec![false; found.len()];
    for (_, k, f) in pairs {
        if !matched[k] && !used[f] {
            matched[k] = true;
            used[f] = true;
            positions[k] = found[f].0;
        }
    }
    let lost = (0..m).map(|k| previous.lost[k] || !matched[k]).collect();
    let extra = found.iter().zip(&used).filter(|(_, u)| !**u).map(|(v, _)| *v).collect();
    TrackedVortices {
        positions,
        degrees: previous.degrees.clone(),
        t,
        lost,
        extra,
    }
}
