//! Canonical harmonic map `H(x; a, q)` on a periodic grid and the field
//! diagnostics shared with the PDE solver.
//!
//! `H` is unimodular, its current `j(H) = Im(conj(H) grad H)` is divergence
//! free, `curl j = 2 pi sum_j d_j delta_{a_j}`, and the mean current is `J q`
//! (the momentum is `Q = J q`). The map is built from the exact current
//!
//! ```text
//! g(x) = J q - sum_j d_j J grad F(x - a_j)
//! ```
//!
//! by integrating `g` along a comb spanning tree of the grid graph: first the
//! row `y = 0`, then every column upward. Near a vortex the singular part of
//! each edge integral is the exact angle increment, so only the smooth
//! remainder is approximated by the midpoint rule.

use crate::energy::{min_separation, renorm_grad, MomentumVector, VortexConfig};
use crate::error::{Error, Result};
use crate::exec::{compensated_sum, ExecPolicy};
use crate::geom::{TorusVec, Vec2};
use crate::green::GreenEvaluator;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Complex samples at the nodes `(i/n, j/n)`, stored row-major at `i * n + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    n: usize,
    values: Vec<Complex64>,
}

impl GridField {
    pub fn new(n: usize, values: Vec<Complex64>) -> Result<Self> {
        if n == 0 || values.len() != n * n {
            return Err(Error::Parameter(format!(
                "grid of size {n} needs {} values, got {}",
                n * n,
                values.len()
            )));
        }
        Ok(GridField { n, values })
    }

    pub fn from_fn(n: usize, f: impl Fn(Vec2) -> Complex64) -> Self {
        let h = 1.0 / n as f64;
        let values = (0..n * n)
            .map(|k| f(Vec2::new((k / n) as f64 * h, (k % n) as f64 * h)))
            .collect();
        GridField { n, values }
    }

    /// `exp(2 pi i m.x)`.
    pub fn plane_wave(n: usize, m: (i64, i64)) -> Self {
        // reduce the phase index mod n first so equal phases give equal bits
        let ni = n as i64;
        let values = (0..n * n)
            .map(|k| {
                let (i, j) = ((k / n) as i64, (k % n) as i64);
                let p = (m.0 * i + m.1 * j).rem_euclid(ni);
                Complex64::from_polar(1.0, 2.0 * PI * p as f64 / n as f64)
            })
            .collect();
        GridField { n, values }
    }

    pub fn constant(n: usize, v: Complex64) -> Self {
        GridField {
            n,
            values: vec![v; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Flat index with periodic wrap.
    pub fn idx(&self, i: isize, j: isize) -> usize {
        let n = self.n as isize;
        (i.rem_euclid(n) * n + j.rem_euclid(n)) as usize
    }

    pub fn get(&self, i: isize, j: isize) -> Complex64 {
        self.values[self.idx(i, j)]
    }

    pub fn node(&self, i: usize, j: usize) -> Vec2 {
        Vec2::new(i as f64 * self.h(), j as f64 * self.h())
    }

    pub fn conj(&self) -> Self {
        GridField {
            n: self.n,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// `h^2 sum |u|^2`.
    pub fn mass(&self) -> f64 {
        let h = self.h();
        compensated_sum(self.values.iter().map(|v| v.norm_sqr())) * h * h
    }

    /// Principal phase difference `arg(u(i+1, j) / u(i, j))`.
    pub fn phase_dx(&self, i: isize, j: isize) -> f64 {
        (self.get(i + 1, j) * self.get(i, j).conj()).arg()
    }

    /// Principal phase difference `arg(u(i, j+1) / u(i, j))`.
    pub fn phase_dy(&self, i: isize, j: isize) -> f64 {
        (self.get(i, j + 1) * self.get(i, j).conj()).arg()
    }

    /// Winding number of the plaquette with lower-left node `(i, j)`.
    pub fn plaquette_winding(&self, i: isize, j: isize) -> i64 {
        let s = self.phase_dx(i, j) + self.phase_dy(i + 1, j) - self.phase_dx(i, j + 1) - self.phase_dy(i, j);
        (s / (2.0 * PI)).round() as i64
    }
}

/// Output of [`build_harmonic_map`].
#[derive(Clone, Debug)]
pub struct HarmonicMap {
    pub field: GridField,
    /// Configuration actually used, with vortices moved to cell centres.
    pub config: VortexConfig,
    /// `q` transported along the snapping displacement.
    pub momentum: MomentumVector,
    /// Largest snapping displacement (max norm), at most `h/2`.
    pub perturbation: f64,
}

/// Vortices within this distance of an edge midpoint use the exact angle.
const NEAR_ZONE: f64 = 0.25;

fn snap_to_cell_centre(v: f64, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    let k = (v / h).floor();
    let k = if k >= n as f64 { k - n as f64 } else { k };
    (k + 0.5) * h
}

/// Builds the canonical harmonic map on an `n x n` grid.
pub fn build_harmonic_map(
    green: &GreenEvaluator,
    n: usize,
    cfg: &VortexConfig,
    q: &MomentumVector,
    policy: ExecPolicy,
) -> Result<HarmonicMap> {
    let min = 16 * cfg.len();
    if n < min {
        return Err(Error::GridTooCoarse {
            n,
            vortices: cfg.len(),
            min,
        });
    }
    q.check_compatible(cfg)?;
    let h = 1.0 / n as f64;
    let mut snapped = Vec::with_capacity(cfg.len());
    let mut qv = q.q;
    let mut perturbation = 0.0f64;
    for (p, &d) in cfg.positions().iter().zip(cfg.degrees()) {
        let s = Vec2::new(snap_to_cell_centre(p.x(), n), snap_to_cell_centre(p.y(), n));
        let delta = s - p.as_vec2();
        perturbation = perturbation.max(delta.max_abs());
        qv += delta * (2.0 * PI * d as f64);
        snapped.push(TorusVec::from_planar(s));
    }
    let config = VortexConfig::new(snapped, cfg.degrees().to_vec())?;
    let momentum = MomentumVector::new(qv);
    let mean_current = qv.symplectic();
    let vortices: Vec<(Vec2, f64)> = config
        .planar_positions()
        .into_iter()
        .zip(config.degrees().iter().map(|&d| d as f64))
        .collect();

    // integral of g along the edge from `a` to `a + step`; the angle part is
    // exact, the smooth remainder uses two-point Gauss (the phase at a node
    // accumulates one error per tree edge, so midpoint is not enough for the
    // divergence test on off-tree edges)
    let gauss = [0.5 - 0.5 / 3f64.sqrt(), 0.5 + 0.5 / 3f64.sqrt()];
    let edge = |a: Vec2, step: Vec2| -> Result<f64> {
        let b = a + step;
        let mid = a + step * 0.5;
        let mut acc = mean_current.dot(step);
        for &(c, d) in &vortices {
            if (mid - c).wrapped().norm() < NEAR_ZONE {
                let ra = (a - c).wrapped();
                let rb = (b - c).wrapped();
                acc += d * wrap_angle(rb.y.atan2(rb.x) - ra.y.atan2(ra.x));
                for t in gauss {
                    let (_, reg) = green.regular((a + step * t - c).wrapped())?;
                    acc -= 0.5 * d * reg.symplectic().dot(step);
                }
            } else {
                for t in gauss {
                    acc -= 0.5 * d * green.grad((a + step * t - c).wrapped())?.symplectic().dot(step);
                }
            }
        }
        Ok(acc)
    };

    let mut row0 = vec![0.0; n];
    for i in 1..n {
        row0[i] = row0[i - 1] + edge(Vec2::new((i - 1) as f64 * h, 0.0), Vec2::new(h, 0.0))?;
    }
    let mut phase = vec![0.0; n * n];
    let status = policy.map_chunks_mut(&mut phase, n, |i, col| -> Result<()> {
        col[0] = row0[i];
        let x = i as f64 * h;
        for j in 1..n {
            col[j] = col[j - 1] + edge(Vec2::new(x, (j - 1) as f64 * h), Vec2::new(0.0, h))?;
        }
        Ok(())
    });
    status.into_iter().collect::<Result<Vec<()>>>()?;
    let values = phase.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
    Ok(HarmonicMap {
        field: GridField { n, values },
        config,
        momentum,
        perturbation,
    })
}

fn wrap_angle(a: f64) -> f64 {
    let mut a = a;
    while a > PI {
        a -= 2.0 * PI;
    }
    while a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// Energy density, current, Jacobian and their totals.
#[derive(Clone, Debug)]
pub struct FieldDiagnostics {
    pub n: usize,
    pub energy_density: Vec<f64>,
    pub current: Vec<Vec2>,
    pub jacobian: Vec<f64>,
    /// `h^2 sum e`.
    pub total_energy: f64,
    /// `h^2 sum j`.
    pub total_momentum: Vec2,
}

impl FieldDiagnostics {
    /// `h^2 sum J` over nodes within `radius` of `center`.
    pub fn jacobian_in_disk(&self, center: Vec2, radius: f64) -> f64 {
        let n = self.n;
        let h = 1.0 / n as f64;
        let mut acc = Vec::new();
        for k in 0..n * n {
            let x = Vec2::new((k / n) as f64 * h, (k % n) as f64 * h);
            if (x - center).wrapped().norm() <= radius {
                acc.push(self.jacobian[k]);
            }
        }
        compensated_sum(acc) * h * h
    }

    pub fn total_jacobian(&self) -> f64 {
        let h = 1.0 / self.n as f64;
        compensated_sum(self.jacobian.iter().copied()) * h * h
    }
}

/// Central-difference diagnostics: `j = Im(conj(v) grad v)`,
/// `e = |grad v|^2/2 + (1 - |v|^2)^2/(4 eps^2)`, `J = Im(conj(d_x v) d_y v)`.
pub fn field_diagnostics(f: &GridField, eps: f64, policy: ExecPolicy) -> FieldDiagnostics {
    let n = f.n;
    let h = f.h();
    let inv2h = 0.5 / h;
    let c = 1.0 / (4.0 * eps * eps);
    let rows: Vec<Vec<(f64, Vec2, f64)>> = policy.map_range(n, |i| {
        let i = i as isize;
        (0..n as isize)
            .map(|j| {
                let v = f.get(i, j);
                let vx = (f.get(i + 1, j) - f.get(i - 1, j)) * inv2h;
                let vy = (f.get(i, j + 1) - f.get(i, j - 1)) * inv2h;
                let cur = Vec2::new((v.conj() * vx).im, (v.conj() * vy).im);
                let u = 1.0 - v.norm_sqr();
                let e = 0.5 * (vx.norm_sqr() + vy.norm_sqr()) + c * u * u;
                let jac = (vx.conj() * vy).im;
                (e, cur, jac)
            })
            .collect()
    });
    let mut energy_density = Vec::with_capacity(n * n);
    let mut current = Vec::with_capacity(n * n);
    let mut jacobian = Vec::with_capacity(n * n);
    for row in rows {
        for (e, j, jac) in row {
            energy_density.push(e);
            current.push(j);
            jacobian.push(jac);
        }
    }
    let h2 = h * h;
    let total_energy = compensated_sum(energy_density.iter().copied()) * h2;
    let total_momentum = Vec2::new(
        compensated_sum(current.iter().map(|j| j.x)),
        compensated_sum(current.iter().map(|j| j.y)),
    ) * h2;
    FieldDiagnostics {
        n,
        energy_density,
        current,
        jacobian,
        total_energy,
        total_momentum,
    }
}

/// Pass thresholds for [`verify_canonical`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CanonicalTolerances {
    pub unimodularity: f64,
    /// Far-field divergence must be `<= divergence_c * h / r(a)^3`. The
    /// residual itself behaves like `h^2 / r(a)^4`, so this is a resolution
    /// requirement `h / r(a)` below a fixed ratio.
    pub divergence_c: f64,
    /// `|int j - J q| <= momentum_c * h^2`.
    pub momentum_c: f64,
}

impl Default for CanonicalTolerances {
    fn default() -> Self {
        CanonicalTolerances {
            unimodularity: 1e-12,
            // dipole (r = 0.1) residual times n: 66, 36, 19 at n = 128, 256, 512
            divergence_c: 0.25,
            momentum_c: 1.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CanonicalReport {
    pub n: usize,
    /// `max ||H| - 1|`.
    pub unimodularity: f64,
    /// Max discrete divergence of the edge current over nodes farther than `4h`
    /// from every vortex.
    pub divergence_near: f64,
    /// Same, over nodes at least `r(a)` from every vortex.
    pub divergence_far: f64,
    pub far_radius: f64,
    pub divergence_tol: f64,
    /// Plaquette winding at each vortex.
    pub windings: Vec<i64>,
    /// Plaquettes with nonzero winding that hold no vortex.
    pub spurious_windings: usize,
    /// `h^2 sum` of the edge current.
    pub momentum: Vec2,
    /// `|momentum - J q|`.
    pub momentum_error: f64,
    pub unimodular_ok: bool,
    pub divergence_ok: bool,
    pub windings_ok: bool,
    pub momentum_ok: bool,
    pub pass: bool,
}

fn plaquette_of(p: TorusVec, n: usize) -> (usize, usize) {
    let h = 1.0 / n as f64;
    (
        ((p.x() / h).floor() as usize).min(n - 1),
        ((p.y() / h).floor() as usize).min(n - 1),
    )
}

/// Checks the four defining properties with principal-value edge phases.
pub fn verify_canonical(
    f: &GridField,
    cfg: &VortexConfig,
    q: &MomentumVector,
    tol: &CanonicalTolerances,
) -> CanonicalReport {
    verify_canonical_points(f, cfg.positions(), cfg.degrees(), q.q, tol)
}

/// [`verify_canonical`] without the configuration invariants, so that the
/// vortex-free case (plane waves) can be checked too.
pub fn verify_canonical_points(
    f: &GridField,
    positions: &[TorusVec],
    degrees: &[i32],
    q: Vec2,
    tol: &CanonicalTolerances,
) -> CanonicalReport {
    let n = f.n;
    let h = f.h();
    let unimodularity = f.values.iter().map(|v| (v.norm() - 1.0).abs()).fold(0.0, f64::max);
    let dx: Vec<f64> = (0..n * n)
        .map(|k| f.phase_dx((k / n) as isize, (k % n) as isize))
        .collect();
    let dy: Vec<f64> = (0..n * n)
        .map(|k| f.phase_dy((k / n) as isize, (k % n) as isize))
        .collect();
    let at = |v: &[f64], i: isize, j: isize| v[f.idx(i, j)];
    let planar: Vec<Vec2> = positions.iter().map(|p| p.as_vec2()).collect();
    let far_radius = if planar.len() < 2 {
        0.0
    } else {
        0.25 * crate::energy::min_pair_distance(&planar)
    };
    let mut divergence_near = 0.0f64;
    let mut divergence_far = 0.0f64;
    for i in 0..n as isize {
        for j in 0..n as isize {
            let x = Vec2::new(i as f64 * h, j as f64 * h);
            let dist = planar
                .iter()
                .map(|p| (x - *p).wrapped().norm())
                .fold(f64::INFINITY, f64::min);
            if dist <= 4.0 * h {
                continue;
            }
            let div = (at(&dx, i, j) - at(&dx, i - 1, j) + at(&dy, i, j) - at(&dy, i, j - 1)) / (h * h);
            divergence_near = divergence_near.max(div.abs());
            if dist >= far_radius {
                divergence_far = divergence_far.max(div.abs());
            }
        }
    }
    let vortex_cells: Vec<(usize, usize)> = positions.iter().map(|p| plaquette_of(*p, n)).collect();
    let windings: Vec<i64> = vortex_cells
        .iter()
        .map(|&(i, j)| f.plaquette_winding(i as isize, j as isize))
        .collect();
    let mut spurious_windings = 0;
    for i in 0..n {
        for j in 0..n {
            if !vortex_cells.contains(&(i, j)) && f.plaquette_winding(i as isize, j as isize) != 0 {
                spurious_windings += 1;
            }
        }
    }
    let momentum = Vec2::new(compensated_sum(dx.iter().copied()), compensated_sum(dy.iter().copied())) * h;
    let momentum_error = (momentum - q.symplectic()).norm();
    let unimodular_ok = unimodularity <= tol.unimodularity;
    let scale = if planar.len() < 2 { 0.25 } else { far_radius };
    let divergence_tol = tol.divergence_c * h / scale.powi(3);
    let divergence_ok = divergence_far <= divergence_tol;
    let windings_ok = spurious_windings == 0 && windings.iter().zip(degrees).all(|(w, &d)| *w == d as i64);
    let momentum_ok = momentum_error <= tol.momentum_c * h * h;
    CanonicalReport {
        n,
        unimodularity,
        divergence_near,
        divergence_far,
        far_radius,
        divergence_tol,
        windings,
        spurious_windings,
        momentum,
        momentum_error,
        unimodular_ok,
        divergence_ok,
        windings_ok,
        momentum_ok,
        pass: unimodular_ok && divergence_ok && windings_ok && momentum_ok,
    }
}

/// Test function `eta(x) = c . y phi(|y|)`, `y = x - a_j`, with `phi` a
/// quintic C^2 step equal to 1 on `|y| <= r_linear` and 0 on `|y| >= r_support`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EtaSpec {
    pub direction: Vec2,
    pub r_linear: f64,
    pub r_support: f64,
}

impl EtaSpec {
    pub fn new(direction: Vec2, r_linear: f64, r_support: f64) -> Self {
        EtaSpec {
            direction,
            r_linear,
            r_support,
        }
    }

    /// Linear on `B_{r(a)/4}`, supported in `B_{r(a)}`.
    pub fn standard(cfg: &VortexConfig, direction: Vec2) -> Self {
        let r = min_separation(cfg);
        EtaSpec::new(direction, 0.25 * r, r)
    }

    pub fn validate(&self, cfg: &VortexConfig, j: usize) -> Result<()> {
        if j >= cfg.len() {
            return Err(Error::EtaSpecInvalid(format!("no vortex {j}")));
        }
        if !(self.r_linear > 0.0 && self.r_linear < self.r_support) {
            return Err(Error::EtaSpecInvalid(format!(
                "linearity radius {} must be in (0, {})",
                self.r_linear, self.r_support
            )));
        }
        if self.r_support >= 0.5 {
            return Err(Error::EtaSpecInvalid("support must fit in the torus".into()));
        }
        let a = cfg.positions()[j];
        for (k, p) in cfg.positions().iter().enumerate() {
            if k != j && a.wrap_dist(p) <= self.r_support {
                return Err(Error::EtaSpecInvalid(format!(
                    "support of radius {} reaches vortex {k}",
                    self.r_support
                )));
            }
        }
        Ok(())
    }

    fn step(&self, r: f64) -> (f64, f64, f64) {
        let w = self.r_support - self.r_linear;
        if r <= self.r_linear {
            return (1.0, 0.0, 0.0);
        }
        if r >= self.r_support {
            return (0.0, 0.0, 0.0);
        }
        let s = (r - self.r_linear) / w;
        let (s2, s3) = (s * s, s * s * s);
        (
            1.0 - (10.0 * s3 - 15.0 * s2 * s2 + 6.0 * s3 * s2),
            -(30.0 * s2 - 60.0 * s3 + 30.0 * s2 * s2) / w,
            -(60.0 * s - 180.0 * s2 + 120.0 * s3) / (w * w),
        )
    }

    /// Hessian of `eta` at offset `y` from the centre.
    pub fn hessian(&self, y: Vec2) -> [[f64; 2]; 2] {
        let r = y.norm();
        let (phi, dphi, d2phi) = self.step(r);
        let _ = phi;
        if dphi == 0.0 && d2phi == 0.0 {
            return [[0.0; 2]; 2];
        }
        let e = [y.x / r, y.y / r];
        let c = [self.direction.x, self.direction.y];
        let lin = self.direction.dot(y);
        let mut out = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                let id = if a == b { 1.0 } else { 0.0 };
                let hess_phi = d2phi * e[a] * e[b] + dphi / r * (id - e[a] * e[b]);
                out[a][b] = lin * hess_phi + c[a] * dphi * e[b] + c[b] * dphi * e[a];
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PairingReport {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

/// Both sides of `int <Hess(eta) j(H), J j(H)> = -grad eta(a_j) . J grad_{a_j} W`.
///
/// The left side is a grid sum of the edge-averaged current of the harmonic
/// map, excluding a `4h` disk around `a_j` (where `Hess eta` vanishes anyway
/// once `r_linear >= 4h`).
pub fn hessian_pairing_check(
    green: &GreenEvaluator,
    cfg: &VortexConfig,
    q: &MomentumVector,
    j_index: usize,
    eta: &EtaSpec,
    n: usize,
    policy: ExecPolicy,
) -> Result<PairingReport> {
    eta.validate(cfg, j_index)?;
    let map = build_harmonic_map(green, n, cfg, q, policy)?;
    let f = &map.field;
    let h = f.h();
    let center = map.config.positions()[j_index].as_vec2();
    let rows: Vec<f64> = policy.map_range(n, |i| {
        let i = i as isize;
        let terms = (0..n as isize).filter_map(|j| {
            let x = Vec2::new(i as f64 * h, j as f64 * h);
            let y = (x - center).wrapped();
            if y.norm() <= 4.0 * h || y.norm() >= eta.r_support {
                return None;
            }
            let cur = Vec2::new(
                0.5 * (f.phase_dx(i, j) + f.phase_dx(i - 1, j)),
                0.5 * (f.phase_dy(i, j) + f.phase_dy(i, j - 1)),
            ) / h;
            let hs = eta.hessian(y);
            let hj = Vec2::new(hs[0][0] * cur.x + hs[0][1] * cur.y, hs[1][0] * cur.x + hs[1][1] * cur.y);
            Some(hj.dot(cur.symplectic()))
        });
        compensated_sum(terms)
    });
    let lhs = compensated_sum(rows) * h * h;
    let grad = renorm_grad(green, &map.config, &map.momentum)?;
    let rhs = -eta.direction.dot(grad[j_index].symplectic());
    let abs_err = (lhs - rhs).abs();
    Ok(PairingReport {
        lhs,
        rhs,
        abs_err,
        rel_err: abs_err / (1.0 + rhs.abs()),
    })
}
