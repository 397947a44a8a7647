//! Core constant `gamma`: the finite part of the energy of a single radial
//! vortex on the unit disk,
//!
//! ```text
//! I(eps) = min 2 pi int_0^1 [ (f'^2 + f^2/r^2)/2 + (1 - f^2)^2/(4 eps^2) ] r dr,
//!          f(0) = 0, f(1) = 1,
//! gamma  = lim_{eps -> 0} I(eps) - pi log(1/eps).
//! ```
//!
//! Two independent discretizations are provided. [`radial_energy_descent`]
//! minimizes the exactly integrated energy of a piecewise-linear `f` on the
//! mesh `r = s^3` by damped Newton. [`radial_energy_collocation`] solves the
//! Euler-Lagrange equation by finite differences on an exponentially graded
//! mesh and evaluates the energy with the midpoint rule.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const DEFAULT_EPS_SCHEDULE: [f64; 3] = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];

/// Default number of mesh nodes for both radial solvers.
pub const DEFAULT_NODES: usize = 2000;

/// Newton stops once the max-norm of the discrete gradient is below this.
pub const GRADIENT_TOL: f64 = 1e-10;

const MAX_NEWTON: usize = 200;

// 4-point Gauss-Legendre on [-1, 1]
const GAUSS4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_8),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_8),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadialMethod {
    Descent,
    Collocation,
}

/// Radial node positions on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RadialMesh {
    /// `r = s^3`, clustering nodes at the core.
    Cubic,
    /// `r = (exp(a s) - 1)/(exp(a) - 1)`.
    Exponential(f64),
}

impl RadialMesh {
    pub fn nodes(self, count: usize) -> Vec<f64> {
        let m = count - 1;
        let mut r: Vec<f64> = (0..count)
            .map(|i| {
                let s = i as f64 / m as f64;
                match self {
                    RadialMesh::Cubic => s * s * s,
                    RadialMesh::Exponential(a) => (a * s).exp_m1() / a.exp_m1(),
                }
            })
            .collect();
        r[0] = 0.0;
        r[m] = 1.0;
        r
    }
}

/// A converged radial profile and its energy.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadialSolution {
    pub eps: f64,
    pub method: RadialMethod,
    pub r: Vec<f64>,
    pub f: Vec<f64>,
    /// `I(eps)` on this mesh.
    pub energy: f64,
    /// `I(eps) - pi log(1/eps)`.
    pub gamma_eps: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
}

/// Result of the `eps -> 0` extrapolation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoreConstant {
    pub gamma: f64,
    pub epsilon_schedule: Vec<f64>,
    /// `I(eps) - pi log(1/eps)` per schedule entry.
    pub estimates: Vec<f64>,
    /// Richardson extrapolations in `eps^2` from consecutive schedule pairs;
    /// `gamma` is the last one.
    pub extrapolations: Vec<f64>,
    pub method: RadialMethod,
}

impl CoreConstant {
    /// `13 pi / 12`, the energy excess of the profile `min(r/eps, 1)`.
    pub const UPPER_BOUND: f64 = 13.0 * PI / 12.0;

    /// Wraps a known value (no schedule).
    pub fn from_value(gamma: f64) -> Self {
        CoreConstant {
            gamma,
            epsilon_schedule: Vec::new(),
            estimates: Vec::new(),
            extrapolations: Vec::new(),
            method: RadialMethod::Descent,
        }
    }

    pub fn satisfies_upper_bound(&self) -> bool {
        self.gamma <= Self::UPPER_BOUND + 1e-3
    }

    /// Spread of the pairwise extrapolations (0 with fewer than two).
    pub fn extrapolation_spread(&self) -> f64 {
        let lo = self.extrapolations.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.extrapolations.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if self.extrapolations.len() < 2 {
            0.0
        } else {
            hi - lo
        }
    }
}

/// `gamma` by the descent method on [`DEFAULT_NODES`] nodes.
pub fn core_energy_gamma(eps_list: &[f64]) -> Result<CoreConstant> {
    core_energy_gamma_with(eps_list, RadialMethod::Descent, DEFAULT_NODES)
}

pub fn core_energy_gamma_with(eps_list: &[f64], method: RadialMethod, nodes: usize) -> Result<CoreConstant> {
    if eps_list.is_empty() {
        return Err(Error::Parameter("empty eps schedule".into()));
    }
    for (i, &e) in eps_list.iter().enumerate() {
        if !(e > 0.0 && e <= 0.1) {
            return Err(Error::Parameter(format!("eps = {e} outside (0, 0.1]")));
        }
        if i > 0 && e >= eps_list[i - 1] {
            return Err(Error::Parameter("eps schedule must be decreasing".into()));
        }
    }
    let estimates = eps_list
        .iter()
        .map(|&e| {
            let sol = match method {
                RadialMethod::Descent => radial_energy_descent(e, nodes)?,
                RadialMethod::Collocation => radial_energy_collocation(e, nodes)?,
            };
            Ok(sol.gamma_eps)
        })
        .collect::<Result<Vec<f64>>>()?;
    let extrapolations: Vec<f64> = eps_list
        .windows(2)
        .zip(estimates.windows(2))
        .map(|(e, g)| {
            let (a, b) = (e[0] * e[0], e[1] * e[1]);
            (a * g[1] - b * g[0]) / (a - b)
        })
        .collect();
    let gamma = *extrapolations.last().unwrap_or(&estimates[0]);
    Ok(CoreConstant {
        gamma,
        epsilon_schedule: eps_list.to_vec(),
        estimates,
        extrapolations,
        method,
    })
}

/// Tridiagonal system `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
/// Returns `None` if a pivot is not positive (used as a definiteness test).
fn solve_tridiagonal_spd(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut piv = diag[0];
    if !(piv > 0.0) {
        return None;
    }
    c[0] = upper[0] / piv;
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - lower[i] * c[i - 1];
        if !(piv > 0.0) {
            return None;
        }
        c[i] = upper[i] / piv;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}

/// General tridiagonal solve (no pivoting).
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut piv = diag[0];
    if piv == 0.0 {
        return None;
    }
    c[0] = upper[0] / piv;
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - lower[i] * c[i - 1];
        if piv == 0.0 || !piv.is_finite() {
            return None;
        }
        c[i] = upper[i] / piv;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}

fn initial_guess(r: &[f64], eps: f64) -> Vec<f64> {
    let g = |x: f64| x / (x * x + 2.0 * eps * eps).sqrt();
    let scale = g(1.0);
    r.iter().map(|&x| g(x) / scale).collect()
}

/// Hessian of one P1 element for the quadratic part
/// `(f'^2 + f^2/r^2)/2 * r`, integrated exactly.
fn element_quadratic(r0: f64, r1: f64) -> [[f64; 2]; 2] {
    let l = r1 - r0;
    // gradient part: (r0 + r1)/(4 l) (f1 - f0)^2
    let k = (r0 + r1) / (4.0 * l);
    // mass part: 1/2 int phi_a phi_b / r dr
    let (m00, m01, m11) = if r0 == 0.0 {
        (0.0, 0.0, 0.25)
    } else if l / r0 <= 0.05 {
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for (x, w) in GAUSS4 {
            let r = r0 + 0.5 * l * (1.0 + x);
            let p0 = (r1 - r) / l;
            let p1 = (r - r0) / l;
            let wt = 0.5 * l * w / r;
            a += wt * p0 * p0;
            b += wt * p0 * p1;
            c += wt * p1 * p1;
        }
        (0.5 * a, 0.5 * b, 0.5 * c)
    } else {
        let lg = (l / r0).ln_1p();
        let l2 = l * l;
        let i0 = (r1 * r1 * lg - 2.0 * r1 * l + 0.5 * (r1 * r1 - r0 * r0)) / l2;
        let i1 = (0.5 * (r1 * r1 - r0 * r0) - 2.0 * r0 * l + r0 * r0 * lg) / l2;
        let i01 = ((r1 + r0) * l - 0.5 * (r1 * r1 - r0 * r0) - r1 * r0 * lg) / l2;
        (0.5 * i0, 0.5 * i01, 0.5 * i1)
    };
    // Hessian of the element energy
    [[2.0 * (k + m00), 2.0 * (m01 - k)], [2.0 * (m01 - k), 2.0 * (k + m11)]]
}

/// Exact P1 energy `I(eps)` of nodal values `f` on mesh `r`.
pub fn radial_energy_p1(eps: f64, r: &[f64], f: &[f64]) -> f64 {
    let mut e = 0.0;
    for i in 0..r.len() - 1 {
        let a = element_quadratic(r[i], r[i + 1]);
        let (f0, f1) = (f[i], f[i + 1]);
        e += 0.5 * (a[0][0] * f0 * f0 + 2.0 * a[0][1] * f0 * f1 + a[1][1] * f1 * f1);
        e += element_potential(eps, r[i], r[i + 1], f0, f1).0;
    }
    2.0 * PI * e
}

/// Potential `int (1 - f^2)^2/(4 eps^2) r dr` on one element with its
/// gradient and Hessian in `(f0, f1)`; Gauss-4 is exact for this quintic.
fn element_potential(eps: f64, r0: f64, r1: f64, f0: f64, f1: f64) -> (f64, [f64; 2], [[f64; 2]; 2]) {
    let l = r1 - r0;
    let c = 1.0 / (4.0 * eps * eps);
    let mut v = 0.0;
    let mut g = [0.0; 2];
    let mut h = [[0.0; 2]; 2];
    for (x, w) in GAUSS4 {
        let p1 = 0.5 * (1.0 + x);
        let p0 = 1.0 - p1;
        let r = r0 + l * p1;
        let f = f0 * p0 + f1 * p1;
        let wt = 0.5 * l * w * r * c;
        let u = 1.0 - f * f;
        v += wt * u * u;
        let df = -4.0 * f * u * wt;
        let ddf = (12.0 * f * f - 4.0) * wt;
        let p = [p0, p1];
        for a in 0..2 {
            g[a] += df * p[a];
            for b in 0..2 {
                h[a][b] += ddf * p[a] * p[b];
            }
        }
    }
    (v, g, h)
}

/// Minimizes the P1 energy on the cubic mesh by damped Newton.
pub fn radial_energy_descent(eps: f64, nodes: usize) -> Result<RadialSolution> {
    check_radial_args(eps, nodes)?;
    let r = RadialMesh::Cubic.nodes(nodes);
    let mut f = initial_guess(&r, eps);
    let quad: Vec<[[f64; 2]; 2]> = r.windows(2).map(|w| element_quadratic(w[0], w[1])).collect();
    let m = nodes - 1; // unknowns are f[1..m]

    // energy (without 2 pi), gradient and tridiagonal Hessian over unknowns
    let assemble = |f: &[f64], want_hess: bool| {
        let mut e = 0.0;
        let mut g = vec![0.0; nodes];
        let mut diag = vec![0.0; nodes];
        let mut off = vec![0.0; nodes]; // off[i] couples i and i+1
        for i in 0..m {
            let a = &quad[i];
            let (f0, f1) = (f[i], f[i + 1]);
            let (pv, pg, ph) = element_potential(eps, r[i], r[i + 1], f0, f1);
            e += 0.5 * (a[0][0] * f0 * f0 + 2.0 * a[0][1] * f0 * f1 + a[1][1] * f1 * f1) + pv;
            g[i] += a[0][0] * f0 + a[0][1] * f1 + pg[0];
            g[i + 1] += a[1][0] * f0 + a[1][1] * f1 + pg[1];
            if want_hess {
                diag[i] += a[0][0] + ph[0][0];
                diag[i + 1] += a[1][1] + ph[1][1];
                off[i] += a[0][1] + ph[0][1];
            }
        }
        (e, g, diag, off)
    };
    let interior_max = |g: &[f64]| g[1..m].iter().fold(0.0f64, |acc, v| acc.max(v.abs()));

    let mut iterations = 0;
    let (mut e, mut g, mut diag, mut off) = assemble(&f, true);
    let mut gnorm = interior_max(&g);
    while gnorm > GRADIENT_TOL {
        if iterations >= MAX_NEWTON {
            return Err(Error::NonConvergence(format!(
                "descent at eps = {eps}: gradient {gnorm:e} after {iterations} Newton steps"
            )));
        }
        iterations += 1;
        let n = m - 1;
        let lower: Vec<f64> = (1..m).map(|i| if i > 1 { off[i - 1] } else { 0.0 }).collect();
        let upper: Vec<f64> = (1..m).map(|i| if i < m - 1 { off[i] } else { 0.0 }).collect();
        let rhs: Vec<f64> = (1..m).map(|i| -g[i]).collect();
        let d = solve_tridiagonal_spd(&lower, &diag[1..m], &upper, &rhs)
            .filter(|d| d.iter().zip(&rhs).map(|(a, b)| -a * b).sum::<f64>() < 0.0)
            .unwrap_or_else(|| {
                // indefinite Hessian far from the minimizer: fall back to the
                // Jacobi-scaled gradient
                (0..n).map(|k| rhs[k] / diag[k + 1].abs().max(1.0)).collect()
            });
        let slope: f64 = d.iter().zip(&rhs).map(|(a, b)| -a * b).sum();
        let mut alpha = 1.0;
        loop {
            let mut trial = f.clone();
            for k in 0..n {
                trial[k + 1] += alpha * d[k];
            }
            let (et, gt, dt, ot) = assemble(&trial, true);
            let gt_norm = interior_max(&gt);
            if et <= e + 1e-4 * alpha * slope || gt_norm < 0.5 * gnorm {
                f = trial;
                e = et;
                g = gt;
                diag = dt;
                off = ot;
                gnorm = gt_norm;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-12 {
                return Err(Error::NonConvergence(format!(
                    "descent at eps = {eps}: line search stalled at gradient {gnorm:e}"
                )));
            }
        }
    }
    let energy = 2.0 * PI * e;
    Ok(RadialSolution {
        eps,
        method: RadialMethod::Descent,
        gamma_eps: energy - PI * (1.0 / eps).ln(),
        r,
        f,
        energy,
        gradient_norm: gnorm,
        iterations,
    })
}

/// Solves `f'' + f'/r - f/r^2 + f (1 - f^2)/eps^2 = 0` by finite differences
/// in conservative form on an exponential mesh.
pub fn radial_energy_collocation(eps: f64, nodes: usize) -> Result<RadialSolution> {
    check_radial_args(eps, nodes)?;
    let r = RadialMesh::Exponential(10.0).nodes(nodes);
    let m = nodes - 1;
    let mut f = initial_guess(&r, eps);
    let inv_e2 = 1.0 / (eps * eps);
    let n = m - 1;

    // residual scaled by the control-volume area r_i (h_- + h_+)/2, which is
    // the gradient of the corresponding discrete energy
    let residual = |f: &[f64]| -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut res = vec![0.0; n];
        let mut lo = vec![0.0; n];
        let mut di = vec![0.0; n];
        let mut up = vec![0.0; n];
        for i in 1..m {
            let hm = r[i] - r[i - 1];
            let hp = r[i + 1] - r[i];
            let am = 0.5 * (r[i] + r[i - 1]) / hm;
            let ap = 0.5 * (r[i] + r[i + 1]) / hp;
            let vol = r[i] * 0.5 * (hm + hp);
            let fi = f[i];
            let k = i - 1;
            res[k] = ap * (f[i + 1] - fi) - am * (fi - f[i - 1]) - vol * fi / (r[i] * r[i])
                + vol * fi * (1.0 - fi * fi) * inv_e2;
            lo[k] = am;
            up[k] = ap;
            di[k] = -ap - am - vol / (r[i] * r[i]) + vol * (1.0 - 3.0 * fi * fi) * inv_e2;
        }
        (res, lo, di, up)
    };
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max(x.abs()));

    let (mut res, mut lo, mut di, mut up) = residual(&f);
    let mut rnorm = max_abs(&res);
    let mut iterations = 0;
    while rnorm > GRADIENT_TOL {
        if iterations >= MAX_NEWTON {
            return Err(Error::NonConvergence(format!(
                "collocation at eps = {eps}: residual {rnorm:e} after {iterations} Newton steps"
            )));
        }
        iterations += 1;
        lo[0] = 0.0;
        up[n - 1] = 0.0;
        let rhs: Vec<f64> = res.iter().map(|v| -v).collect();
        let d = solve_tridiagonal(&lo, &di, &up, &rhs)
            .ok_or_else(|| Error::NonConvergence(format!("collocation at eps = {eps}: singular Jacobian")))?;
        let mut alpha = 1.0;
        loop {
            let mut trial = f.clone();
            for k in 0..n {
                trial[k + 1] += alpha * d[k];
            }
            let out = residual(&trial);
            let tn = max_abs(&out.0);
            if tn < rnorm || alpha < 1e-3 {
                f = trial;
                (res, lo, di, up) = out;
                rnorm = tn;
                break;
            }
            alpha *= 0.5;
        }
    }
    let energy = midpoint_energy(eps, &r, &f);
    Ok(RadialSolution {
        eps,
        method: RadialMethod::Collocation,
        gamma_eps: energy - PI * (1.0 / eps).ln(),
        r,
        f,
        energy,
        gradient_norm: rnorm,
        iterations,
    })
}

fn midpoint_energy(eps: f64, r: &[f64], f: &[f64]) -> f64 {
    let c = 1.0 / (4.0 * eps * eps);
    let mut e = 0.0;
    for i in 0..r.len() - 1 {
        let h = r[i + 1] - r[i];
        let rm = 0.5 * (r[i] + r[i + 1]);
        let fm = 0.5 * (f[i] + f[i + 1]);
        let df = (f[i + 1] - f[i]) / h;
        let u = 1.0 - fm * fm;
        e += (0.5 * (df * df + fm * fm / (rm * rm)) + c * u * u) * rm * h;
    }
    2.0 * PI * e
}

fn check_radial_args(eps: f64, nodes: usize) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Parameter(format!("eps = {eps} outside (0, 1)")));
    }
    if nodes < 16 {
        return Err(Error::Parameter(format!("{nodes} radial nodes is too few")));
    }
    Ok(())
}

/// Radial vortex profile `rho(s)`, `s = r / eps`, with `rho(0) = 0` and
/// `rho -> 1`; used to dress the harmonic map into PDE initial data.
#[derive(Clone, Debug)]
pub enum CoreProfile {
    /// Monotone cubic (Fritsch-Carlson) interpolant of a radial minimizer.
    Sampled {
        s: Vec<f64>,
        rho: Vec<f64>,
        slope: Vec<f64>,
    },
    /// `tanh(s / sqrt 2)`.
    Tanh,
}

impl CoreProfile {
    /// Profile from a converged radial solution, rescaled to `s = r/eps`.
    pub fn from_solution(sol: &RadialSolution) -> Self {
        let s: Vec<f64> = sol.r.iter().map(|r| r / sol.eps).collect();
        let mut rho = sol.f.clone();
        // a monotone interpolant needs monotone data; the minimizer is
        // increasing but clamp rounding anyway
        for i in 1..rho.len() {
            rho[i] = rho[i].max(rho[i - 1]).min(1.0);
        }
        let slope = pchip_slopes(&s, &rho);
        CoreProfile::Sampled { s, rho, slope }
    }

    /// Minimizer at `eps = 1/128` by the descent method.
    pub fn minimizer() -> Result<Self> {
        Ok(CoreProfile::from_solution(&radial_energy_descent(
            1.0 / 128.0,
            DEFAULT_NODES,
        )?))
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            CoreProfile::Tanh => (s / std::f64::consts::SQRT_2).tanh(),
            CoreProfile::Sampled { s: xs, rho, slope } => {
                if s <= 0.0 {
                    return 0.0;
                }
                let last = xs.len() - 1;
                if s >= xs[last] {
                    return 1.0;
                }
                let i = xs.partition_point(|&x| x <= s) - 1;
                let h = xs[i + 1] - xs[i];
                let t = (s - xs[i]) / h;
                let (t2, t3) = (t * t, t * t * t);
                let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
                let h10 = t3 - 2.0 * t2 + t;
                let h01 = -2.0 * t3 + 3.0 * t2;
                let h11 = t3 - t2;
                h00 * rho[i] + h10 * h * slope[i] + h01 * rho[i + 1] + h11 * h * slope[i + 1]
            }
        }
    }
}

/// Fritsch-Carlson derivative estimates for monotone cubic interpolation.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] > 0.0 {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let v = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if v * d0 <= 0.0 {
            0.0
        } else if d0 * d1 <= 0.0 && v.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            v
        }
    };
    if n > 2 {
        d[0] = end(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    } else {
        d[0] = delta[0];
        d[n - 1] = delta[0];
    }
    d
}
