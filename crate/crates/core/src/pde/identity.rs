//! Time-averaged weak form of the current identity
//!
//! ```text
//! div j(u) - mu k d_t Im(conj(u) u_t) + 1/2 d_t |u|^2 = 0
//! ```
//!
//! tested against smooth periodic functions.

use super::{init_field, PdeMode, PdeSolver, PdeState};
use crate::energy::{CoreProfile, MomentumVector, VortexConfig};
use crate::error::Result;
use crate::exec::{compensated_sum, ExecPolicy};
use crate::geom::Vec2;
use crate::green::GreenEvaluator;
use crate::reduced::SimParams;
use num_complex::Complex64;
use std::f64::consts::PI;

type TestFn = fn(Vec2) -> (f64, Vec2);

fn t1(x: Vec2) -> (f64, Vec2) {
    let a = 2.0 * PI * x.x;
    (a.cos(), Vec2::new(-2.0 * PI * a.sin(), 0.0))
}

fn t2(x: Vec2) -> (f64, Vec2) {
    let a = 2.0 * PI * x.y;
    (a.sin(), Vec2::new(0.0, 2.0 * PI * a.cos()))
}

fn t3(x: Vec2) -> (f64, Vec2) {
    let a = 2.0 * PI * (x.x + x.y);
    let d = -2.0 * PI * a.sin();
    (a.cos(), Vec2::new(d, d))
}

fn t4(x: Vec2) -> (f64, Vec2) {
    let a = 2.0 * PI * (x.x - 2.0 * x.y);
    let c = 2.0 * PI * a.cos();
    (a.sin(), Vec2::new(c, -2.0 * c))
}

fn t5(x: Vec2) -> (f64, Vec2) {
    let (a, b) = (2.0 * PI * x.x, 4.0 * PI * x.y);
    (
        a.cos() * b.sin(),
        Vec2::new(-2.0 * PI * a.sin() * b.sin(), 4.0 * PI * a.cos() * b.cos()),
    )
}

/// The five test functions and their gradients.
pub const TEST_FUNCTIONS: [TestFn; 5] = [t1, t2, t3, t4, t5];

struct Probe {
    phi: Vec<Vec<f64>>,
    grad: Vec<Vec<Vec2>>,
    h2: f64,
}

impl Probe {
    fn new(n: usize) -> Self {
        let h = 1.0 / n as f64;
        let nodes: Vec<Vec2> = (0..n * n)
            .map(|k| Vec2::new((k / n) as f64 * h, (k % n) as f64 * h))
            .collect();
        let (phi, grad) = TEST_FUNCTIONS
            .iter()
            .map(|f| nodes.iter().map(|x| f(*x)).unzip())
            .unzip();
        Probe { phi, grad, h2: h * h }
    }

    /// `int grad(phi) . j(u)` per test function.
    fn flux(&self, solver: &PdeSolver, u: &[Complex64]) -> Vec<f64> {
        let (gx, gy) = solver.gradient(u);
        self.grad
            .iter()
            .map(|g| {
                compensated_sum(u.iter().zip(&gx).zip(&gy).zip(g).map(|(((v, a), b), d)| {
                    let j = Vec2::new((v.conj() * a).im, (v.conj() * b).im);
                    d.dot(j)
                })) * self.h2
            })
            .collect()
    }

    /// `int phi F(u, u_t)` per test function.
    fn weighted(&self, u: &[Complex64], ut: &[Complex64], f: impl Fn(Complex64, Complex64) -> f64) -> Vec<f64> {
        self.phi
            .iter()
            .map(|p| compensated_sum(u.iter().zip(ut).zip(p).map(|((a, b), w)| w * f(*a, *b))) * self.h2)
            .collect()
    }
}

/// Runs the solver from the well-prepared data on `[0, t_final]` and returns
/// the time-averaged residual against each of [`TEST_FUNCTIONS`].
#[allow(clippy::too_many_arguments)]
pub fn weak_current_residuals(
    green: &GreenEvaluator,
    cfg: &VortexConfig,
    q: &MomentumVector,
    params: &SimParams,
    n: usize,
    dt: f64,
    profile: &CoreProfile,
    policy: ExecPolicy,
) -> Result<Vec<f64>> {
    let mode = PdeMode::for_mu(params.mu);
    let mut state: PdeState = init_field(green, n, cfg, q, params, dt, mode, profile, policy)?;
    let solver = PdeSolver::for_state(&state, policy);
    let mu_k = params.mu * params.k_eps;
    let probe = Probe::new(n);
    let steps = (params.t_final / dt).round() as usize;
    let zero = vec![Complex64::new(0.0, 0.0); n * n];

    let mass0 = probe.weighted(state.u.values(), &zero, |a, _| a.norm_sqr());
    let mut flux_int = vec![0.0; 5];
    let mut levels: Vec<Vec<Complex64>> = vec![state.u.values().to_vec()];
    let add_flux = |u: &[Complex64], w: f64, acc: &mut Vec<f64>| {
        for (a, f) in acc.iter_mut().zip(probe.flux(&solver, u)) {
            *a += w * f;
        }
    };
    add_flux(state.u.values(), 0.5 * dt, &mut flux_int);
    for k in 1..=steps {
        solver.step(&mut state)?;
        let w = if k == steps { 0.5 * dt } else { dt };
        add_flux(state.u.values(), w, &mut flux_int);
        levels.push(state.u.values().to_vec());
        if levels.len() > 3 {
            levels.remove(0);
        }
    }
    let u_end = state.u.values();
    let ut_end: Vec<Complex64> = if levels.len() == 3 {
        (0..n * n)
            .map(|i| (3.0 * levels[2][i] - 4.0 * levels[1][i] + levels[0][i]) / (2.0 * dt))
            .collect()
    } else {
        (0..n * n).map(|i| (levels[1][i] - levels[0][i]) / dt).collect()
    };
    let mass1 = probe.weighted(u_end, &zero, |a, _| a.norm_sqr());
    // the initial velocity is zero
    let mom1 = probe.weighted(u_end, &ut_end, |a, b| (a.conj() * b).im);
    let t = steps as f64 * dt;
    Ok((0..5)
        .map(|m| (-flux_int[m] - mu_k * mom1[m] + 0.5 * (mass1[m] - mass0[m])) / t)
        .collect())
}
