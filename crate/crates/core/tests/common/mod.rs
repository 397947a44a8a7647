//! Independent oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use torus_vortex::pde::{PdeMode, PdeSolver, PdeState};
use torus_vortex::{ExecPolicy, GridField, SimParams, Vec2};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Wrapped distance of `p` from the lattice.
pub fn lattice_distance(p: Vec2) -> f64 {
    p.wrapped().norm()
}

/// Uniform point on the torus at wrap distance >= `min_dist` from the origin.
pub fn random_point(rng: &mut ChaCha8Rng, min_dist: f64) -> Vec2 {
    loop {
        let p = Vec2::new(rng.random::<f64>(), rng.random::<f64>());
        if lattice_distance(p) >= min_dist {
            return p;
        }
    }
}

/// Brute-force `F(p)`: the Gaussian-damped Fourier series
/// `-(1/2pi) sum_{0<|k|<=K} exp(-s|k|^2) exp(2 pi i k.p) / |k|^2` at two small
/// `s`, Richardson-extrapolated to `s = 0` (the damped sum is affine in `s`
/// to `O(s^2)` away from the lattice).
pub struct BruteGreen {
    // half disk: (k1, k2, 1/|k|^2, |k|^2)
    modes: Vec<(f64, f64, f64, f64)>,
    s1: f64,
    s2: f64,
}

impl BruteGreen {
    pub fn new() -> Self {
        Self::with_cutoff(400, 2e-4, 4e-4)
    }

    pub fn with_cutoff(k: i64, s1: f64, s2: f64) -> Self {
        let mut modes = Vec::new();
        for k1 in 0..=k {
            for k2 in -k..=k {
                if k1 == 0 && k2 <= 0 {
                    continue;
                }
                let n2 = (k1 * k1 + k2 * k2) as f64;
                if n2 <= (k * k) as f64 {
                    modes.push((k1 as f64, k2 as f64, 1.0 / n2, n2));
                }
            }
        }
        BruteGreen { modes, s1, s2 }
    }

    fn damped(&self, p: Vec2) -> (f64, f64) {
        let (mut a, mut b) = (0.0, 0.0);
        for &(k1, k2, inv, n2) in &self.modes {
            let c = (2.0 * PI * (k1 * p.x + k2 * p.y)).cos() * inv;
            a += (-self.s1 * n2).exp() * c;
            b += (-self.s2 * n2).exp() * c;
        }
        // the half disk counts each +-k pair once
        (-a / PI, -b / PI)
    }

    pub fn eval(&self, p: Vec2) -> f64 {
        let (a, b) = self.damped(p);
        (self.s2 * a - self.s1 * b) / (self.s2 - self.s1)
    }
}

/// `log(2 pi |eta(i)|^2)` with `|eta(i)| = Gamma(1/4) / (2 pi^{3/4})`: the
/// constant term of `F(p) - log|p|` at the origin on the square torus.
pub fn robin_closed_form() -> f64 {
    const GAMMA_QUARTER: f64 = 3.625_609_908_221_908;
    let eta = GAMMA_QUARTER / (2.0 * PI.powf(0.75));
    (2.0 * PI * eta * eta).ln()
}

/// Observed order `log2(e_coarse / e_fine)`.
pub fn order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Physical root of `-w - mu k w^2 + |2 pi m|^2 = 0`, the plane-wave frequency of
/// the damped wave equation (the other root runs off to `-1/(mu k)`).
pub fn nlsw_frequency(mu_k: f64, m2: f64) -> f64 {
    let l = 4.0 * PI * PI * m2;
    if mu_k == 0.0 {
        return l;
    }
    // rationalized form, no cancellation for small mu k
    2.0 * l / (1.0 + (1.0 + 4.0 * mu_k * l).sqrt())
}

/// Max nodal error of a unimodular plane wave with wavevector `m` after `steps`
/// steps of size `dt` against `exp(i (2 pi m.x - w t))`.
pub fn plane_wave_error(mode: PdeMode, mu: f64, n: usize, m: (i64, i64), dt: f64, steps: usize) -> f64 {
    let params = SimParams::new(mu, 0.1, dt, 1.0).unwrap();
    let m2 = (m.0 * m.0 + m.1 * m.1) as f64;
    let w = nlsw_frequency(if mode == PdeMode::Nls { 0.0 } else { mu * params.k_eps }, m2);
    let u0 = GridField::plane_wave(n, m);
    let shift = |t: f64| {
        let z = Complex64::from_polar(1.0, -w * t);
        GridField::new(n, u0.values().iter().map(|v| v * z).collect()).unwrap()
    };
    let prev = match mode {
        PdeMode::Nls => None,
        PdeMode::Nlsw => Some(shift(-dt)),
    };
    let solver = PdeSolver::new(n, &params, ExecPolicy::Sequential);
    let mut s = PdeState::new(u0.clone(), prev, 0.0, dt, params, mode).unwrap();
    for _ in 0..steps {
        solver.step(&mut s).unwrap();
    }
    let exact = shift(s.t);
    s.u.values()
        .iter()
        .zip(exact.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}
