//! Fourier pseudospectral solvers for the field equations
//!
//! ```text
//! NLSW:  -i u_t + mu k_eps u_tt - Lap u + eps^-2 (|u|^2 - 1) u = 0
//! NLS:   -i u_t               - Lap u + eps^-2 (|u|^2 - 1) u = 0
//! ```
//!
//! NLS uses Strang splitting (pointwise phase rotation / exact linear flow).
//! NLSW uses a three-level scheme, implicit in the Laplacian and explicit in
//! the nonlinearity, which is diagonal in Fourier space.

mod compare;
mod fft;
mod identity;
mod track;

pub use compare::position_deviation;
pub use compare::{run_pde_compare, CompareOptions, CompareSample, PdeCompareReport, WindowEnd};
pub use fft::{laplacian_symbol, wavenumber, Fft2};
pub use identity::{weak_current_residuals, TEST_FUNCTIONS};
pub use track::{detect_vortices, track_vortices, TrackedVortices};

use crate::energy::{CoreProfile, MomentumVector, VortexConfig};
use crate::error::{Error, Result};
use crate::exec::{compensated_sum, ExecPolicy};
use crate::green::GreenEvaluator;
use crate::harmonic::{build_harmonic_map, GridField};
use crate::reduced::SimParams;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative jump of the discrete Hamiltonian that aborts an NLSW step.
pub const HAMILTONIAN_JUMP: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PdeMode {
    Nls,
    Nlsw,
}

impl PdeMode {
    /// NLS for `mu = 0`, NLSW otherwise.
    pub fn for_mu(mu: f64) -> Self {
        if mu == 0.0 {
            PdeMode::Nls
        } else {
            PdeMode::Nlsw
        }
    }
}

/// Which radial profile dresses the cores in [`init_field`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileChoice {
    Minimizer,
    Tanh,
}

impl ProfileChoice {
    pub fn profile(self) -> Result<CoreProfile> {
        match self {
            ProfileChoice::Minimizer => CoreProfile::minimizer(),
            ProfileChoice::Tanh => Ok(CoreProfile::Tanh),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PdeState {
    pub u: GridField,
    /// Previous time level; NLSW only.
    pub u_prev: Option<GridField>,
    pub t: f64,
    /// Fixed step of the three-level scheme.
    pub dt: f64,
    pub params: SimParams,
    pub mode: PdeMode,
    /// Vortex positions the field was built from (after grid snapping).
    pub initial: Option<VortexConfig>,
    hamiltonian: Option<f64>,
    energy: Option<f64>,
}

impl PdeState {
    pub fn new(
        u: GridField,
        u_prev: Option<GridField>,
        t: f64,
        dt: f64,
        params: SimParams,
        mode: PdeMode,
    ) -> Result<Self> {
        if mode == PdeMode::Nlsw {
            match &u_prev {
                Some(p) if p.n() == u.n() => {}
                Some(_) => return Err(Error::Parameter("time levels differ in size".into())),
                None => return Err(Error::Parameter("NLSW needs the previous level".into())),
            }
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Parameter(format!("dt = {dt} must be > 0")));
        }
        params.validate()?;
        Ok(PdeState {
            u,
            u_prev,
            t,
            dt,
            params,
            mode,
            initial: None,
            hamiltonian: None,
            energy: None,
        })
    }

    pub fn n(&self) -> usize {
        self.u.n()
    }

    /// Hamiltonian after the last NLSW step, if one was taken.
    pub fn cached_hamiltonian(&self) -> Option<f64> {
        self.hamiltonian
    }
}

/// `0.9 min(eps^2/8, h/(4 pi))`, the NLSW step bound.
pub fn stable_dt(n: usize, eps: f64) -> f64 {
    0.9 * (eps * eps / 8.0).min(1.0 / (n as f64 * 4.0 * PI))
}

/// Step bound per mode. Strang splitting around the `|u| = 1` background
/// resonates once `dt max|2 pi k|^2` passes `pi`, so NLS needs
/// `dt <= h^2/(2 pi)` on top of the nonlinear limit (energy blows up by a
/// factor 100 at `h^2/pi` on the dipole, n = 128).
pub fn stable_dt_for(mode: PdeMode, n: usize, eps: f64) -> f64 {
    match mode {
        PdeMode::Nlsw => stable_dt(n, eps),
        PdeMode::Nls => {
            let h = 1.0 / n as f64;
            0.9 * (eps * eps / 8.0).min(h * h / (2.0 * PI))
        }
    }
}

/// Cached FFT plans and symbols for one grid size and parameter set.
#[derive(Clone, Debug)]
pub struct PdeSolver {
    n: usize,
    eps: f64,
    mu_k: f64,
    fft: Fft2,
    lambda: Vec<f64>,
    policy: ExecPolicy,
}

impl PdeSolver {
    pub fn new(n: usize, params: &SimParams, policy: ExecPolicy) -> Self {
        PdeSolver {
            n,
            eps: params.eps,
            mu_k: params.mu * params.k_eps,
            fft: Fft2::new(n, policy),
            lambda: laplacian_symbol(n),
            policy,
        }
    }

    pub fn for_state(state: &PdeState, policy: ExecPolicy) -> Self {
        PdeSolver::new(state.n(), &state.params, policy)
    }

    pub fn fft(&self) -> &Fft2 {
        &self.fft
    }

    pub fn policy(&self) -> ExecPolicy {
        self.policy
    }

    fn check(&self, state: &PdeState) -> Result<()> {
        if state.n() != self.n {
            return Err(Error::Parameter(format!(
                "solver built for n = {}, state has n = {}",
                self.n,
                state.n()
            )));
        }
        Ok(())
    }

    fn h2(&self) -> f64 {
        let h = 1.0 / self.n as f64;
        h * h
    }

    /// `eps^-2 (|u|^2 - 1) u`.
    fn nonlinear(&self, u: &[Complex64]) -> Vec<Complex64> {
        let c = 1.0 / (self.eps * self.eps);
        self.policy.map_slice(u, |v| *v * (c * (v.norm_sqr() - 1.0)))
    }

    fn potential(&self, u: &[Complex64]) -> f64 {
        let c = 1.0 / (4.0 * self.eps * self.eps);
        compensated_sum(u.iter().map(|v| {
            let w = 1.0 - v.norm_sqr();
            c * w * w
        })) * self.h2()
    }

    /// `1/2 int |grad u|^2` from the Fourier coefficients.
    fn gradient_energy_hat(&self, u_hat: &[Complex64]) -> f64 {
        let n2 = (self.n * self.n) as f64;
        0.5 * compensated_sum(u_hat.iter().zip(&self.lambda).map(|(v, l)| l * v.norm_sqr())) / (n2 * n2)
    }

    /// Ginzburg-Landau energy with the spectral gradient.
    pub fn energy(&self, u: &GridField) -> f64 {
        let mut hat = u.values().to_vec();
        self.fft.forward(&mut hat);
        self.gradient_energy_hat(&hat) + self.potential(u.values())
    }

    /// `h^2 sum |u|^2`.
    pub fn mass(&self, u: &GridField) -> f64 {
        u.mass()
    }

    /// Spectral Laplacian.
    pub fn laplacian(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut hat = u.to_vec();
        self.fft.forward(&mut hat);
        for (v, l) in hat.iter_mut().zip(&self.lambda) {
            *v *= -l;
        }
        self.fft.inverse(&mut hat);
        hat
    }

    /// Spectral gradient `(d_x u, d_y u)`.
    pub fn gradient(&self, u: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.n;
        let mut hat = u.to_vec();
        self.fft.forward(&mut hat);
        let mut gx = hat.clone();
        let mut gy = hat;
        for k in 0..n * n {
            let i = Complex64::new(0.0, 2.0 * PI);
            // the Nyquist mode has no consistent sign, drop it
            let kx = if 2 * (k / n) == n { 0.0 } else { wavenumber(k / n, n) };
            let ky = if 2 * (k % n) == n { 0.0 } else { wavenumber(k % n, n) };
            gx[k] *= i * kx;
            gy[k] *= i * ky;
        }
        self.fft.inverse(&mut gx);
        self.fft.inverse(&mut gy);
        (gx, gy)
    }

    /// Discrete Hamiltonian. NLSW: `(mu k/2) int |(u - u_prev)/dt|^2 + (E(u) + E(u_prev))/2`;
    /// NLS: `E(u)`.
    pub fn hamiltonian(&self, state: &PdeState) -> f64 {
        match (&state.u_prev, state.mode) {
            (Some(prev), PdeMode::Nlsw) => {
                let kin = compensated_sum(
                    state
                        .u
                        .values()
                        .iter()
                        .zip(prev.values())
                        .map(|(a, b)| (a - b).norm_sqr()),
                ) * self.h2()
                    / (state.dt * state.dt);
                0.5 * self.mu_k * kin + 0.5 * (self.energy(&state.u) + self.energy(prev))
            }
            _ => self.energy(&state.u),
        }
    }

    fn rotate(&self, u: &mut [Complex64], tau: f64) {
        let c = tau / (self.eps * self.eps);
        self.policy.for_each_chunk_mut(u, self.n, |_, row| {
            for v in row {
                *v *= Complex64::from_polar(1.0, -c * (v.norm_sqr() - 1.0));
            }
        });
    }

    /// One Strang step of NLS: half rotation, exact linear flow, half rotation.
    pub fn step_nls(&self, state: &mut PdeState, dt: f64) -> Result<()> {
        self.check(state)?;
        let u = state.u.values_mut();
        self.rotate(u, 0.5 * dt);
        self.fft.forward(u);
        for (v, l) in u.iter_mut().zip(&self.lambda) {
            *v *= Complex64::from_polar(1.0, -l * dt);
        }
        self.fft.inverse(u);
        self.rotate(u, 0.5 * dt);
        state.t += dt;
        state.energy = None;
        state.hamiltonian = None;
        Ok(())
    }

    /// One step of the three-level NLSW scheme
    ///
    /// ```text
    /// mu k (u+ - 2u + u-)/dt^2 - i (u+ - u-)/(2 dt) = Lap (u+ + u-)/2 - N(u)
    /// ```
    pub fn step_nlsw(&self, state: &mut PdeState) -> Result<()> {
        self.check(state)?;
        let dt = state.dt;
        let prev = state
            .u_prev
            .as_ref()
            .ok_or_else(|| Error::Parameter("NLSW needs the previous level".into()))?;
        let before = match state.hamiltonian {
            Some(h) => h,
            None => self.hamiltonian(state),
        };
        let e_now = match state.energy {
            Some(e) => e,
            None => self.energy(&state.u),
        };
        let a = self.mu_k / (dt * dt);
        let b = Complex64::new(0.0, 0.5 / dt);
        let u = state.u.values();
        let um = prev.values();
        let nl = self.nonlinear(u);
        let mut rhs: Vec<Complex64> = u
            .iter()
            .zip(um)
            .zip(&nl)
            .map(|((v, w), f)| (2.0 * v - w) * a - b * w - f)
            .collect();
        let mut um_hat = um.to_vec();
        self.fft.forward(&mut rhs);
        self.fft.forward(&mut um_hat);
        for ((r, w), l) in rhs.iter_mut().zip(&um_hat).zip(&self.lambda) {
            *r = (*r - w * (0.5 * l)) / (Complex64::new(a + 0.5 * l, 0.0) - b);
        }
        let e_grad = self.gradient_energy_hat(&rhs);
        self.fft.inverse(&mut rhs);
        if rhs.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::UnstableStep {
                t: state.t,
                before,
                after: f64::NAN,
            });
        }
        let e_next = e_grad + self.potential(&rhs);
        let kin = compensated_sum(rhs.iter().zip(u).map(|(p, v)| (p - v).norm_sqr())) * self.h2() / (dt * dt);
        let after = 0.5 * self.mu_k * kin + 0.5 * (e_next + e_now);
        if (after - before).abs() > HAMILTONIAN_JUMP * before.abs() {
            return Err(Error::UnstableStep {
                t: state.t,
                before,
                after,
            });
        }
        let next = GridField::new(self.n, rhs)?;
        state.u_prev = Some(std::mem::replace(&mut state.u, next));
        state.t += dt;
        state.energy = Some(e_next);
        state.hamiltonian = Some(after);
        Ok(())
    }

    /// Dispatches on the state's mode with its own `dt`.
    pub fn step(&self, state: &mut PdeState) -> Result<()> {
        match state.mode {
            PdeMode::Nls => self.step_nls(state, state.dt),
            PdeMode::Nlsw => self.step_nlsw(state),
        }
    }

    /// Backward Taylor level for zero initial velocity:
    /// `u(-dt) = u0 + dt^2/(2 mu k) (Lap u0 - N(u0))`. For `mu = 0` a backward
    /// Strang step is used instead.
    pub fn previous_level(&self, u0: &GridField, dt: f64, params: &SimParams) -> Result<GridField> {
        if self.mu_k == 0.0 {
            let mut s = PdeState::new(u0.clone(), None, 0.0, dt, *params, PdeMode::Nls)?;
            self.step_nls(&mut s, -dt)?;
            return Ok(s.u);
        }
        let lap = self.laplacian(u0.values());
        let nl = self.nonlinear(u0.values());
        let c = dt * dt / (2.0 * self.mu_k);
        let v = u0
            .values()
            .iter()
            .zip(&lap)
            .zip(&nl)
            .map(|((u, l), f)| u + (l - f) * c)
            .collect();
        GridField::new(self.n, v)
    }
}

/// Well-prepared initial data `u0 = H(x; a, q) prod_j rho(|x - a_j| / eps)`
/// with zero initial velocity.
#[allow(clippy::too_many_arguments)]
pub fn init_field(
    green: &GreenEvaluator,
    n: usize,
    cfg: &VortexConfig,
    q: &MomentumVector,
    params: &SimParams,
    dt: f64,
    mode: PdeMode,
    profile: &CoreProfile,
    policy: ExecPolicy,
) -> Result<PdeState> {
    let h = 1.0 / n as f64;
    if params.eps < 4.0 * h {
        return Err(Error::CoreUnresolved {
            eps: params.eps,
            four_h: 4.0 * h,
        });
    }
    let map = build_harmonic_map(green, n, cfg, q, policy)?;
    let centres = map.config.planar_positions();
    let eps = params.eps;
    let mut values = map.field.into_values();
    policy.for_each_chunk_mut(&mut values, n, |i, row| {
        for (j, v) in row.iter_mut().enumerate() {
            let x = crate::geom::Vec2::new(i as f64 * h, j as f64 * h);
            let damp: f64 = centres
                .iter()
                .map(|c| profile.eval((x - *c).wrapped().norm() / eps))
                .product();
            *v *= damp;
        }
    });
    let u0 = GridField::new(n, values)?;
    let solver = PdeSolver::new(n, params, policy);
    let u_prev = match mode {
        PdeMode::Nlsw => Some(solver.previous_level(&u0, dt, params)?),
        PdeMode::Nls => None,
    };
    let mut state = PdeState::new(u0, u_prev, 0.0, dt, *params, mode)?;
    state.initial = Some(map.config);
    Ok(state)
}
