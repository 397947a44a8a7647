//! The reduced point-vortex law
//!
//! ```text
//! mu a_j'' + d_j J a_j' = -(1/pi) grad_{a_j} W(a; q_*(a)),
//! ```
//!
//! with `a_j(0) = a_j^0`, `a_j'(0) = 0`, and the momentum `q_*` carried along
//! the continuous lift of the trajectory. For `mu = 0` the law is the first
//! order system `a_j' = (d_j / pi) J grad_{a_j} W`.

use crate::energy::{
    lattice_anchor, lattice_residual, min_pair_distance, renorm_grad_planar, renormalized_energy_planar,
    MomentumVector, VortexConfig,
};
use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::geom::{TorusVec, Vec2};
use crate::green::GreenEvaluator;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Lift drift beyond this means the lift bookkeeping is broken.
pub const LIFT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub mu: f64,
    pub eps: f64,
    /// `1 / |log eps|`.
    pub k_eps: f64,
    pub dt: f64,
    pub t_final: f64,
    /// Integration stops once two vortices are closer than this.
    pub collision_radius: f64,
    /// Record every `output_stride`-th step.
    pub output_stride: usize,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams::new(0.01, 0.05, 1e-4, 1.0).expect("valid defaults")
    }
}

impl SimParams {
    pub fn new(mu: f64, eps: f64, dt: f64, t_final: f64) -> Result<Self> {
        let p = SimParams {
            mu,
            eps,
            k_eps: 1.0 / eps.ln().abs(),
            dt,
            t_final,
            collision_radius: 1e-3,
            output_stride: 1,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.output_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return bad(format!("mu = {} must be >= 0", self.mu));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("eps = {} outside (0, 1)", self.eps));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt = {} must be > 0", self.dt));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return bad(format!("t_final = {} must be >= 0", self.t_final));
        }
        if !(self.collision_radius > 0.0) {
            return bad("collision_radius must be > 0".into());
        }
        if self.output_stride == 0 {
            return bad("output_stride must be >= 1".into());
        }
        Ok(())
    }

    /// Number of fixed steps covering `[0, t_final]`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}

/// ODE state: lifted (unwrapped) positions, velocities and the data needed
/// to reconstruct `q_*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedState {
    pub t: f64,
    pub lifted_positions: Vec<Vec2>,
    pub velocities: Vec<Vec2>,
    /// `a_j(0)` on the same lift.
    pub initial_positions: Vec<Vec2>,
    /// `q_0`.
    pub base_momentum: Vec2,
}

impl ReducedState {
    /// Initial data: `a(0) = a^0`, `a'(0) = 0`, `q_*(0) = q_0`.
    pub fn initial(cfg: &VortexConfig, q0: &MomentumVector) -> Self {
        let pos = cfg.planar_positions();
        ReducedState {
            t: 0.0,
            velocities: vec![Vec2::ZERO; pos.len()],
            initial_positions: pos.clone(),
            lifted_positions: pos,
            base_momentum: q0.q,
        }
    }

    pub fn wrapped_positions(&self) -> Vec<TorusVec> {
        self.lifted_positions
            .iter()
            .map(|p| TorusVec::from_planar(*p))
            .collect()
    }

    /// `q_0 + 2 pi sum_j d_j (a_j(t) - a_j(0))` without the lattice check.
    pub fn current_momentum(&self, degrees: &[i32]) -> Vec2 {
        let shift: Vec2 = self
            .lifted_positions
            .iter()
            .zip(&self.initial_positions)
            .zip(degrees)
            .map(|((a, a0), &d)| (*a - *a0) * d as f64)
            .sum();
        self.base_momentum + shift * (2.0 * PI)
    }

    pub fn kinetic(&self) -> f64 {
        self.velocities.iter().map(|v| v.norm2()).sum()
    }
}

/// `q_*(t)`, checked against the lattice of the projected positions.
pub fn update_lift(state: &ReducedState, degrees: &[i32]) -> Result<MomentumVector> {
    let q = state.current_momentum(degrees);
    let wrapped: Vec<Vec2> = state.wrapped_positions().iter().map(TorusVec::as_vec2).collect();
    let r = lattice_residual(q, lattice_anchor(&wrapped, degrees));
    if r > LIFT_TOL {
        return Err(Error::LatticeViolation(r));
    }
    Ok(MomentumVector::new(q))
}

/// Right-hand side `(a', a'')`. For `mu = 0` the first entry is the
/// first-order velocity field and the second is zero.
pub fn ode_rhs(
    green: &GreenEvaluator,
    state: &ReducedState,
    params: &SimParams,
    degrees: &[i32],
) -> Result<(Vec<Vec2>, Vec<Vec2>)> {
    let sep = min_pair_distance(&state.lifted_positions);
    if sep < params.collision_radius {
        return Err(Error::CollisionImminent(sep));
    }
    let q = state.current_momentum(degrees);
    let grad = renorm_grad_planar(green, &state.lifted_positions, degrees, q)?;
    if params.mu == 0.0 {
        let vel = grad
            .iter()
            .zip(degrees)
            .map(|(g, &d)| g.symplectic() * (d as f64 / PI))
            .collect();
        return Ok((vel, vec![Vec2::ZERO; degrees.len()]));
    }
    let acc = grad
        .iter()
        .zip(&state.velocities)
        .zip(degrees)
        .map(|((g, v), &d)| (*g * (-1.0 / PI) - v.symplectic() * d as f64) / params.mu)
        .collect();
    Ok((state.velocities.clone(), acc))
}

fn axpy(base: &[Vec2], k: &[Vec2], h: f64) -> Vec<Vec2> {
    base.iter().zip(k).map(|(b, k)| *b + *k * h).collect()
}

fn rk4_inner(
    green: &GreenEvaluator,
    state: &ReducedState,
    params: &SimParams,
    degrees: &[i32],
) -> Result<ReducedState> {
    let h = params.dt;
    let stage = |x: Vec<Vec2>, v: Vec<Vec2>, dt: f64| ReducedState {
        t: state.t + dt,
        lifted_positions: x,
        velocities: v,
        initial_positions: state.initial_positions.clone(),
        base_momentum: state.base_momentum,
    };
    let x0 = &state.lifted_positions;
    let mut next = if params.mu == 0.0 {
        let (k1, _) = ode_rhs(green, state, params, degrees)?;
        let s2 = stage(axpy(x0, &k1, 0.5 * h), Vec::new(), 0.5 * h);
        let (k2, _) = ode_rhs(green, &s2, params, degrees)?;
        let s3 = stage(axpy(x0, &k2, 0.5 * h), Vec::new(), 0.5 * h);
        let (k3, _) = ode_rhs(green, &s3, params, degrees)?;
        let s4 = stage(axpy(x0, &k3, h), Vec::new(), h);
        let (k4, _) = ode_rhs(green, &s4, params, degrees)?;
        let x = (0..x0.len())
            .map(|j| x0[j] + (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (h / 6.0))
            .collect();
        let mut s = stage(x, Vec::new(), h);
        // report the first-order velocity at the new state
        s.velocities = ode_rhs(green, &s, params, degrees)?.0;
        s
    } else {
        let v0 = &state.velocities;
        let (kx1, kv1) = ode_rhs(green, state, params, degrees)?;
        let s2 = stage(axpy(x0, &kx1, 0.5 * h), axpy(v0, &kv1, 0.5 * h), 0.5 * h);
        let (kx2, kv2) = ode_rhs(green, &s2, params, degrees)?;
        let s3 = stage(axpy(x0, &kx2, 0.5 * h), axpy(v0, &kv2, 0.5 * h), 0.5 * h);
        let (kx3, kv3) = ode_rhs(green, &s3, params, degrees)?;
        let s4 = stage(axpy(x0, &kx3, h), axpy(v0, &kv3, h), h);
        let (kx4, kv4) = ode_rhs(green, &s4, params, degrees)?;
        let comb = |b: &[Vec2], k1: &[Vec2], k2: &[Vec2], k3: &[Vec2], k4: &[Vec2]| {
            (0..b.len())
                .map(|j| b[j] + (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (h / 6.0))
                .collect::<Vec<_>>()
        };
        stage(comb(x0, &kx1, &kx2, &kx3, &kx4), comb(v0, &kv1, &kv2, &kv3, &kv4), h)
    };
    if next
        .lifted_positions
        .iter()
        .chain(&next.velocities)
        .any(|v| !(v.x.is_finite() && v.y.is_finite()))
    {
        return Err(Error::StepFailure {
            t: state.t,
            reason: "non-finite state".into(),
        });
    }
    next.t = state.t + h;
    Ok(next)
}

/// One classical RK4 step of size `params.dt`.
pub fn rk4_step(
    green: &GreenEvaluator,
    state: &ReducedState,
    params: &SimParams,
    degrees: &[i32],
) -> Result<ReducedState> {
    rk4_inner(green, state, params, degrees).map_err(|e| match e {
        Error::CollisionImminent(sep) => Error::StepFailure {
            t: state.t,
            reason: format!("collision inside RK4 stage (separation {sep:e})"),
        },
        other => other,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    TimeReached,
    Collision,
    StepFailure,
}

/// Per-sample diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleDiagnostics {
    pub q: Vec2,
    pub energy: f64,
    /// `sum_j |a_j'|^2`.
    pub kinetic: f64,
    /// `W + (mu pi / 2) sum_j |a_j'|^2` (just `W` for `mu = 0`).
    pub invariant: f64,
    /// `r(a)`.
    pub min_separation: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub degrees: Vec<i32>,
    pub params: SimParams,
    pub samples: Vec<ReducedState>,
    pub diagnostics: Vec<SampleDiagnostics>,
    pub termination: Termination,
    /// Time of the last accepted state.
    pub end_time: f64,
    /// Set when the run stopped early.
    pub termination_detail: Option<String>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    /// Wrapped position of vortex `j` at sample `k`.
    pub fn position(&self, k: usize, j: usize) -> TorusVec {
        TorusVec::from_planar(self.samples[k].lifted_positions[j])
    }

    /// Linear interpolation of lifted positions at time `t` inside the run.
    /// Keeps every `stride`-th sample and the last one.
    pub fn thinned(mut self, stride: usize) -> Self {
        let stride = stride.max(1);
        let last = self.samples.len().saturating_sub(1);
        let keep: Vec<bool> = (0..self.samples.len()).map(|k| k % stride == 0 || k == last).collect();
        let mut flags = keep.iter();
        self.samples.retain(|_| *flags.next().unwrap());
        let mut flags = keep.iter();
        self.diagnostics.retain(|_| *flags.next().unwrap());
        self.params.output_stride = stride;
        self
    }

    pub fn lifted_at(&self, t: f64) -> Option<Vec<Vec2>> {
        let first = self.samples.first()?;
        let last = self.samples.last()?;
        if t < first.t - 1e-12 || t > last.t + 1e-12 {
            return None;
        }
        let k = self.samples.partition_point(|s| s.t <= t);
        if k == 0 {
            return Some(first.lifted_positions.clone());
        }
        if k >= self.samples.len() {
            return Some(last.lifted_positions.clone());
        }
        let (a, b) = (&self.samples[k - 1], &self.samples[k]);
        let w = (t - a.t) / (b.t - a.t);
        Some(
            a.lifted_positions
                .iter()
                .zip(&b.lifted_positions)
                .map(|(p, q)| *p + (*q - *p) * w)
                .collect(),
        )
    }
}

fn diagnose(
    green: &GreenEvaluator,
    state: &ReducedState,
    params: &SimParams,
    degrees: &[i32],
) -> Result<SampleDiagnostics> {
    let q = update_lift(state, degrees)?.q;
    let energy = renormalized_energy_planar(green, &state.lifted_positions, degrees, q)?;
    let kinetic = state.kinetic();
    Ok(SampleDiagnostics {
        q,
        energy,
        kinetic,
        invariant: energy + 0.5 * params.mu * PI * kinetic,
        min_separation: 0.25 * min_pair_distance(&state.lifted_positions),
    })
}

/// Integrates from the initial data until `t_final`, a collision, or a step failure.
pub fn integrate(
    green: &GreenEvaluator,
    cfg: &VortexConfig,
    q0: &MomentumVector,
    params: &SimParams,
) -> Result<Trajectory> {
    params.validate()?;
    q0.check_compatible(cfg)?;
    let degrees = cfg.degrees().to_vec();
    let mut state = ReducedState::initial(cfg, q0);
    if params.mu == 0.0 && params.t_final > 0.0 {
        state.velocities = ode_rhs(green, &state, params, &degrees)?.0;
    }
    let mut traj = Trajectory {
        degrees: degrees.clone(),
        params: *params,
        diagnostics: vec![diagnose(green, &state, params, &degrees)?],
        samples: vec![state.clone()],
        termination: Termination::TimeReached,
        end_time: 0.0,
        termination_detail: None,
    };
    let steps = params.steps();
    for n in 1..=steps {
        let sep = min_pair_distance(&state.lifted_positions);
        if sep < params.collision_radius {
            traj.termination = Termination::Collision;
            traj.termination_detail = Some(format!("separation {sep:e} at t = {}", state.t));
            break;
        }
        let mut next = match rk4_inner(green, &state, params, &degrees) {
            Ok(s) => s,
            Err(Error::CollisionImminent(sep)) => {
                traj.termination = Termination::Collision;
                traj.termination_detail = Some(format!("separation {sep:e} inside step from t = {}", state.t));
                break;
            }
            Err(e) => {
                traj.termination = Termination::StepFailure;
                traj.termination_detail = Some(e.to_string());
                break;
            }
        };
        // no accumulated rounding in the clock
        next.t = n as f64 * params.dt;
        state = next;
        if n % params.output_stride == 0 || n == steps {
            traj.diagnostics.push(diagnose(green, &state, params, &degrees)?);
            traj.samples.push(state.clone());
        }
    }
    if traj.samples.last().map(|s| s.t) != Some(state.t) {
        traj.diagnostics.push(diagnose(green, &state, params, &degrees)?);
        traj.samples.push(state.clone());
    }
    traj.end_time = state.t;
    Ok(traj)
}

/// Max deviation of the conserved quantity from its initial value.
pub fn invariant_drift(traj: &Trajectory) -> f64 {
    let Some(first) = traj.diagnostics.first() else {
        return 0.0;
    };
    traj.diagnostics
        .iter()
        .map(|d| (d.invariant - first.invariant).abs())
        .fold(0.0, f64::max)
}

/// `sup_{t <= window} max_j` wrap distance between two trajectories at their
/// shared sample times, and the last time compared.
pub fn trajectory_deviation(a: &Trajectory, b: &Trajectory, window: f64) -> (f64, f64) {
    let mut worst = 0.0f64;
    let mut until = 0.0;
    for (sa, sb) in a.samples.iter().zip(&b.samples) {
        if sa.t > window + 1e-12 || (sa.t - sb.t).abs() > 1e-9 {
            break;
        }
        for (pa, pb) in sa.lifted_positions.iter().zip(&sb.lifted_positions) {
            worst = worst.max((*pa - *pb).wrapped().norm());
        }
        until = sa.t;
    }
    (worst, until)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepEntry {
    pub mu: f64,
    /// `D(mu)`; infinite if the run ended before the comparison window.
    pub deviation: f64,
    /// Deviation over the window both runs actually cover.
    pub deviation_common: f64,
    pub compared_until: f64,
    pub termination: Termination,
    pub end_time: f64,
    pub invariant_drift: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub reference_mu: f64,
    pub window: f64,
    pub entries: Vec<SweepEntry>,
    #[serde(skip)]
    pub trajectories: Vec<Trajectory>,
}

impl SweepReport {
    /// True if `D` strictly decreases as `mu` decreases over the positive entries.
    pub fn deviation_decreasing(&self) -> bool {
        let mut pos: Vec<&SweepEntry> = self.entries.iter().filter(|e| e.mu != self.reference_mu).collect();
        pos.sort_by(|a, b| b.mu.total_cmp(&a.mu));
        pos.windows(2).all(|w| w[1].deviation < w[0].deviation)
    }
}

/// Runs `integrate` for each `mu` (concurrently under `policy`) and compares
/// each run with the reference (`mu = 0` if present, else the smallest `mu`)
/// over `[0, window]`.
pub fn mu_sweep(
    green: &GreenEvaluator,
    cfg: &VortexConfig,
    q0: &MomentumVector,
    mu_list: &[f64],
    params: &SimParams,
    window: f64,
    policy: ExecPolicy,
) -> Result<SweepReport> {
    if mu_list.is_empty() {
        return Err(Error::Parameter("empty mu list".into()));
    }
    let reference_mu = mu_list.iter().cloned().fold(f64::INFINITY, f64::min);
    // deviations and drifts are measured on every step; the stride only thins
    // what is returned
    let full = params.with_stride(1);
    let runs: Vec<Result<Trajectory>> = policy.map_slice(mu_list, |&mu| integrate(green, cfg, q0, &full.with_mu(mu)));
    let trajectories = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let ref_idx = mu_list
        .iter()
        .position(|&m| m == reference_mu)
        .expect("minimum is in the list");
    let reference = &trajectories[ref_idx];
    let window = window.min(params.t_final);
    let entries = mu_list
        .iter()
        .zip(&trajectories)
        .map(|(&mu, traj)| {
            let (common, until) = trajectory_deviation(traj, reference, window);
            let covered = traj.end_time >= window - 1e-12;
            SweepEntry {
                mu,
                deviation: if covered { common } else { f64::INFINITY },
                deviation_common: common,
                compared_until: until,
                termination: traj.termination,
                end_time: traj.end_time,
                invariant_drift: invariant_drift(traj),
            }
        })
        .collect();
    let trajectories = trajectories
        .into_iter()
        .map(|t| t.thinned(params.output_stride))
        .collect();
    Ok(SweepReport {
        reference_mu,
        window,
        entries,
        trajectories,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(mu: f64) -> (GreenEvaluator, VortexConfig, MomentumVector, SimParams) {
        let cfg = VortexConfig::dipole_default();
        let q = MomentumVector::canonical(&cfg);
        (GreenEvaluator::default(), cfg, q, SimParams::default().with_mu(mu))
    }

    #[test]
    fn params_validation() {
        assert!(SimParams::new(-1.0, 0.05, 1e-4, 1.0).is_err());
        assert!(SimParams::new(0.0, 0.05, 0.0, 1.0).is_err());
        assert!(SimParams::new(0.0, 1.5, 1e-4, 1.0).is_err());
        assert_eq!(SimParams::new(0.0, 0.05, 1e-4, 1.0).unwrap().steps(), 10_000);
        assert_eq!(SimParams::new(0.0, 0.05, 1e-4, 0.0).unwrap().steps(), 0);
    }

    #[test]
    fn lift_without_motion_is_base_momentum() {
        let (_, cfg, q, _) = setup(0.01);
        let s = ReducedState::initial(&cfg, &q);
        assert_eq!(update_lift(&s, cfg.degrees()).unwrap(), q);
        assert!((q.q.x + 0.8 * PI).abs() < 1e-14 && q.q.y == 0.0);
    }

    #[test]
    fn lift_is_continuous_across_seam() {
        let (_, cfg, q, _) = setup(0.01);
        let mut s = ReducedState::initial(&cfg, &q);
        // drive the +1 vortex from x = 0.3 across x = 1
        let mut prev = update_lift(&s, cfg.degrees()).unwrap().q;
        for k in 1..=100 {
            s.lifted_positions[0] = Vec2::new(0.3 + 0.008 * k as f64, 0.5);
            let cur = update_lift(&s, cfg.degrees()).unwrap().q;
            assert!((cur - prev).norm() < 0.06);
            prev = cur;
        }
        let wrapped =
            MomentumVector::canonical(&VortexConfig::new(s.wrapped_positions(), cfg.degrees().to_vec()).unwrap());
        let diff = prev - wrapped.q;
        assert!((diff.x - 2.0 * PI).abs() < 1e-12 && diff.y.abs() < 1e-12);
    }

    #[test]
    fn lattice_violation_detected() {
        let (_, cfg, q, _) = setup(0.01);
        let mut s = ReducedState::initial(&cfg, &q);
        s.base_momentum += Vec2::new(0.5, 0.0);
        assert!(matches!(
            update_lift(&s, cfg.degrees()),
            Err(Error::LatticeViolation(_))
        ));
    }

    #[test]
    fn rest_start_acceleration() {
        let (g, cfg, q, p) = setup(0.01);
        let s = ReducedState::initial(&cfg, &q);
        let (v, a) = ode_rhs(&g, &s, &p, cfg.degrees()).unwrap();
        let grad = renorm_grad_planar(&g, &s.lifted_positions, cfg.degrees(), q.q).unwrap();
        for j in 0..2 {
            assert_eq!(v[j], Vec2::ZERO);
            let want = grad[j] * (-1.0 / (p.mu * PI));
            assert!((a[j] - want).norm() <= 1e-12 * want.norm());
        }
    }

    #[test]
    fn first_order_velocity_is_perpendicular_and_vertical() {
        let (g, cfg, q, p) = setup(0.0);
        let s = ReducedState::initial(&cfg, &q);
        let (v, a) = ode_rhs(&g, &s, &p, cfg.degrees()).unwrap();
        let grad = renorm_grad_planar(&g, &s.lifted_positions, cfg.degrees(), q.q).unwrap();
        for j in 0..2 {
            assert!(v[j].dot(grad[j]).abs() < 1e-12 * (1.0 + grad[j].norm2()));
            assert!(v[j].x.abs() < 1e-10 && v[j].y.abs() > 1.0);
            assert_eq!(a[j], Vec2::ZERO);
        }
    }

    #[test]
    fn first_step_from_rest_is_quadratic() {
        let (g, cfg, q, p) = setup(0.01);
        let s0 = ReducedState::initial(&cfg, &q);
        let s1 = rk4_step(&g, &s0, &p, cfg.degrees()).unwrap();
        let (_, a) = ode_rhs(&g, &s0, &p, cfg.degrees()).unwrap();
        for (j, aj) in a.iter().enumerate() {
            assert!(s1.velocities[j].norm() > 0.0);
            let disp = s1.lifted_positions[j] - s0.lifted_positions[j];
            let want = *aj * (0.5 * p.dt * p.dt);
            assert!((disp - want).norm() < 1e-2 * want.norm());
        }
        assert!((s1.t - p.dt).abs() < 1e-18);
    }

    #[test]
    fn zero_final_time_keeps_initial_state() {
        let (g, cfg, q, p) = setup(0.01);
        let p = SimParams { t_final: 0.0, ..p };
        let t = integrate(&g, &cfg, &q, &p).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.termination, Termination::TimeReached);
        assert_eq!(t.samples[0].velocities, vec![Vec2::ZERO; 2]);
    }

    #[test]
    fn incompatible_momentum_rejected() {
        let (g, cfg, _, p) = setup(0.01);
        let bad = MomentumVector::new(Vec2::new(0.1, 0.0));
        assert!(matches!(
            integrate(&g, &cfg, &bad, &p),
            Err(Error::InvalidInitialData(_))
        ));
    }

    #[test]
    fn constant_trajectory_has_no_drift() {
        let (g, cfg, q, p) = setup(0.01);
        let mut t = integrate(&g, &cfg, &q, &SimParams { t_final: 0.0, ..p }).unwrap();
        let s = t.samples[0].clone();
        let d = t.diagnostics[0];
        for _ in 0..5 {
            t.samples.push(s.clone());
            t.diagnostics.push(d);
        }
        assert_eq!(invariant_drift(&t), 0.0);
    }
}
