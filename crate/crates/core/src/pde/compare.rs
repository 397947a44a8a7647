//! PDE run alongside a reduced-law trajectory.

use super::{init_field, stable_dt_for, track_vortices, PdeMode, PdeSolver, ProfileChoice, TrackedVortices};
use crate::energy::{MomentumVector, VortexConfig};
use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::geom::TorusVec;
use crate::green::GreenEvaluator;
use crate::reduced::{SimParams, Termination, Trajectory};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompareOptions {
    pub n: usize,
    /// Defaults to NLS for `mu = 0` and NLSW otherwise.
    pub mode: Option<PdeMode>,
    /// Spacing of the comparison times.
    pub compare_interval: f64,
    /// Spacing of the tracking updates; must keep the motion between updates
    /// well inside the matching radius.
    pub track_interval: f64,
    pub profile: ProfileChoice,
    pub policy: ExecPolicy,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            n: 256,
            mode: None,
            compare_interval: 0.005,
            track_interval: 0.001,
            profile: ProfileChoice::Minimizer,
            policy: ExecPolicy::Parallel,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowEnd {
    /// Reached `t_final`.
    Completed,
    /// The reduced trajectory stopped first.
    ReducedEnded,
    TrackingLost,
    /// Two tracked vortices came within `2 eps`.
    TrackedCollision,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompareSample {
    pub t: f64,
    pub pde: Vec<TorusVec>,
    pub reduced: Vec<TorusVec>,
    pub distance: f64,
    pub hamiltonian: f64,
    pub mass: f64,
    pub losses: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PdeCompareReport {
    pub mode: PdeMode,
    pub n: usize,
    pub eps: f64,
    pub mu: f64,
    pub dt: f64,
    pub stable_dt: f64,
    pub steps: usize,
    pub t_final: f64,
    /// `sup_t max_j` wrap distance over the compared samples.
    pub deviation: f64,
    pub compared_until: f64,
    pub window_end: WindowEnd,
    pub reduced_termination: Termination,
    /// `max |H(t) - H(0)| / |H(0)|`.
    pub hamiltonian_drift: f64,
    pub mass_drift: f64,
    pub tracking_losses: usize,
    /// Largest initial offset from grid snapping.
    pub snap_offset: f64,
    pub samples: Vec<CompareSample>,
}

/// `max_j` wrap distance between matching entries.
pub fn position_deviation(a: &[TorusVec], b: &[TorusVec]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p.wrap_dist(q)).fold(0.0, f64::max)
}

/// Steps the PDE from the well-prepared data of `(cfg, q0)` and compares the
/// tracked vortices with `reduced` at its sample times.
pub fn run_pde_compare(
    green: &GreenEvaluator,
    cfg: &VortexConfig,
    q0: &MomentumVector,
    params: &SimParams,
    reduced: &Trajectory,
    opts: &CompareOptions,
) -> Result<PdeCompareReport> {
    params.validate()?;
    if reduced.is_empty() {
        return Err(Error::Parameter("empty reduced trajectory".into()));
    }
    if !(opts.compare_interval > 0.0 && opts.track_interval > 0.0) {
        return Err(Error::Parameter("compare and track intervals must be > 0".into()));
    }
    let mode = opts.mode.unwrap_or(PdeMode::for_mu(params.mu));
    let bound = stable_dt_for(mode, opts.n, params.eps);
    // reduced samples sit on multiples of reduced.params.dt; split each into m steps
    let base = reduced.params.dt;
    let m = (base / bound).ceil().max(1.0) as usize;
    let dt = base / m as f64;
    let profile = opts.profile.profile()?;
    let mut state = init_field(green, opts.n, cfg, q0, params, dt, mode, &profile, opts.policy)?;
    let solver = PdeSolver::for_state(&state, opts.policy);
    let snapped = state.initial.clone().expect("set by init_field");
    let snap_offset = position_deviation(snapped.positions(), cfg.positions());
    let mut tracked = TrackedVortices::from_config(&snapped, 0.0);
    let h0 = solver.hamiltonian(&state);
    let m0 = solver.mass(&state.u);
    let t_final = params.t_final.min(reduced.end_time);
    let reduced_short = reduced.end_time + 1e-12 < params.t_final;

    let mut samples = Vec::new();
    let mut deviation = 0.0f64;
    let mut hamiltonian_drift = 0.0f64;
    let mut mass_drift = 0.0f64;
    let mut compared_until = 0.0;
    let mut window_end = if reduced_short {
        WindowEnd::ReducedEnded
    } else {
        WindowEnd::Completed
    };
    let mut steps = 0usize;
    let mut next_compare = 0.0;
    let last = reduced
        .samples
        .iter()
        .rposition(|s| s.t <= t_final + 1e-12)
        .unwrap_or(0);
    let total = (reduced.samples[last].t / dt).round() as usize;
    let track_every = ((opts.track_interval / dt).round() as usize).max(1);
    let mut k = 0usize;
    loop {
        while k < last && ((reduced.samples[k].t / dt).round() as usize) < steps {
            k += 1;
        }
        let at_sample = ((reduced.samples[k].t / dt).round() as usize) == steps;
        let compare = at_sample && (reduced.samples[k].t + 1e-12 >= next_compare || k == last);
        if steps.is_multiple_of(track_every) || compare {
            tracked = track_vortices(&state.u, state.t, &tracked, opts.policy);
            // a loss is reported right away, not at the next comparison time
            if compare || tracked.losses() > 0 {
                let red = if at_sample {
                    reduced.samples[k].wrapped_positions()
                } else {
                    reduced
                        .lifted_at(state.t)
                        .expect("inside the reduced window")
                        .into_iter()
                        .map(TorusVec::from_planar)
                        .collect()
                };
                if compare {
                    while next_compare <= reduced.samples[k].t + 1e-12 {
                        next_compare += opts.compare_interval;
                    }
                }
                let dist = position_deviation(&tracked.positions, &red);
                let hm = match mode {
                    PdeMode::Nlsw => state.cached_hamiltonian().unwrap_or_else(|| solver.hamiltonian(&state)),
                    PdeMode::Nls => solver.hamiltonian(&state),
                };
                let mass = solver.mass(&state.u);
                hamiltonian_drift = hamiltonian_drift.max((hm - h0).abs() / h0.abs());
                mass_drift = mass_drift.max((mass - m0).abs() / m0);
                samples.push(CompareSample {
                    t: state.t,
                    pde: tracked.positions.clone(),
                    reduced: red,
                    distance: dist,
                    hamiltonian: hm,
                    mass,
                    losses: tracked.losses(),
                });
                if tracked.losses() > 0 {
                    window_end = WindowEnd::TrackingLost;
                    break;
                }
                deviation = deviation.max(dist);
                compared_until = state.t;
            }
            if tracked.min_distance() < 2.0 * params.eps {
                window_end = WindowEnd::TrackedCollision;
                break;
            }
        }
        if steps >= total {
            break;
        }
        solver.step(&mut state)?;
        steps += 1;
    }
    Ok(PdeCompareReport {
        mode,
        n: opts.n,
        eps: params.eps,
        mu: params.mu,
        dt,
        stable_dt: bound,
        steps,
        t_final: params.t_final,
        deviation,
        compared_until,
        window_end,
        reduced_termination: reduced.termination,
        hamiltonian_drift,
        mass_drift,
        tracking_losses: tracked.losses(),
        snap_offset,
        samples,
    })
}
