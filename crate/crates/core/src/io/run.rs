//! Command pipelines and their metadata records.

use super::config::{Command, RunConfig};
use super::plot::write_plot;
use super::snapshot::write_field;
use super::tables::{write_compare_samples, write_diagnostics, write_sweep_report, write_trajectory};
use crate::energy::{core_energy_gamma_with, CoreConstant, RadialMethod, DEFAULT_NODES};
use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::geom::Vec2;
use crate::green::GreenEvaluator;
use crate::harmonic::{build_harmonic_map, hessian_pairing_check, verify_canonical, CanonicalTolerances, EtaSpec};
use crate::pde::{init_field, run_pde_compare, stable_dt_for, CompareOptions, PdeCompareReport, PdeMode};
use crate::reduced::{integrate, invariant_drift, mu_sweep, Trajectory};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, Serialize)]
pub struct RunOutcome {
    pub command: Command,
    pub out: PathBuf,
    /// File names relative to `out`, in write order.
    pub artifacts: Vec<String>,
    pub results: Value,
}

/// Hex SHA-256 of the configuration with the output location and execution
/// policy blanked: two runs with the same digest compute the same numbers.
pub fn run_digest(cfg: &RunConfig) -> String {
    let mut c = cfg.clone();
    c.out = PathBuf::new();
    c.parallel = true;
    Sha256::digest(c.to_toml().as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// File-name label of a mu value, e.g. `mu_0.0025`.
pub fn mu_label(mu: f64) -> String {
    format!("mu_{mu}")
}

struct Sink {
    dir: PathBuf,
    written: Vec<String>,
}

impl Sink {
    fn path(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.dir.join(name)
    }

    fn json(&mut self, name: &str, v: &impl Serialize) -> Result<()> {
        let text = serde_json::to_string_pretty(v).expect("serializable");
        std::fs::write(self.path(name), text + "\n")?;
        Ok(())
    }
}

fn trajectory_summary(t: &Trajectory) -> Value {
    let w0 = t.diagnostics.first().map(|d| d.energy).unwrap_or(0.0);
    let drift = invariant_drift(t);
    json!({
        "mu": t.params.mu,
        "termination": t.termination,
        "termination_detail": t.termination_detail,
        "end_time": t.end_time,
        "samples": t.samples.len(),
        "W0": w0,
        "invariant_drift": drift,
        "invariant_drift_relative": drift / (1.0 + w0.abs()),
    })
}

fn write_run(sink: &mut Sink, t: &Trajectory, suffix: &str) -> Result<()> {
    write_trajectory(t, &sink.path(&format!("trajectory{suffix}.csv")))?;
    write_diagnostics(t, &sink.path(&format!("diagnostics{suffix}.csv")))
}

fn compare_summary(r: &PdeCompareReport) -> Value {
    json!({
        "mode": r.mode,
        "n": r.n,
        "eps": r.eps,
        "mu": r.mu,
        "dt": r.dt,
        "stable_dt": r.stable_dt,
        "steps": r.steps,
        "deviation": r.deviation,
        "compared_until": r.compared_until,
        "window_end": r.window_end,
        "reduced_termination": r.reduced_termination,
        "hamiltonian_drift": r.hamiltonian_drift,
        "mass_drift": r.mass_drift,
        "tracking_losses": r.tracking_losses,
        "snap_offset": r.snap_offset,
    })
}

/// Validates `cfg`, runs its command and writes the artifacts plus
/// `metadata.json` into `cfg.out`.
pub fn run_command(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let command = cfg.command.expect("checked by validate");
    let policy = if cfg.parallel {
        ExecPolicy::Parallel
    } else {
        ExecPolicy::Sequential
    };
    std::fs::create_dir_all(&cfg.out)?;
    let mut sink = Sink {
        dir: cfg.out.clone(),
        written: Vec::new(),
    };
    let green = GreenEvaluator::default();
    let vortices = cfg.vortex_config()?;
    let q0 = cfg.momentum(&vortices)?;

    let results = match command {
        Command::Reduce => {
            let params = cfg.sim_params()?;
            let t = integrate(&green, &vortices, &q0, &params)?;
            write_run(&mut sink, &t, "")?;
            write_plot(
                std::slice::from_ref(&t),
                &[format!("mu = {}", params.mu)],
                &sink.path("plot.svg"),
            )?;
            trajectory_summary(&t)
        }
        Command::Sweep => {
            let params = cfg.sim_params()?;
            let report = mu_sweep(&green, &vortices, &q0, &cfg.sweep.mu, &params, cfg.sweep.window, policy)?;
            let mut runs = Vec::new();
            for t in &report.trajectories {
                write_run(&mut sink, t, &format!("_{}", mu_label(t.params.mu)))?;
                runs.push(trajectory_summary(t));
            }
            write_sweep_report(&report, &sink.path("sweep_report.csv"))?;
            let labels: Vec<String> = report
                .trajectories
                .iter()
                .map(|t| format!("mu = {}", t.params.mu))
                .collect();
            write_plot(&report.trajectories, &labels, &sink.path("plot.svg"))?;
            json!({
                "reference_mu": report.reference_mu,
                "window": report.window,
                "entries": report.entries,
                "deviation_decreasing": report.deviation_decreasing(),
                "runs": runs,
            })
        }
        Command::PdeCompare => {
            let params = cfg.sim_params()?;
            // compared at full resolution, written thinned
            let reduced = integrate(&green, &vortices, &q0, &params.with_stride(1))?;
            let thinned = reduced.clone().thinned(params.output_stride);
            write_run(&mut sink, &thinned, "_reduced")?;
            let opts = CompareOptions {
                n: cfg.pde.grid,
                mode: cfg.pde.mode,
                compare_interval: cfg.pde.compare_interval,
                track_interval: cfg.pde.track_interval,
                profile: cfg.pde.profile,
                policy,
            };
            if cfg.pde.snapshot {
                let mode = opts.mode.unwrap_or(PdeMode::for_mu(params.mu));
                let dt = stable_dt_for(mode, opts.n, params.eps).min(params.dt);
                let profile = opts.profile.profile()?;
                let s = init_field(&green, opts.n, &vortices, &q0, &params, dt, mode, &profile, policy)?;
                write_field(&s.u, &sink.path("field_initial.bin"))?;
            }
            let report = run_pde_compare(&green, &vortices, &q0, &params, &reduced, &opts)?;
            write_compare_samples(&report, &sink.path("compare.csv"))?;
            write_plot(
                &[thinned],
                &[format!("reduced, mu = {}", params.mu)],
                &sink.path("plot.svg"),
            )?;
            let summary = compare_summary(&report);
            sink.json("compare_report.json", &summary)?;
            summary
        }
        Command::Gamma => {
            let eps = &cfg.gamma.eps;
            let a = core_energy_gamma_with(eps, RadialMethod::Descent, DEFAULT_NODES)?;
            let b = core_energy_gamma_with(eps, RadialMethod::Collocation, DEFAULT_NODES)?;
            let v = json!({
                "gamma": a.gamma,
                "upper_bound": CoreConstant::UPPER_BOUND,
                "upper_bound_satisfied": a.satisfies_upper_bound(),
                "methods_difference": (a.gamma - b.gamma).abs(),
                "descent": a,
                "collocation": b,
            });
            sink.json("gamma.json", &v)?;
            v
        }
        Command::VerifyHarmonic => {
            let h = &cfg.harmonic;
            let map = build_harmonic_map(&green, h.grid, &vortices, &q0, policy)?;
            let report = verify_canonical(&map.field, &map.config, &map.momentum, &CanonicalTolerances::default());
            if h.snapshot {
                write_field(&map.field, &sink.path("harmonic_field.bin"))?;
            }
            let pairing = if h.pairing_grid > 0 {
                let dir = Vec2::new(h.pairing_direction[0], h.pairing_direction[1]);
                let eta = EtaSpec::standard(&vortices, dir);
                Some(hessian_pairing_check(
                    &green,
                    &vortices,
                    &q0,
                    h.pairing_vortex,
                    &eta,
                    h.pairing_grid,
                    policy,
                )?)
            } else {
                None
            };
            let v = json!({
                "canonical": report,
                "perturbation": map.perturbation,
                "snapped_momentum": [map.momentum.q.x, map.momentum.q.y],
                "pairing": pairing,
                "pass": report.pass,
            });
            sink.json("harmonic_report.json", &v)?;
            v
        }
    };

    let mut artifacts = sink.written.clone();
    artifacts.push("metadata.json".into());
    let meta = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command.name(),
        "digest": run_digest(cfg),
        "config": cfg,
        "results": results,
        "artifacts": artifacts,
    });
    sink.json("metadata.json", &meta)?;
    Ok(RunOutcome {
        command,
        out: cfg.out.clone(),
        artifacts,
        results,
    })
}

/// Machine-readable error record for a failed run.
pub fn error_record(command: Option<Command>, err: &Error) -> Value {
    json!({
        "status": "error",
        "command": command.map(Command::name),
        "kind": err.kind(),
        "message": err.to_string(),
        "exit_code": err.exit_code(),
    })
}

/// Writes `error.json` into `dir` if the directory can be created.
pub fn write_error_record(dir: &Path, record: &Value) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(
        dir.join("error.json"),
        serde_json::to_string_pretty(record).expect("json") + "\n",
    )?;
    Ok(())
}
