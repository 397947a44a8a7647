//! Run configuration: a TOML file with sections, overridden by CLI flags.

use crate::energy::{MomentumVector, VortexConfig, DEFAULT_EPS_SCHEDULE};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::pde::{PdeMode, ProfileChoice};
use crate::reduced::SimParams;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Reduce,
    Sweep,
    PdeCompare,
    Gamma,
    VerifyHarmonic,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Reduce => "reduce",
            Command::Sweep => "sweep",
            Command::PdeCompare => "pde-compare",
            Command::Gamma => "gamma",
            Command::VerifyHarmonic => "verify-harmonic",
        }
    }
}

/// `q0`: either the token `"dipole-default"` (`2 pi sum d_j a_j`, zero lattice
/// offset) or an explicit pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MomentumSpec {
    Token(String),
    Explicit([f64; 2]),
}

impl Default for MomentumSpec {
    fn default() -> Self {
        MomentumSpec::Token(DIPOLE_DEFAULT.into())
    }
}

pub const DIPOLE_DEFAULT: &str = "dipole-default";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VortexSection {
    pub positions: Vec<[f64; 2]>,
    pub degrees: Vec<i32>,
    pub q0: MomentumSpec,
}

impl Default for VortexSection {
    fn default() -> Self {
        VortexSection {
            positions: vec![[0.3, 0.5], [0.7, 0.5]],
            degrees: vec![1, -1],
            q0: MomentumSpec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamSection {
    pub mu: f64,
    pub eps: f64,
    pub dt: f64,
    pub t_final: f64,
    pub collision_radius: f64,
}

impl Default for ParamSection {
    fn default() -> Self {
        ParamSection {
            mu: 0.01,
            eps: 0.05,
            dt: 1e-4,
            t_final: 1.0,
            collision_radius: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub mu: Vec<f64>,
    /// Deviations are measured on `[0, window]`.
    pub window: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            mu: vec![1.0 / 100.0, 1.0 / 400.0, 1.0 / 1600.0, 0.0],
            window: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PdeSection {
    pub grid: usize,
    /// Defaults to NLS for `mu = 0`, NLSW otherwise.
    pub mode: Option<PdeMode>,
    pub compare_interval: f64,
    pub track_interval: f64,
    pub profile: ProfileChoice,
    /// Write the initial field as a flat binary snapshot.
    pub snapshot: bool,
}

impl Default for PdeSection {
    fn default() -> Self {
        PdeSection {
            grid: 256,
            mode: None,
            compare_interval: 0.005,
            track_interval: 0.001,
            profile: ProfileChoice::Minimizer,
            snapshot: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HarmonicSection {
    pub grid: usize,
    /// Grid of the pairing check; 0 skips it.
    pub pairing_grid: usize,
    pub pairing_vortex: usize,
    pub pairing_direction: [f64; 2],
    pub snapshot: bool,
}

impl Default for HarmonicSection {
    fn default() -> Self {
        HarmonicSection {
            grid: 256,
            pairing_grid: 512,
            pairing_vortex: 0,
            pairing_direction: [0.0, 1.0],
            snapshot: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GammaSection {
    pub eps: Vec<f64>,
}

impl Default for GammaSection {
    fn default() -> Self {
        GammaSection {
            eps: DEFAULT_EPS_SCHEDULE.to_vec(),
        }
    }
}

/// Everything a command needs; the defaults reproduce the dipole study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub out: PathBuf,
    /// Keep every `stride`-th step in trajectory files.
    pub stride: usize,
    pub parallel: bool,
    pub vortices: VortexSection,
    pub params: ParamSection,
    pub sweep: SweepSection,
    pub pde: PdeSection,
    pub harmonic: HarmonicSection,
    pub gamma: GammaSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            out: PathBuf::from("out"),
            stride: 100,
            parallel: true,
            vortices: VortexSection::default(),
            params: ParamSection::default(),
            sweep: SweepSection::default(),
            pde: PdeSection::default(),
            harmonic: HarmonicSection::default(),
            gamma: GammaSection::default(),
        }
    }
}

/// Values given on the command line; `None` keeps the file value.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub dt: Option<f64>,
    pub mu: Option<f64>,
    pub t_final: Option<f64>,
    pub grid: Option<usize>,
    pub eps: Option<f64>,
}

fn bad(what: &str, detail: impl std::fmt::Display) -> Error {
    Error::Config(format!("{what}: {detail}"))
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| bad("parse", e.message()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| bad("read", format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Applies CLI flags. `--grid` sets the grid of the selected command.
    pub fn apply(&mut self, command: Command, o: &Overrides) {
        self.command = Some(command);
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
        if let Some(v) = o.dt {
            self.params.dt = v;
        }
        if let Some(v) = o.mu {
            self.params.mu = v;
        }
        if let Some(v) = o.t_final {
            self.params.t_final = v;
        }
        if let Some(v) = o.eps {
            self.params.eps = v;
        }
        if let Some(v) = o.grid {
            match command {
                Command::VerifyHarmonic => self.harmonic.grid = v,
                _ => self.pde.grid = v,
            }
        }
    }

    pub fn vortex_config(&self) -> Result<VortexConfig> {
        let v = &self.vortices;
        if v.positions.len() != v.degrees.len() {
            return Err(bad(
                "vortices",
                format!("{} positions but {} degrees", v.positions.len(), v.degrees.len()),
            ));
        }
        let coords: Vec<(f64, f64)> = v.positions.iter().map(|p| (p[0], p[1])).collect();
        VortexConfig::from_coords(&coords, &v.degrees).map_err(|e| bad("vortices", e))
    }

    pub fn momentum(&self, cfg: &VortexConfig) -> Result<MomentumVector> {
        let q = match &self.vortices.q0 {
            MomentumSpec::Token(t) if t == DIPOLE_DEFAULT => MomentumVector::canonical(cfg),
            MomentumSpec::Token(t) => {
                return Err(bad(
                    "q0",
                    format!("unknown token {t:?} (expected \"{DIPOLE_DEFAULT}\" or [qx, qy])"),
                ))
            }
            MomentumSpec::Explicit([x, y]) => MomentumVector::new(Vec2::new(*x, *y)),
        };
        q.check_compatible(cfg)
            .map_err(|e| bad("q0 lattice compatibility", e))?;
        Ok(q)
    }

    pub fn sim_params(&self) -> Result<SimParams> {
        let p = &self.params;
        let mut s = SimParams::new(p.mu, p.eps, p.dt, p.t_final).map_err(|e| bad("params", e))?;
        s.collision_radius = p.collision_radius;
        s.output_stride = self.stride;
        s.validate().map_err(|e| bad("params", e))?;
        Ok(s)
    }

    /// Checks every precondition of the selected command before any work.
    pub fn validate(&self) -> Result<()> {
        let command = self.command.ok_or_else(|| bad("command", "not set"))?;
        if self.stride == 0 {
            return Err(bad("stride", "must be >= 1"));
        }
        let cfg = self.vortex_config()?;
        self.momentum(&cfg)?;
        match command {
            Command::Reduce => {
                self.sim_params()?;
            }
            Command::Sweep => {
                self.sim_params()?;
                let s = &self.sweep;
                if s.mu.is_empty() {
                    return Err(bad("sweep.mu", "empty list"));
                }
                if s.mu.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
                    return Err(bad("sweep.mu", "entries must be finite and >= 0"));
                }
                if !(s.window > 0.0) {
                    return Err(bad("sweep.window", "must be > 0"));
                }
            }
            Command::PdeCompare => {
                self.sim_params()?;
                let p = &self.pde;
                let n = p.grid;
                if n < 16 * cfg.len() {
                    return Err(bad("pde.grid", format!("{n} < 16 per vortex")));
                }
                let four_h = 4.0 / n as f64;
                if self.params.eps < four_h {
                    return Err(bad("eps >= 4h", format!("eps = {} < {four_h}", self.params.eps)));
                }
                if !(p.compare_interval > 0.0 && p.track_interval > 0.0) {
                    return Err(bad("pde intervals", "must be > 0"));
                }
                if p.mode == Some(PdeMode::Nls) && self.params.mu != 0.0 {
                    return Err(bad("pde.mode", "nls needs mu = 0"));
                }
            }
            Command::Gamma => {
                let e = &self.gamma.eps;
                if e.is_empty() || e.iter().any(|v| !(*v > 0.0 && *v <= 0.1)) {
                    return Err(bad("gamma.eps", "needs entries in (0, 0.1]"));
                }
                if e.windows(2).any(|w| w[1] >= w[0]) {
                    return Err(bad("gamma.eps", "must be decreasing"));
                }
            }
            Command::VerifyHarmonic => {
                let h = &self.harmonic;
                if h.grid < 16 * cfg.len() {
                    return Err(bad("harmonic.grid", format!("{} < 16 per vortex", h.grid)));
                }
                if h.pairing_grid != 0 {
                    if h.pairing_grid < 16 * cfg.len() {
                        return Err(bad("harmonic.pairing_grid", "too coarse"));
                    }
                    if h.pairing_vortex >= cfg.len() {
                        return Err(bad("harmonic.pairing_vortex", "no such vortex"));
                    }
                    let [x, y] = h.pairing_direction;
                    if x * x + y * y == 0.0 {
                        return Err(bad("harmonic.pairing_direction", "must be nonzero"));
                    }
                }
            }
        }
        Ok(())
    }
}
