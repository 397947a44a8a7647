//! Renormalized energy `W(a; q)` of a vortex configuration with momentum `q`,
//! its exact gradient, the core-dressed energy `W_eps`, and the core constant.

mod core;

pub use self::core::{
    core_energy_gamma, core_energy_gamma_with, radial_energy_collocation, radial_energy_descent, radial_energy_p1,
    CoreConstant, CoreProfile, RadialMesh, RadialMethod, RadialSolution, DEFAULT_EPS_SCHEDULE, DEFAULT_NODES,
};

use crate::error::{Error, Result};
use crate::geom::{TorusVec, Vec2};
use crate::green::GreenEvaluator;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Separations below this make `F` meaningless in double precision.
pub const DEGENERATE_SEPARATION: f64 = 1e-9;

/// Tolerance for lattice membership of a momentum vector.
pub const LATTICE_TOL: f64 = 1e-9;

/// Positions of `2N` vortices on the torus with degrees `+-1` summing to zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VortexConfig {
    positions: Vec<TorusVec>,
    degrees: Vec<i32>,
}

impl VortexConfig {
    pub fn new(positions: Vec<TorusVec>, degrees: Vec<i32>) -> Result<Self> {
        if positions.len() != degrees.len() {
            return Err(Error::DegenerateConfig(format!(
                "{} positions but {} degrees",
                positions.len(),
                degrees.len()
            )));
        }
        if positions.is_empty() {
            return Err(Error::DegenerateConfig("no vortices".into()));
        }
        if let Some(d) = degrees.iter().find(|d| d.abs() != 1) {
            return Err(Error::DegenerateConfig(format!("degree {d} is not +-1")));
        }
        let total: i32 = degrees.iter().sum();
        if total != 0 {
            return Err(Error::DegenerateConfig(format!(
                "degrees sum to {total}, must be zero on the torus"
            )));
        }
        let cfg = VortexConfig { positions, degrees };
        let sep = cfg.min_pair_distance();
        if !(sep >= DEGENERATE_SEPARATION) {
            return Err(Error::DegenerateConfig(format!(
                "vortices closer than {DEGENERATE_SEPARATION:e}"
            )));
        }
        Ok(cfg)
    }

    /// Convenience constructor from raw coordinates.
    pub fn from_coords(coords: &[(f64, f64)], degrees: &[i32]) -> Result<Self> {
        VortexConfig::new(
            coords.iter().map(|&(x, y)| TorusVec::new(x, y)).collect(),
            degrees.to_vec(),
        )
    }

    /// The vortex dipole `(0.3, 0.5)` (+1), `(0.7, 0.5)` (-1).
    pub fn dipole_default() -> Self {
        VortexConfig::from_coords(&[(0.3, 0.5), (0.7, 0.5)], &[1, -1]).expect("valid dipole")
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[TorusVec] {
        &self.positions
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn planar_positions(&self) -> Vec<Vec2> {
        self.positions.iter().map(TorusVec::as_vec2).collect()
    }

    /// `2 pi sum_j d_j a_j` with canonical representatives.
    pub fn lattice_anchor(&self) -> Vec2 {
        lattice_anchor(&self.planar_positions(), &self.degrees)
    }

    /// Smallest pairwise wrap distance (infinite for a single vortex).
    pub fn min_pair_distance(&self) -> f64 {
        min_pair_distance(&self.planar_positions())
    }

    pub fn translated(&self, c: Vec2) -> Self {
        VortexConfig {
            positions: self.positions.iter().map(|p| p.translate(c)).collect(),
            degrees: self.degrees.clone(),
        }
    }

    /// Moves vortex `j` by `delta`.
    pub fn displaced(&self, j: usize, delta: Vec2) -> Self {
        let mut out = self.clone();
        out.positions[j] = out.positions[j].translate(delta);
        out
    }

    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut out = self.clone();
        out.positions.swap(i, j);
        out.degrees.swap(i, j);
        out
    }
}

/// Momentum parameter `q`, a representative of `2 pi sum d_j a_j + 2 pi Z^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentumVector {
    pub q: Vec2,
}

impl MomentumVector {
    pub fn new(q: Vec2) -> Self {
        MomentumVector { q }
    }

    /// `q = 2 pi sum d_j a_j` with zero lattice offset.
    pub fn canonical(cfg: &VortexConfig) -> Self {
        MomentumVector::new(cfg.lattice_anchor())
    }

    /// `q = 2 pi (sum d_j a_j + m)`.
    pub fn with_offset(cfg: &VortexConfig, m: (i64, i64)) -> Self {
        let a = cfg.lattice_anchor();
        MomentumVector::new(a + Vec2::new(m.0 as f64, m.1 as f64) * (2.0 * PI))
    }

    /// Distance (max norm) of `q - 2 pi sum d_j a_j` from `2 pi Z^2`.
    pub fn lattice_residual(&self, cfg: &VortexConfig) -> f64 {
        lattice_residual(self.q, cfg.lattice_anchor())
    }

    pub fn check_compatible(&self, cfg: &VortexConfig) -> Result<()> {
        let r = self.lattice_residual(cfg);
        if r > LATTICE_TOL {
            return Err(Error::InvalidInitialData(format!(
                "q = ({}, {}) is off the lattice 2 pi sum d_j a_j + 2 pi Z^2 by {r:e}",
                self.q.x, self.q.y
            )));
        }
        Ok(())
    }

    /// Momentum after moving vortex `j` by `delta` along a continuous path.
    pub fn lifted(&self, degree: i32, delta: Vec2) -> Self {
        MomentumVector::new(self.q + delta * (2.0 * PI * degree as f64))
    }
}

pub(crate) fn lattice_anchor(positions: &[Vec2], degrees: &[i32]) -> Vec2 {
    positions.iter().zip(degrees).map(|(p, &d)| *p * d as f64).sum::<Vec2>() * (2.0 * PI)
}

/// Max-norm distance of `q - anchor` from `2 pi Z^2`.
pub(crate) fn lattice_residual(q: Vec2, anchor: Vec2) -> f64 {
    let r = (q - anchor) / (2.0 * PI);
    let off = Vec2::new(r.x - r.x.round(), r.y - r.y.round());
    off.max_abs() * 2.0 * PI
}

/// Lattice residual of `q` against planar positions (see [`MomentumVector::lattice_residual`]).
pub fn lattice_residual_of(q: Vec2, positions: &[Vec2], degrees: &[i32]) -> f64 {
    lattice_residual(q, lattice_anchor(positions, degrees))
}

pub(crate) fn min_pair_distance(positions: &[Vec2]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in positions.iter().enumerate() {
        for b in &positions[i + 1..] {
            best = best.min((*a - *b).wrapped().norm());
        }
    }
    best
}

/// `r(a)`: a quarter of the smallest pairwise wrap distance.
pub fn min_separation(cfg: &VortexConfig) -> f64 {
    0.25 * cfg.min_pair_distance()
}

/// `W(a; q) = -pi sum_{k != l} d_k d_l F(a_k - a_l) + |q|^2 / 2`.
pub fn renormalized_energy(green: &GreenEvaluator, cfg: &VortexConfig, q: &MomentumVector) -> Result<f64> {
    renormalized_energy_planar(green, &cfg.planar_positions(), cfg.degrees(), q.q)
}

/// [`renormalized_energy`] on planar (possibly unwrapped) positions.
pub fn renormalized_energy_planar(green: &GreenEvaluator, positions: &[Vec2], degrees: &[i32], q: Vec2) -> Result<f64> {
    check_separation(positions)?;
    let mut pairs = 0.0;
    for k in 0..positions.len() {
        for l in (k + 1)..positions.len() {
            let dd = (degrees[k] * degrees[l]) as f64;
            pairs += dd * green.eval(positions[k] - positions[l])?;
        }
    }
    // each unordered pair appears twice in the k != l sum
    Ok(-2.0 * PI * pairs + 0.5 * q.norm2())
}

/// `grad_{a_j} W = -2 pi d_j sum_{l != j} d_l grad F(a_j - a_l) + 2 pi d_j q`.
///
/// The momentum term is the derivative along the continuous lift, where
/// `d q / d a_j = 2 pi d_j I`.
pub fn renorm_grad(green: &GreenEvaluator, cfg: &VortexConfig, q: &MomentumVector) -> Result<Vec<Vec2>> {
    renorm_grad_planar(green, &cfg.planar_positions(), cfg.degrees(), q.q)
}

pub fn renorm_grad_planar(green: &GreenEvaluator, positions: &[Vec2], degrees: &[i32], q: Vec2) -> Result<Vec<Vec2>> {
    check_separation(positions)?;
    let n = positions.len();
    let mut grads = vec![Vec2::ZERO; n];
    for j in 0..n {
        for l in (j + 1)..n {
            let g = green.grad(positions[j] - positions[l])?;
            let dd = (degrees[j] * degrees[l]) as f64;
            // grad F is odd: the (l, j) term is -g
            grads[j] -= g * (2.0 * PI * dd);
            grads[l] += g * (2.0 * PI * dd);
        }
    }
    for (g, &d) in grads.iter_mut().zip(degrees) {
        *g += q * (2.0 * PI * d as f64);
    }
    Ok(grads)
}

/// `W_eps = 2N (pi log(1/eps) + gamma) + W`.
pub fn w_eps(
    green: &GreenEvaluator,
    cfg: &VortexConfig,
    q: &MomentumVector,
    eps: f64,
    gamma: &CoreConstant,
) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Parameter(format!("eps = {eps} outside (0, 1)")));
    }
    let w = renormalized_energy(green, cfg, q)?;
    Ok(core_dressing(cfg.len(), eps, gamma.gamma) + w)
}

/// The constant `2N (pi log(1/eps) + gamma)` added by the vortex cores.
pub fn core_dressing(vortices: usize, eps: f64, gamma: f64) -> f64 {
    vortices as f64 * (PI * (1.0 / eps).ln() + gamma)
}

fn check_separation(positions: &[Vec2]) -> Result<()> {
    let sep = min_pair_distance(positions);
    if sep < DEGENERATE_SEPARATION {
        return Err(Error::DegenerateConfig(format!(
            "minimum separation {sep:e} below {DEGENERATE_SEPARATION:e}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dipole() -> (VortexConfig, MomentumVector) {
        let cfg = VortexConfig::dipole_default();
        let q = MomentumVector::canonical(&cfg);
        (cfg, q)
    }

    #[test]
    fn config_validation() {
        assert!(VortexConfig::from_coords(&[(0.1, 0.1), (0.2, 0.2)], &[1, 1]).is_err());
        assert!(VortexConfig::from_coords(&[(0.1, 0.1), (0.2, 0.2)], &[1, -2]).is_err());
        assert!(VortexConfig::from_coords(&[(0.1, 0.1), (1.1, 0.1)], &[1, -1]).is_err());
        assert!(VortexConfig::from_coords(&[(0.1, 0.1)], &[1, -1]).is_err());
        assert!(VortexConfig::from_coords(&[(0.1, 0.1), (0.2, 0.2)], &[1, -1]).is_ok());
    }

    #[test]
    fn dipole_momentum_is_on_lattice() {
        let (cfg, q) = dipole();
        assert!((q.q.x - 2.0 * PI * -0.4).abs() < 1e-14);
        assert!(q.q.y.abs() < 1e-14);
        assert!(q.check_compatible(&cfg).is_ok());
        let off = MomentumVector::with_offset(&cfg, (1, -2));
        assert!(off.lattice_residual(&cfg) < 1e-12);
        let bad = MomentumVector::new(q.q + Vec2::new(0.1, 0.0));
        assert!(matches!(bad.check_compatible(&cfg), Err(Error::InvalidInitialData(_))));
    }

    #[test]
    fn min_separation_examples() {
        let (cfg, _) = dipole();
        assert!((min_separation(&cfg) - 0.1).abs() < 1e-15);
        let seam = VortexConfig::from_coords(&[(0.05, 0.5), (0.95, 0.5)], &[1, -1]).unwrap();
        assert!((min_separation(&seam) - 0.025).abs() < 1e-15);
        for s in [0.01, 0.1, 0.3] {
            let c = VortexConfig::from_coords(&[(0.2, 0.2), (0.2 + s, 0.2)], &[1, -1]).unwrap();
            assert!((min_separation(&c) - s / 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn dipole_energy_closed_form() {
        let g = GreenEvaluator::default();
        let (cfg, q) = dipole();
        let w = renormalized_energy(&g, &cfg, &q).unwrap();
        let f = g.eval(Vec2::new(0.4, 0.0)).unwrap();
        let want = 2.0 * PI * f + 0.32 * PI * PI;
        assert!((w - want).abs() < 1e-13, "{w} vs {want}");
    }

    #[test]
    fn dipole_gradient_symmetries() {
        let g = GreenEvaluator::default();
        let (cfg, q) = dipole();
        let grads = renorm_grad(&g, &cfg, &q).unwrap();
        assert!(grads[0].y.abs() < 1e-10 && grads[1].y.abs() < 1e-10);
        assert!((grads[0] + grads[1]).norm() < 1e-12);
    }

    #[test]
    fn label_swap_and_translation_invariance() {
        let g = GreenEvaluator::default();
        let cfg =
            VortexConfig::from_coords(&[(0.1, 0.2), (0.6, 0.3), (0.4, 0.8), (0.85, 0.55)], &[1, 1, -1, -1]).unwrap();
        let q = MomentumVector::with_offset(&cfg, (1, 0));
        let w = renormalized_energy(&g, &cfg, &q).unwrap();
        let swapped = cfg.swapped(0, 1);
        let w2 = renormalized_energy(&g, &swapped, &q).unwrap();
        assert!((w - w2).abs() < 1e-12);
        let moved = cfg.translated(Vec2::new(0.13, 0.07));
        assert!(q.check_compatible(&moved).is_ok());
        let w3 = renormalized_energy(&g, &moved, &q).unwrap();
        assert!((w - w3).abs() < 1e-10);
    }

    #[test]
    fn degenerate_configs_rejected() {
        let g = GreenEvaluator::default();
        let pos = [Vec2::new(0.3, 0.3), Vec2::new(0.3 + 1e-10, 0.3)];
        let e = renormalized_energy_planar(&g, &pos, &[1, -1], Vec2::ZERO);
        assert!(matches!(e, Err(Error::DegenerateConfig(_))));
    }

    #[test]
    fn dressing_is_affine_in_log() {
        let gamma = CoreConstant::from_value(1.0);
        let g = GreenEvaluator::default();
        let (cfg, q) = dipole();
        let w = renormalized_energy(&g, &cfg, &q).unwrap();
        let we = w_eps(&g, &cfg, &q, 0.05, &gamma).unwrap();
        assert!((we - w - 2.0 * (PI * 20f64.ln() + 1.0)).abs() < 1e-12);
        let we2 = w_eps(&g, &cfg, &q, 0.025, &gamma).unwrap();
        assert!((we2 - we - 2.0 * PI * 2f64.ln()).abs() < 1e-12);
    }
}
