//! Periodic Green's function of the unit torus.
//!
//! `F` solves `Delta F = 2 pi (delta - 1)` with zero mean, i.e.
//!
//! ```text
//! F(p) = -(1/2pi) sum_{k != 0} exp(2 pi i k.p) / |k|^2 .
//! ```
//!
//! The series is split with a Gaussian damping `exp(-s|k|^2)`: the damped
//! reciprocal part converges like `exp(-s|k|^2)` and the remainder, after
//! Poisson summation, is a sum of exponential integrals over lattice images:
//!
//! ```text
//! F(p) = -(1/2pi) sum_{k != 0} exp(-s|k|^2) cos(2 pi k.p) / |k|^2
//!        - 1/2 sum_n E1(pi^2 |p - n|^2 / s) + s / (2 pi)
//! ```
//!
//! The `n = 0` image carries the logarithmic singularity; writing
//! `E1(z) = -gamma - ln z + Ein(z)` isolates `log|p|` analytically, which is
//! how the regular part is evaluated.

use crate::error::{Error, Result};
use crate::geom::{TorusVec, Vec2};
use crate::special::{ein, exp_integral_e1, EULER_GAMMA};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Images whose exponent exceeds this are dropped (`e^-60 ~ 1e-26`).
const IMAGE_EXPONENT_CUTOFF: f64 = 60.0;

/// Points closer than this to a lattice point are rejected by [`GreenEvaluator::eval`].
pub const SINGULAR_RADIUS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenParams {
    /// Gaussian splitting parameter `s` (damping `exp(-s |k|^2)`).
    pub splitting: f64,
    /// Reciprocal-space cutoff `K`: modes with `|k|_inf <= K`.
    pub fourier_cutoff: usize,
    /// Real-space cutoff `N`: images with `|n|_inf <= N`.
    pub realspace_cutoff: usize,
    pub target_abs_error: f64,
}

impl Default for GreenParams {
    fn default() -> Self {
        GreenParams {
            splitting: PI,
            fourier_cutoff: 5,
            realspace_cutoff: 3,
            target_abs_error: 1e-10,
        }
    }
}

/// Immutable evaluator for `F`, `grad F` and the regular part `F - log|p|`.
#[derive(Clone, Debug)]
pub struct GreenEvaluator {
    params: GreenParams,
    /// `exp(-s|k|^2)/|k|^2` over the half lattice `k1 > 0 or (k1 == 0, k2 > 0)`.
    modes: Vec<(i32, i32, f64)>,
    images: Vec<(f64, f64)>,
    error_bound: f64,
    /// Constant part of the regular value: `s/2pi + gamma/2 + ln(pi^2/s)/2`.
    reg_const: f64,
}

impl Default for GreenEvaluator {
    fn default() -> Self {
        GreenEvaluator::new(GreenParams::default()).expect("default Green parameters are valid")
    }
}

impl GreenEvaluator {
    pub fn new(params: GreenParams) -> Result<Self> {
        if !(params.splitting > 0.0 && params.splitting.is_finite()) {
            return Err(Error::Parameter(format!(
                "splitting parameter must be positive, got {}",
                params.splitting
            )));
        }
        if !(params.target_abs_error > 0.0) {
            return Err(Error::Parameter("target_abs_error must be positive".into()));
        }
        let error_bound = truncation_bound(&params);
        if error_bound > params.target_abs_error {
            return Err(Error::Parameter(format!(
                "cutoffs (K = {}, N = {}) with splitting {} give error bound {:e} > target {:e}",
                params.fourier_cutoff, params.realspace_cutoff, params.splitting, error_bound, params.target_abs_error
            )));
        }
        let k = params.fourier_cutoff as i32;
        let mut modes = Vec::new();
        for k1 in 0..=k {
            for k2 in -k..=k {
                if k1 == 0 && k2 <= 0 {
                    continue;
                }
                let k2n = (k1 * k1 + k2 * k2) as f64;
                modes.push((k1, k2, (-params.splitting * k2n).exp() / k2n));
            }
        }
        let n = params.realspace_cutoff as i32;
        let mut images = Vec::new();
        for n1 in -n..=n {
            for n2 in -n..=n {
                images.push((n1 as f64, n2 as f64));
            }
        }
        let reg_const = params.splitting / (2.0 * PI) + 0.5 * EULER_GAMMA + 0.5 * (PI * PI / params.splitting).ln();
        Ok(GreenEvaluator {
            params,
            modes,
            images,
            error_bound,
            reg_const,
        })
    }

    pub fn params(&self) -> &GreenParams {
        &self.params
    }

    /// A-priori bound on the absolute truncation error of values and gradients.
    pub fn error_bound(&self) -> f64 {
        self.error_bound
    }

    /// `F(p)`; `p` may be any planar representative.
    pub fn eval(&self, p: Vec2) -> Result<f64> {
        let p = self.check_regular_point(p)?;
        let mut real = 0.0;
        for &(n1, n2) in &self.images {
            let d = Vec2::new(p.x - n1, p.y - n2);
            let z = PI * PI * d.norm2() / self.params.splitting;
            if z < IMAGE_EXPONENT_CUTOFF {
                real += exp_integral_e1(z);
            }
        }
        Ok(self.reciprocal_value(p) - 0.5 * real + self.params.splitting / (2.0 * PI))
    }

    /// `F` at a torus point.
    pub fn eval_at(&self, p: TorusVec) -> Result<f64> {
        self.eval(p.as_vec2())
    }

    /// `grad F(p)`, obtained by differentiating both sums term by term.
    pub fn grad(&self, p: Vec2) -> Result<Vec2> {
        let p = self.check_regular_point(p)?;
        let mut g = self.reciprocal_grad(p);
        for &(n1, n2) in &self.images {
            let d = Vec2::new(p.x - n1, p.y - n2);
            let r2 = d.norm2();
            let z = PI * PI * r2 / self.params.splitting;
            if z < IMAGE_EXPONENT_CUTOFF {
                g += d * ((-z).exp() / r2);
            }
        }
        Ok(g)
    }

    pub fn grad_at(&self, p: TorusVec) -> Result<Vec2> {
        self.grad(p.as_vec2())
    }

    /// Regular part `(F(p) - log|p|, grad F(p) - p/|p|^2)` for wrapped `|p| < 1/2`.
    /// Smooth through `p = 0`, where the gradient is exactly zero.
    pub fn regular(&self, p: Vec2) -> Result<(f64, Vec2)> {
        let p = p.wrapped();
        let r2 = p.norm2();
        if r2 >= 0.25 {
            return Err(Error::OutOfRange(r2.sqrt()));
        }
        let s = self.params.splitting;
        let z0 = PI * PI * r2 / s;
        let mut value = self.reciprocal_value(p) + self.reg_const - 0.5 * ein(z0);
        let mut grad = if r2 == 0.0 {
            Vec2::ZERO
        } else {
            // (e^{-z} - 1) p / |p|^2 written without cancellation
            let factor = if z0 < 1e-300 { 1.0 } else { -(-z0).exp_m1() / z0 };
            self.reciprocal_grad(p) - p * (PI * PI / s * factor)
        };
        for &(n1, n2) in &self.images {
            if n1 == 0.0 && n2 == 0.0 {
                continue;
            }
            let d = Vec2::new(p.x - n1, p.y - n2);
            let dr2 = d.norm2();
            let z = PI * PI * dr2 / s;
            if z < IMAGE_EXPONENT_CUTOFF {
                value -= 0.5 * exp_integral_e1(z);
                if r2 != 0.0 {
                    grad += d * ((-z).exp() / dr2);
                }
            }
        }
        Ok((value, grad))
    }

    /// `lim_{p -> 0} F(p) - log|p|`, the Robin constant of the square torus.
    pub fn robin_constant(&self) -> f64 {
        self.regular(Vec2::ZERO).expect("origin is inside the regular domain").0
    }

    fn check_regular_point(&self, p: Vec2) -> Result<Vec2> {
        let w = p.wrapped();
        if w.norm() < SINGULAR_RADIUS {
            return Err(Error::SingularPoint((p.x, p.y)));
        }
        Ok(w)
    }

    fn trig_table(&self, t: f64) -> Vec<(f64, f64)> {
        (0..=self.params.fourier_cutoff)
            .map(|k| (2.0 * PI * k as f64 * t).sin_cos())
            .collect()
    }

    fn reciprocal_value(&self, p: Vec2) -> f64 {
        let tx = self.trig_table(p.x);
        let ty = self.trig_table(p.y);
        let mut acc = 0.0;
        for &(k1, k2, w) in &self.modes {
            let (s1, c1) = tx[k1 as usize];
            let (s2, c2) = ty[k2.unsigned_abs() as usize];
            let s2 = if k2 < 0 { -s2 } else { s2 };
            acc += w * (c1 * c2 - s1 * s2);
        }
        // half lattice counted twice
        -acc / PI
    }

    fn reciprocal_grad(&self, p: Vec2) -> Vec2 {
        let tx = self.trig_table(p.x);
        let ty = self.trig_table(p.y);
        let mut gx = 0.0;
        let mut gy = 0.0;
        for &(k1, k2, w) in &self.modes {
            let (s1, c1) = tx[k1 as usize];
            let (s2, c2) = ty[k2.unsigned_abs() as usize];
            let s2 = if k2 < 0 { -s2 } else { s2 };
            let sn = w * (s1 * c2 + c1 * s2);
            gx += sn * k1 as f64;
            gy += sn * k2 as f64;
        }
        Vec2::new(2.0 * gx, 2.0 * gy)
    }
}

/// Tail bound for both truncated sums, valid for values and gradients at any
/// wrapped point.
fn truncation_bound(params: &GreenParams) -> f64 {
    let s = params.splitting;
    let k = params.fourier_cutoff;
    let n = params.realspace_cutoff;
    // modes on the shell |k|_inf = m: 8m of them, each with |k| >= m
    let mut recip = 0.0;
    for m in (k + 1)..(k + 200) {
        let m = m as f64;
        let decay = (-s * m * m).exp();
        recip += 8.0 * m * decay * (1.0 / (2.0 * PI * m * m)).max(2.0 / m);
    }
    // images on the shell |n|_inf = m sit at distance >= m - 1/2 from wrapped p
    let mut real = 0.0;
    for m in (n + 1)..(n + 200) {
        let m = m as f64;
        let dmin = m - 0.5;
        let z = PI * PI * dmin * dmin / s;
        real += 8.0 * m * (0.5 * exp_integral_e1(z)).max((-z).exp() / dmin);
    }
    // dropped images inside the cutoff
    let dropped = ((2 * n + 1).pow(2) as f64) * (-IMAGE_EXPONENT_CUTOFF).exp();
    recip + real + dropped
}
