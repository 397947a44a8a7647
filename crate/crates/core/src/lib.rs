//! Quantized vortex dynamics on the unit torus.
//!
//! The crate evaluates the renormalized energy of a configuration of `+-1`
//! vortices with a prescribed momentum, integrates the reduced second-order
//! point-vortex law (and its first-order limit), builds the canonical harmonic
//! map on a grid, and cross-checks the reduced law against a Fourier
//! pseudospectral solver for the underlying field equations.

// `!(x > 0.0)` is deliberate: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod energy;
pub mod error;
pub mod exec;
pub mod geom;
pub mod green;
pub mod harmonic;
pub mod io;
pub mod pde;
pub mod reduced;
pub mod special;

pub use energy::{CoreConstant, MomentumVector, VortexConfig};
pub use error::{Error, Result};
pub use exec::ExecPolicy;
pub use geom::{TorusVec, Vec2};
pub use green::{GreenEvaluator, GreenParams};
pub use harmonic::{GridField, HarmonicMap};
pub use pde::{PdeMode, PdeSolver, PdeState};
pub use reduced::{SimParams, Termination, Trajectory};
