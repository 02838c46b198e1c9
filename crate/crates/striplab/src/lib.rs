//! Numerical laboratory for heat-flow decay in a planar strip whose
//! boundary is deformed by a compactly supported shear.
//!
//! The strip `R x (0, d)` with Dirichlet walls carries the heat flow of
//! the Laplacian; a shear map `(x, z) -> (x, f(x) + z)` bends both walls
//! along a profile `f` without changing the cell areas. Pulled back to the
//! straight strip, the quadratic form becomes
//! `||d_x v - f'(x) d_z v||^2 + ||d_z v||^2`, so all geometry enters
//! through the slope `f'`. After subtracting the transverse ground energy
//! `(pi/d)^2`, the interesting question is the *rate* at which solutions
//! decay — and how the shear improves it.
//!
//! The crate follows the decay through self-similar variables
//! `s = log(1 + t)`, `y = x e^{-s/2}`: the rate is governed by the ground
//! value `mu(s)` of a scaled operator family that interpolates between a
//! line oscillator with ground value 1/4 (straight strips) and its
//! half-line counterpart with ground value 3/4 (sheared strips). The
//! modules compute these objects with certified residuals and compare
//! three independent routes: spectral curves, a weighted spectral gap, and
//! direct time stepping.
//!
//! Module map:
//! - [`geometry`]: shear profiles, the induced metric, weights.
//! - [`grid`], [`operator`], [`band`], [`assemble`]: graded tensor grids
//!   and symmetric finite-difference forms with banded storage.
//! - [`eigen`]: certified smallest-eigenvalue solves, ladders, ground
//!   curves, and the weighted gap.
//! - [`evolve`], [`fit`]: trapezoidal time stepping with a monotone
//!   compensated norm, power-law fits, and integrated envelopes.
//! - [`config`], [`experiment`], [`report`]: TOML-driven experiment
//!   runners emitting CSV files and a pass/fail claim table.
//! - [`tolerances`]: every numeric gate, pinned in one place.

pub mod assemble;
pub mod band;
pub mod config;
pub mod eigen;
pub mod error;
pub mod evolve;
pub mod experiment;
pub mod fit;
pub mod geometry;
pub mod grid;
pub mod operator;
pub mod report;
pub mod tolerances;

pub use config::{parse_config, ExperimentKind, RunConfig};
pub use eigen::{EigOptions, EigenResult, MuCurve};
pub use error::{Error, Result};
pub use evolve::NormTrace;
pub use fit::DecayFit;
pub use geometry::Profile;
pub use grid::{build_grid2d, Grading, Grid1D, Grid2D};
pub use operator::SparseSymOp;
pub use report::{Claim, Report};
