//! Sharp-interface simulator for dynamic triple lines with interface formation.
//!
//! Interfaces are Lagrangian marker chains that carry their own surface mass
//! and a density-dependent tension. Bulk phases are well-mixed compressible
//! reservoirs. Mass moves between bulk phases and interfaces through a
//! sorption closure and between interfaces through the triple junction. The
//! total available energy is a discrete Lyapunov function of the scheme and
//! is audited every step in [`energy`].
//!
//! Module map:
//!
//! - [`geometry`]: marker chains, junctions, phase regions, curvature and measures.
//! - [`thermo`]: bulk and surface equations of state.
//! - [`exchange`]: sorption, slip and junction transfer closures.
//! - [`dynamics`]: force evaluation, the time step and the run driver.
//! - [`energy`]: available energy, dissipation channels and decay certificates.
//! - [`transport`]: brute-force checks of the moving-domain transport theorems.
//! - [`scenario`]: scenario files, presets and state construction.
//! - [`output`]: CSV, snapshots, checkpoints and SVG reports.

pub mod dynamics;
pub mod energy;
pub mod error;
pub mod exchange;
pub mod geometry;
pub mod output;
pub mod scenario;
pub mod thermo;
pub mod transport;

pub use error::{Error, Result};
