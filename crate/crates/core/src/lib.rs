//! Coordinate-wise operator splitting for autonomous ODEs.
//!
//! A splitting scheme is a chronological list of [`scheme::Factor`]s, each
//! advancing one coordinate along its frozen flow (all other coordinates held
//! fixed) for a possibly complex multiple of the step size. The crate builds
//! Lie-Trotter, Strang and recursive higher-order compositions, extends
//! two-operator compositions to `N` coordinates, integrates systems with
//! closed-form frozen flows, and provides a Dormand-Prince reference solver
//! plus order diagnostics.
//!
//! The crate is `no_std` and needs only `alloc`.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod error;
pub mod integrator;
pub mod metrics;
pub mod order;
pub mod rk45;
pub mod scheme;
pub mod special;
pub mod systems;

pub use error::{Error, Result};
pub use integrator::{integrate, step, IntegratorOptions, Trajectory};
pub use metrics::rmse;
pub use num_complex::Complex64;
pub use rk45::{rk45_solve, uniform_grid, RkOptions};
pub use scheme::{Factor, Scheme};
pub use systems::OdeSystem;
