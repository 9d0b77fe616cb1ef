//! Optimal transport with boundary tariffs and free end time.
//!
//! The pipeline runs in five stages, each in its own module:
//!
//! - [`model`]: grid, measures, tariffs, dynamics and input validation.
//! - [`cost`]: free end-time control cost `c(x, y)` on a time-expanded graph.
//! - [`transport`]: the tariff-augmented Kantorovich LP, its dual and plan decomposition.
//! - [`eulerian`]: lifting a plan to a density process and stopping distribution.
//! - [`hjb`]: the obstacle HJB value function, free boundary and Hamiltonian flows.
//!
//! [`example1d`] holds closed-form reference solutions for the one-dimensional
//! example, [`config`] parses problem files and [`io`] writes CSV and SVG.

pub mod config;
pub mod cost;
mod error;
pub mod eulerian;
pub mod example1d;
pub mod hjb;
pub mod io;
pub mod model;
pub mod pipeline;
pub mod transport;

pub use error::{Error, Result};
pub use model::{
    DiscreteMeasure, Discretization, DynamicsSpec, Grid, Monotonicity, Point, ProblemSpec,
    TariffSpec,
};
