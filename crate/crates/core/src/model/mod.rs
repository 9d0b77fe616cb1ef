//! Grid, measures, tariffs, dynamics and input validation.

mod dynamics;
mod grid;
mod measure;
mod problem;
mod validate;

pub use dynamics::{
    axis_controls, ConstantVelocity, ControlSystem, DynamicsBounds, DynamicsSpec, Monotonicity, RateProfile,
    SpatialWeight,
};
pub(crate) use grid::dist;
pub use grid::{build_grid, Domain, Grid, Point};
pub use measure::{DiscreteMeasure, TariffSpec};
pub use problem::{Discretization, ProblemSpec};
pub(crate) use validate::no_arbitrage_violation;
pub use validate::{validate_problem, CheckStatus, ValidationCheck, ValidationReport};
