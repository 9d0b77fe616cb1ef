//! The tariff-augmented Kantorovich problem: primal LP, dual potentials,
//! plan decomposition and complementary slackness.

mod decompose;
mod dual;
mod primal;
mod selectors;
pub mod simplex;
mod slackness;

pub use decompose::{decompose_plan, verify_subproblems, PlanDecomposition, SubproblemCheck};
pub use dual::{recover_dual, relative_gap, DualPotentials};
pub use primal::{plan_objective, solve_general_reserve, solve_primal, solve_primal_with, LpOptions, TransportPlan};
pub use selectors::{boundary_selectors, BoundarySelectors};
pub use simplex::PivotRule;
pub use slackness::{check_complementary_slackness, SlacknessReport};
