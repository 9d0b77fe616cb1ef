//! Cost → plan → potentials → value function, in one call.

use crate::cost::{compute_cost_matrix, CostMatrix};
use crate::eulerian::{lift_plan_to_eulerian, EulerianPair};
use crate::hjb::{dual_value_eulerian, value_on_graph, ValueField};
use crate::model::ProblemSpec;
use crate::transport::{decompose_plan, recover_dual, solve_primal, DualPotentials, PlanDecomposition, TransportPlan};
use crate::Result;

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub cost: CostMatrix,
    pub plan: TransportPlan,
    pub duals: DualPotentials,
    pub decomposition: PlanDecomposition,
}

pub fn solve(spec: &ProblemSpec) -> Result<PipelineOutput> {
    let cost = compute_cost_matrix(spec)?;
    solve_with_cost(spec, cost)
}

pub fn solve_with_cost(spec: &ProblemSpec, cost: CostMatrix) -> Result<PipelineOutput> {
    let plan = solve_primal(&cost, spec)?;
    let duals = recover_dual(&plan, &cost, spec)?;
    let decomposition = decompose_plan(&plan, &spec.grid)?;
    Ok(PipelineOutput { cost, plan, duals, decomposition })
}

impl PipelineOutput {
    pub fn eulerian(&self, spec: &ProblemSpec) -> Result<EulerianPair> {
        lift_plan_to_eulerian(&self.decomposition, &self.cost, spec)
    }

    /// Value function with `φ⁻` as obstacle, on the cost graph.
    pub fn value_field(&self) -> ValueField {
        value_on_graph(&self.duals.phi_minus, self.cost.graph())
    }

    pub fn dual_value_eulerian(&self, field: &ValueField, spec: &ProblemSpec) -> Result<f64> {
        dual_value_eulerian(field, &self.duals.phi_minus, spec)
    }
}
