use super::dual::DualPotentials;
use super::primal::TransportPlan;
use crate::cost::CostMatrix;
use crate::model::ProblemSpec;

/// Largest violation of each complementary-slackness condition; zero when a
/// condition is vacuous.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlacknessReport {
    /// `|φ⁺ − ψ⁺|` over nodes that import.
    pub import: f64,
    /// `|φ⁻ − ψ⁻|` over nodes that export.
    pub export: f64,
    /// `|φ⁻(y) − φ⁺(x) − c(x, y)|` over the support of π.
    pub support: f64,
}

impl SlacknessReport {
    pub fn max(&self) -> f64 {
        self.import.max(self.export).max(self.support)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

pub fn check_complementary_slackness(
    plan: &TransportPlan,
    duals: &DualPotentials,
    cost: &CostMatrix,
    spec: &ProblemSpec,
) -> SlacknessReport {
    let mut r = SlacknessReport::default();
    for (i, &m) in plan.xi_plus.iter().enumerate() {
        if m > 0.0 {
            let p = spec.tariffs.import(i).unwrap_or(f64::NAN);
            r.import = r.import.max((duals.phi_plus[i] - p).abs());
        }
    }
    for (i, &m) in plan.xi_minus.iter().enumerate() {
        if m > 0.0 {
            let p = spec.tariffs.export(i).unwrap_or(f64::NAN);
            r.export = r.export.max((duals.phi_minus[i] - p).abs());
        }
    }
    for &(x, y, _) in &plan.pi {
        r.support = r.support.max((duals.phi_minus[y] - duals.phi_plus[x] - cost.cost(x, y)).abs());
    }
    r
}
