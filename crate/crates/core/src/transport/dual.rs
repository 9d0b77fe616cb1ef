use super::primal::TransportPlan;
use crate::cost::CostMatrix;
use crate::model::ProblemSpec;
use crate::{Error, Result};

/// Kantorovich potentials on every grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPotentials {
    pub phi_plus: Vec<f64>,
    pub phi_minus: Vec<f64>,
}

impl DualPotentials {
    /// `∑ φ⁻ μ⁻ − ∑ φ⁺ μ⁺`.
    pub fn objective(&self, spec: &ProblemSpec) -> f64 {
        let a: f64 = spec.mu_minus.support().iter().map(|&y| self.phi_minus[y] * spec.mu_minus.weight(y)).sum();
        let b: f64 = spec.mu_plus.support().iter().map(|&x| self.phi_plus[x] * spec.mu_plus.weight(x)).sum();
        a - b
    }

    /// Largest violation of `φ⁻(y) − φ⁺(x) ≤ c(x, y)`, of `φ⁺ ≤ ψ⁺` on
    /// importers and of `φ⁻ ≥ ψ⁻` on exporters.
    pub fn max_infeasibility(&self, cost: &CostMatrix, spec: &ProblemSpec) -> f64 {
        let n = spec.grid.len();
        let mut worst = 0.0f64;
        for x in 0..n {
            for y in 0..n {
                worst = worst.max(self.phi_minus[y] - self.phi_plus[x] - cost.cost(x, y));
            }
        }
        for i in spec.tariffs.importers() {
            worst = worst.max(self.phi_plus[i] - spec.tariffs.import(i).unwrap_or(f64::INFINITY));
        }
        for i in spec.tariffs.exporters() {
            worst = worst.max(spec.tariffs.export(i).unwrap_or(f64::NEG_INFINITY) - self.phi_minus[i]);
        }
        worst
    }

    /// Largest violation of `ψ⁻ ≤ φ⁻ ≤ φ⁺ ≤ ψ⁺` on reserve nodes.
    pub fn reserve_order_violation(&self, spec: &ProblemSpec) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..spec.grid.len() {
            if !spec.grid.is_reserve(i) {
                continue;
            }
            worst = worst.max(self.phi_minus[i] - self.phi_plus[i]);
            if let Some(p) = spec.tariffs.import(i) {
                worst = worst.max(self.phi_plus[i] - p);
            }
            if let Some(p) = spec.tariffs.export(i) {
                worst = worst.max(p - self.phi_minus[i]);
            }
        }
        worst
    }
}

/// Potentials from the plan's final basis, extended to all nodes.
///
/// Off `supp μ⁻`, `φ⁻(y)` is the largest feasible value
/// `min( min_{x ∈ supp μ⁺} c(x,y) + φ⁺(x), min_{r ∈ K⁺} c(r,y) + ψ⁺(r) )`;
/// off `supp μ⁺`, `φ⁺(x) = max_y φ⁻(y) − c(x,y)`. Both keep every constraint
/// and complementary-slackness condition and leave the objective unchanged.
pub fn recover_dual(plan: &TransportPlan, cost: &CostMatrix, spec: &ProblemSpec) -> Result<DualPotentials> {
    let (basis_plus, basis_minus) = plan
        .basis
        .as_ref()
        .ok_or_else(|| Error::Input("plan carries no basis potentials; solve it with solve_primal".into()))?;
    let n = spec.grid.len();
    let src = spec.mu_plus.support();
    let importers = spec.tariffs.importers();
    let mut phi_plus = vec![f64::NAN; n];
    for &x in &src {
        phi_plus[x] = basis_plus[x];
    }
    let mut phi_minus = vec![f64::NAN; n];
    for y in 0..n {
        phi_minus[y] = if spec.mu_minus.weight(y) > 0.0 {
            basis_minus[y]
        } else {
            let a = src.iter().map(|&x| cost.cost(x, y) + phi_plus[x]).fold(f64::INFINITY, f64::min);
            let b = importers
                .iter()
                .map(|&r| cost.cost(r, y) + spec.tariffs.import(r).unwrap_or(f64::INFINITY))
                .fold(f64::INFINITY, f64::min);
            a.min(b)
        };
    }
    if phi_minus.iter().any(|v| !v.is_finite()) {
        // No supply and no importer: nothing constrains φ⁻ from above.
        let fallback = spec.mu_minus.support().iter().map(|&y| phi_minus[y]).fold(0.0, f64::min);
        for v in phi_minus.iter_mut().filter(|v| !v.is_finite()) {
            *v = fallback;
        }
    }
    for x in 0..n {
        if spec.mu_plus.weight(x) == 0.0 {
            phi_plus[x] = (0..n).map(|y| phi_minus[y] - cost.cost(x, y)).fold(f64::NEG_INFINITY, f64::max);
        }
    }
    Ok(DualPotentials { phi_plus, phi_minus })
}

/// `|primal − dual| / (1 + |primal|)`.
pub fn relative_gap(plan: &TransportPlan, duals: &DualPotentials, spec: &ProblemSpec) -> f64 {
    (plan.objective - duals.objective(spec)).abs() / (1.0 + plan.objective.abs())
}
