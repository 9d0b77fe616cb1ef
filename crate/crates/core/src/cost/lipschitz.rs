use super::{reach_coefficient, CostMatrix};
use crate::model::ProblemSpec;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzReport {
    /// max |c(x,y) − c(x',y)| / |x − x'| over grid neighbours x, x'.
    pub source: f64,
    /// max |c(x,y) − c(x,y')| / |y − y'| over grid neighbours y, y'.
    pub target: f64,
    /// `(β₁·C_reach + C_L·T)·exp(C_k·T)` with `T` the horizon.
    pub theoretical: f64,
}

impl LipschitzReport {
    pub fn empirical(&self) -> f64 {
        self.source.max(self.target)
    }

    pub fn within_bound(&self) -> bool {
        self.empirical().is_finite() && self.empirical() <= self.theoretical * (1.0 + 1e-12)
    }
}

/// Empirical Lipschitz constants of `c` against the bound obtained by
/// steering to a neighbour, re-timing the second leg and propagating the
/// start perturbation with Gronwall. The bound assumes `dt` does not exceed
/// the grid spacing.
pub fn check_lipschitz(cost: &CostMatrix, spec: &ProblemSpec) -> Result<LipschitzReport> {
    let grid = &spec.grid;
    let n = grid.len();
    let (mut source, mut target) = (0.0f64, 0.0f64);
    for x in 0..n {
        for xn in grid.neighbors(x) {
            if xn < x {
                continue;
            }
            let d = grid.distance(x, xn);
            for y in 0..n {
                source = source.max((cost.cost(x, y) - cost.cost(xn, y)).abs() / d);
                target = target.max((cost.cost(y, x) - cost.cost(y, xn)).abs() / d);
            }
        }
    }
    let b = spec.dynamics.bounds;
    let coef = reach_coefficient(b.kappa, b.alpha, b.lip_velocity, grid.diameter(), spec.delta())?;
    let horizon = spec.horizon()?;
    let theoretical = (b.beta1 * coef + b.lip_cost * horizon) * (b.lip_velocity * horizon).exp();
    Ok(LipschitzReport { source, target, theoretical })
}
