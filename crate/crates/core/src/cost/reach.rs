use crate::model::{DynamicsBounds, Grid};
use crate::{Error, Result};

/// Step parameter minimising `θ` in the reach-time bound.
pub fn default_delta(kappa: f64, alpha: f64, lip_velocity: f64, diam: f64) -> f64 {
    alpha / (2.0 * kappa * (kappa + lip_velocity * diam))
}

/// `θ² = 1 + 2δ(−α + δκ(κ + C·diam))`.
pub fn theta(kappa: f64, alpha: f64, lip_velocity: f64, diam: f64, delta: f64) -> f64 {
    let sq = 1.0 + 2.0 * delta * (-alpha + delta * kappa * (kappa + lip_velocity * diam));
    sq.max(0.0).sqrt()
}

/// `δ / (1 − θ)`: time needed per unit distance, by the constant-control
/// steering argument. Errors when `θ ≥ 1`.
pub fn reach_coefficient(kappa: f64, alpha: f64, lip_velocity: f64, diam: f64, delta: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Parameter(format!("reach bound needs alpha > 0, got {alpha}")));
    }
    let th = theta(kappa, alpha, lip_velocity, diam, delta);
    if th >= 1.0 || !(delta > 0.0) {
        let upper = alpha / (kappa * (kappa + lip_velocity * diam));
        return Err(Error::Parameter(format!(
            "delta = {delta} gives theta = {th} >= 1; admissible range is 0 < delta < {upper}"
        )));
    }
    Ok(delta / (1.0 - th))
}

/// Upper bound on the time needed to steer node `x` to node `y`.
pub fn reach_time_bound(grid: &Grid, x: usize, y: usize, bounds: &DynamicsBounds, delta: f64) -> Result<f64> {
    let coef = reach_coefficient(bounds.kappa, bounds.alpha, bounds.lip_velocity, grid.diameter(), delta)?;
    Ok(coef * grid.distance(x, y))
}
