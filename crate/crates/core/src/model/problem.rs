use super::dynamics::DynamicsSpec;
use super::grid::Grid;
use super::measure::{DiscreteMeasure, TariffSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discretization {
    pub dt: f64,
    /// Horizon safety factor applied to the largest reach-time bound.
    pub t_max_factor: f64,
    /// Step parameter of the reach-time bound; `None` picks the minimiser of `θ`.
    pub delta: Option<f64>,
}

impl Discretization {
    pub fn new(dt: f64) -> Discretization {
        Discretization { dt, t_max_factor: 1.0, delta: None }
    }
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub grid: Grid,
    pub mu_plus: DiscreteMeasure,
    pub mu_minus: DiscreteMeasure,
    pub tariffs: TariffSpec,
    pub dynamics: DynamicsSpec,
    pub discretization: Discretization,
}

impl ProblemSpec {
    /// Checks the structural invariants; assumption checks live in
    /// [`super::validate_problem`].
    pub fn new(
        grid: Grid,
        mu_plus: DiscreteMeasure,
        mu_minus: DiscreteMeasure,
        tariffs: TariffSpec,
        dynamics: DynamicsSpec,
        discretization: Discretization,
    ) -> Result<ProblemSpec> {
        let n = grid.len();
        for (name, len) in [("mu_plus", mu_plus.len()), ("mu_minus", mu_minus.len()), ("tariffs", tariffs.len())] {
            if len != n {
                return Err(Error::Input(format!("{name} has {len} entries, grid has {n} nodes")));
            }
        }
        for (name, mu) in [("mu_plus", &mu_plus), ("mu_minus", &mu_minus)] {
            if let Some(i) = mu.support().into_iter().find(|&i| !grid.is_interior(i)) {
                return Err(Error::Input(format!(
                    "{name} puts mass on reserve node {i} (coordinate {})",
                    grid.label(i)
                )));
            }
        }
        for i in 0..n {
            if tariffs.import(i).is_some() && !grid.in_reserve_plus(i) {
                return Err(Error::Input(format!("finite import tariff on node {i}, which is not in K+")));
            }
            if tariffs.export(i).is_some() && !grid.in_reserve_minus(i) {
                return Err(Error::Input(format!("finite export tariff on node {i}, which is not in K-")));
            }
        }
        if dynamics.system.dim() != grid.dim() {
            return Err(Error::Input(format!(
                "dynamics dimension {} does not match grid dimension {}",
                dynamics.system.dim(),
                grid.dim()
            )));
        }
        let d = &discretization;
        if !(d.dt.is_finite() && d.dt > 0.0) {
            return Err(Error::Input(format!("dt must be positive, got {}", d.dt)));
        }
        if !(d.t_max_factor.is_finite() && d.t_max_factor > 0.0) {
            return Err(Error::Input(format!("t_max_factor must be positive, got {}", d.t_max_factor)));
        }
        if let Some(delta) = d.delta {
            if !(delta.is_finite() && delta > 0.0) {
                return Err(Error::Input(format!("delta must be positive, got {delta}")));
            }
        }
        Ok(ProblemSpec { grid, mu_plus, mu_minus, tariffs, dynamics, discretization })
    }

    pub fn dt(&self) -> f64 {
        self.discretization.dt
    }

    pub fn delta(&self) -> f64 {
        let b = &self.dynamics.bounds;
        self.discretization.delta.unwrap_or_else(|| {
            crate::cost::default_delta(b.kappa, b.alpha, b.lip_velocity, self.grid.diameter())
        })
    }

    /// `t_max_factor` times the largest pairwise reach-time bound.
    pub fn horizon(&self) -> Result<f64> {
        let b = &self.dynamics.bounds;
        let diam = self.grid.diameter();
        let coef = crate::cost::reach_coefficient(b.kappa, b.alpha, b.lip_velocity, diam, self.delta())?;
        Ok(self.discretization.t_max_factor * coef * diam)
    }

    /// Number of time steps covering the horizon.
    pub fn time_steps(&self) -> Result<usize> {
        Ok((self.horizon()? / self.dt() - 1e-9).ceil().max(1.0) as usize)
    }

    /// Same problem with both measures scaled by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Result<ProblemSpec> {
        let mut out = self.clone();
        out.mu_plus = self.mu_plus.scaled(lambda)?;
        out.mu_minus = self.mu_minus.scaled(lambda)?;
        Ok(out)
    }
}
