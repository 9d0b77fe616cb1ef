//! Closed-form reference for the unit-speed example on `[0, 2]`: `μ⁺`
//! uniform on `[0, 1]`, `μ⁻` uniform on `[1, 2]`, export at 0 against a fee
//! `p⁻`, import at 2 at price `p⁺`, and running cost `g'(t)`.
//!
//! Mass left of the split point `x₁` is exported at 0, the rest of `[0, 1]`
//! is carried into `[1, 2]`, and `(2 − x₁, 2]` is served by imports at 2.

use crate::model::{DiscreteMeasure, Discretization, DynamicsSpec, Grid, Monotonicity, RateProfile, TariffSpec};
use crate::{Error, ProblemSpec, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example1DSolution {
    pub profile: RateProfile,
    pub p_minus: f64,
    pub p_plus: f64,
    pub x1: f64,
}

/// Convex `g` keeps the interior map increasing; concave `g` reverses it.
fn is_convex(profile: RateProfile) -> Result<bool> {
    match profile.monotonicity() {
        Monotonicity::Increasing => Ok(true),
        Monotonicity::Decreasing => Ok(false),
        Monotonicity::None => {
            Err(Error::Unsupported(format!("profile {} is neither strictly convex nor concave", profile.name())))
        }
    }
}

pub fn closed_form_example(profile: RateProfile, p_minus: f64, p_plus: f64, x1: f64) -> Result<Example1DSolution> {
    is_convex(profile)?;
    if !(0.0..=1.0).contains(&x1) {
        return Err(Error::Parameter(format!("split point x1 = {x1} is outside [0, 1]")));
    }
    Ok(Example1DSolution { profile, p_minus, p_plus, x1 })
}

impl Example1DSolution {
    fn convex(&self) -> bool {
        self.profile.monotonicity() == Monotonicity::Increasing
    }

    /// Free boundary on `[1, 2]`.
    pub fn tau_inv(&self, y: f64) -> f64 {
        let x1 = self.x1;
        if y <= 2.0 - x1 {
            if self.convex() {
                1.0 - x1
            } else {
                2.0 * y - 2.0
            }
        } else {
            2.0 - y
        }
    }

    /// `φ⁻` on `[1, 2]`.
    pub fn phi_minus(&self, y: f64) -> f64 {
        let g = |t| self.profile.g(t);
        let (x1, pm) = (self.x1, self.p_minus);
        if self.convex() {
            let slope = self.profile.rate(1.0 - x1);
            if y <= 2.0 - x1 {
                -pm - g(x1) + g(1.0 - x1) + slope * (y - 1.0)
            } else {
                -pm - 2.0 * g(x1) + g(1.0 - x1) + slope * (1.0 - x1) + g(2.0 - y)
            }
        } else if y <= 2.0 - x1 {
            -pm - g(x1) + g(2.0 - 2.0 * x1) + 0.5 * g(2.0 * y - 2.0) - 0.5 * g(2.0 - 2.0 * x1)
        } else {
            -pm - 2.0 * g(x1) + g(2.0 - 2.0 * x1) + g(2.0 - y)
        }
    }

    /// Export fees, imports at `p⁺` and travel costs of the three legs.
    pub fn total_cost(&self) -> f64 {
        let p = self.profile;
        let x1 = self.x1;
        let legs = x1 * (self.p_minus + self.p_plus) + 2.0 * p.integral(x1);
        if self.convex() {
            legs + (1.0 - x1) * p.g(1.0 - x1)
        } else {
            legs + 0.5 * p.integral(2.0 - 2.0 * x1)
        }
    }

    /// Endpoint of the mass starting at `x ∈ [0, 1]`.
    pub fn map_plus(&self, x: f64) -> f64 {
        if x < self.x1 {
            0.0
        } else if self.convex() {
            x + 1.0 - self.x1
        } else {
            2.0 - x
        }
    }

    /// Origin of the mass ending at `y ∈ [1, 2]`.
    pub fn map_minus(&self, y: f64) -> f64 {
        if y > 2.0 - self.x1 {
            2.0
        } else if self.convex() {
            y - 1.0 + self.x1
        } else {
            2.0 - y
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalSplit {
    pub x1: f64,
    /// The criterion has no root in `(0, 1)` and `x1` sits at an end.
    pub clamped: bool,
}

/// Root of `φ⁻(2; x₁) = p⁺` by bisection; `φ⁻(2; ·)` is decreasing.
pub fn optimal_x1(profile: RateProfile, p_minus: f64, p_plus: f64) -> Result<OptimalSplit> {
    is_convex(profile)?;
    if p_minus + p_plus < -profile.g(2.0) {
        return Err(Error::Parameter(format!(
            "p_minus + p_plus = {} is below -g(2) = {}; exporting imports would pay",
            p_minus + p_plus,
            -profile.g(2.0)
        )));
    }
    let f = |x1: f64| Example1DSolution { profile, p_minus, p_plus, x1 }.phi_minus(2.0) - p_plus;
    if f(0.0) <= 0.0 {
        return Ok(OptimalSplit { x1: 0.0, clamped: true });
    }
    if f(1.0) >= 0.0 {
        return Ok(OptimalSplit { x1: 1.0, clamped: true });
    }
    let (mut a, mut b) = (0.0f64, 1.0f64);
    while b - a > 1e-12 {
        let m = 0.5 * (a + b);
        if f(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(OptimalSplit { x1: 0.5 * (a + b), clamped: false })
}

/// `p⁺` that puts the concave example's split at `x₁ = 1/2` when `p⁻ = 0`:
/// `g(1) − 2g(1/2)` for `g(t) = 1 − e^{−t}`.
pub fn concave_demo_p_plus() -> f64 {
    let g = |t: f64| RateProfile::ExpSaturating.g(t);
    g(1.0) - 2.0 * g(0.5)
}

/// Discretisation of the example with spacing `h` and `dt = h`. Each
/// interior node gets mass `h`: `μ⁺` on `(0, 1)` and `μ⁻` on `(1, 2)`, so the
/// two never share a node.
pub fn example_spec(profile: RateProfile, p_minus: f64, p_plus: f64, h: f64) -> Result<ProblemSpec> {
    let n = (2.0 / h).round() as usize + 1;
    if n < 5 || ((n - 1) as f64 * h - 2.0).abs() > 1e-9 {
        return Err(Error::Parameter(format!("spacing {h} does not divide [0, 2] into at least 4 cells")));
    }
    let grid = Grid::interval(0.0, 2.0, n)?;
    let half = h / 2.0;
    let mu_plus = DiscreteMeasure::uniform(&grid, [0.0, 0.0], [1.0 - half, 0.0], 1.0)?;
    let mu_minus = DiscreteMeasure::uniform(&grid, [1.0 + half, 0.0], [2.0, 0.0], 1.0)?;
    let (mu_plus, mu_minus) = (per_node(&grid, mu_plus, h)?, per_node(&grid, mu_minus, h)?);
    let mut tariffs = TariffSpec::closed(n);
    tariffs.set_export(0, -p_minus);
    tariffs.set_import(n - 1, p_plus);
    let disc = Discretization::new(h);
    let dynamics = DynamicsSpec::unit_speed_gprime(profile, &grid, &disc)?;
    ProblemSpec::new(grid, mu_plus, mu_minus, tariffs, dynamics, disc)
}

/// Rescales a uniform measure to mass `h` per supported node.
fn per_node(grid: &Grid, mu: DiscreteMeasure, h: f64) -> Result<DiscreteMeasure> {
    let w: Vec<f64> = (0..grid.len()).map(|i| if mu.weight(i) > 0.0 { h } else { 0.0 }).collect();
    DiscreteMeasure::new(w)
}
