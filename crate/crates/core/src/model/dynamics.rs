use std::fmt;
use std::sync::Arc;

use super::grid::{Grid, Point};
use super::problem::Discretization;
use crate::{Error, Result};

/// Controlled dynamics `γ' = k(t, γ, u)` with running cost `L(t, γ, u)` over a
/// finite control set indexed `0..num_controls()`.
pub trait ControlSystem: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn num_controls(&self) -> usize;

    fn velocity(&self, t: f64, x: Point, u: usize) -> Point;

    fn running_cost(&self, t: f64, x: Point, u: usize) -> f64;

    fn velocity_depends_on_time(&self) -> bool;

    fn cost_depends_on_time(&self) -> bool;

    fn cost_time_derivative(&self, t: f64, x: Point, u: usize) -> f64 {
        let e = 1e-6 * (1.0 + t.abs());
        let lo = (t - e).max(0.0);
        (self.running_cost(t + e, x, u) - self.running_cost(lo, x, u)) / (t + e - lo)
    }

    /// `∂k_i/∂x_j` as `jac[i][j]`.
    fn velocity_jacobian(&self, t: f64, x: Point, u: usize) -> [[f64; 2]; 2] {
        let mut jac = [[0.0; 2]; 2];
        for j in 0..self.dim() {
            let e = 1e-6 * (1.0 + x[j].abs());
            let (mut xp, mut xm) = (x, x);
            xp[j] += e;
            xm[j] -= e;
            let (kp, km) = (self.velocity(t, xp, u), self.velocity(t, xm, u));
            for (i, row) in jac.iter_mut().enumerate().take(self.dim()) {
                row[j] = (kp[i] - km[i]) / (2.0 * e);
            }
        }
        jac
    }

    fn cost_gradient(&self, t: f64, x: Point, u: usize) -> Point {
        let mut g = [0.0; 2];
        for (j, gj) in g.iter_mut().enumerate().take(self.dim()) {
            let e = 1e-6 * (1.0 + x[j].abs());
            let (mut xp, mut xm) = (x, x);
            xp[j] += e;
            xm[j] -= e;
            *gj = (self.running_cost(t, xp, u) - self.running_cost(t, xm, u)) / (2.0 * e);
        }
        g
    }
}

/// Sign of `∂ₜL`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    None,
}

/// Constants of the standing assumptions, as declared by the descriptor.
///
/// `lip_velocity` is the Lipschitz constant of `k` in `(t, x)` and enters the
/// reach-time bound; `lip_cost` is the one of `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsBounds {
    pub kappa: f64,
    pub lip_velocity: f64,
    pub lip_cost: f64,
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
}

#[derive(Clone)]
pub struct DynamicsSpec {
    pub system: Arc<dyn ControlSystem>,
    pub bounds: DynamicsBounds,
    pub monotonicity: Monotonicity,
    pub name: String,
}

impl fmt::Debug for DynamicsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DynamicsSpec")
            .field("name", &self.name)
            .field("bounds", &self.bounds)
            .field("monotonicity", &self.monotonicity)
            .finish()
    }
}

/// The profile `g` of the built-in dynamics; the running cost is `g'(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateProfile {
    /// `g(t) = t²/2`
    Quadratic,
    /// `g(t) = 1 − e^{−t}`
    ExpSaturating,
    /// `g(t) = t`
    Linear,
}

impl RateProfile {
    pub fn from_name(name: &str) -> Option<RateProfile> {
        match name {
            "quadratic" => Some(RateProfile::Quadratic),
            "exp_saturating" => Some(RateProfile::ExpSaturating),
            "linear" => Some(RateProfile::Linear),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RateProfile::Quadratic => "quadratic",
            RateProfile::ExpSaturating => "exp_saturating",
            RateProfile::Linear => "linear",
        }
    }

    pub fn g(self, t: f64) -> f64 {
        match self {
            RateProfile::Quadratic => 0.5 * t * t,
            RateProfile::ExpSaturating => 1.0 - (-t).exp(),
            RateProfile::Linear => t,
        }
    }

    pub fn rate(self, t: f64) -> f64 {
        match self {
            RateProfile::Quadratic => t,
            RateProfile::ExpSaturating => (-t).exp(),
            RateProfile::Linear => 1.0,
        }
    }

    pub fn rate_derivative(self, t: f64) -> f64 {
        match self {
            RateProfile::Quadratic => 1.0,
            RateProfile::ExpSaturating => -(-t).exp(),
            RateProfile::Linear => 0.0,
        }
    }

    /// `∫₀ᵗ g(s) ds`.
    pub fn integral(self, t: f64) -> f64 {
        match self {
            RateProfile::Quadratic => t * t * t / 6.0,
            RateProfile::ExpSaturating => t - 1.0 + (-t).exp(),
            RateProfile::Linear => 0.5 * t * t,
        }
    }

    pub fn monotonicity(self) -> Monotonicity {
        match self {
            RateProfile::Quadratic => Monotonicity::Increasing,
            RateProfile::ExpSaturating => Monotonicity::Decreasing,
            RateProfile::Linear => Monotonicity::None,
        }
    }
}

/// Affine positive weight `w(x) = offset + slope·x` multiplying the rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialWeight {
    pub offset: f64,
    pub slope: Point,
}

impl SpatialWeight {
    pub const UNIFORM: SpatialWeight = SpatialWeight { offset: 1.0, slope: [0.0, 0.0] };

    pub fn at(&self, x: Point) -> f64 {
        self.offset + self.slope[0] * x[0] + self.slope[1] * x[1]
    }
}

/// `k(t, x, u) = u` for a fixed list of control vectors and `L = g'(t)·w(x)`.
#[derive(Debug, Clone)]
pub struct ConstantVelocity {
    dim: usize,
    controls: Vec<Point>,
    profile: RateProfile,
    weight: SpatialWeight,
}

impl ConstantVelocity {
    pub fn new(dim: usize, controls: Vec<Point>, profile: RateProfile, weight: SpatialWeight) -> Self {
        ConstantVelocity { dim, controls, profile, weight }
    }

    pub fn controls(&self) -> &[Point] {
        &self.controls
    }

    pub fn profile(&self) -> RateProfile {
        self.profile
    }
}

impl ControlSystem for ConstantVelocity {
    fn dim(&self) -> usize {
        self.dim
    }

    fn num_controls(&self) -> usize {
        self.controls.len()
    }

    fn velocity(&self, _t: f64, _x: Point, u: usize) -> Point {
        self.controls[u]
    }

    fn running_cost(&self, t: f64, x: Point, _u: usize) -> f64 {
        self.profile.rate(t) * self.weight.at(x)
    }

    fn velocity_depends_on_time(&self) -> bool {
        false
    }

    fn cost_depends_on_time(&self) -> bool {
        self.profile != RateProfile::Linear
    }

    fn cost_time_derivative(&self, t: f64, x: Point, _u: usize) -> f64 {
        self.profile.rate_derivative(t) * self.weight.at(x)
    }

    fn velocity_jacobian(&self, _t: f64, _x: Point, _u: usize) -> [[f64; 2]; 2] {
        [[0.0; 2]; 2]
    }

    fn cost_gradient(&self, t: f64, _x: Point, _u: usize) -> Point {
        let r = self.profile.rate(t);
        [r * self.weight.slope[0], r * self.weight.slope[1]]
    }
}

/// `±eᵢ` for each axis: the unit-speed control set.
pub fn axis_controls(dim: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(2 * dim);
    for axis in 0..dim {
        let mut p = [0.0; 2];
        p[axis] = 1.0;
        out.push(p);
        p[axis] = -1.0;
        out.push(p);
    }
    out
}

/// Unit vectors used to sample the inward-cone condition.
pub(crate) fn sample_directions(dim: usize) -> Vec<Point> {
    if dim == 1 {
        return vec![[1.0, 0.0], [-1.0, 0.0]];
    }
    (0..720)
        .map(|i| {
            let a = i as f64 * std::f64::consts::PI / 360.0;
            [a.cos(), a.sin()]
        })
        .collect()
}

/// Largest `α` with `min_u k·v ≤ −α` for every sampled unit `v`.
pub(crate) fn cone_constant(controls: &[Point], dim: usize) -> f64 {
    sample_directions(dim)
        .iter()
        .map(|v| {
            controls
                .iter()
                .map(|u| -(u[0] * v[0] + u[1] * v[1]))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

impl DynamicsSpec {
    pub fn new(
        system: Arc<dyn ControlSystem>,
        bounds: DynamicsBounds,
        monotonicity: Monotonicity,
        name: impl Into<String>,
    ) -> DynamicsSpec {
        DynamicsSpec { system, bounds, monotonicity, name: name.into() }
    }

    /// Built-in `unit_speed_gprime`: controls `±eᵢ`, `L = g'(t)`.
    pub fn unit_speed_gprime(profile: RateProfile, grid: &Grid, disc: &Discretization) -> Result<DynamicsSpec> {
        Self::constant_velocity(axis_controls(grid.dim()), profile, SpatialWeight::UNIFORM, grid, disc)
    }

    /// Constant-velocity dynamics with bounds derived from the grid and the
    /// horizon implied by `disc`.
    pub fn constant_velocity(
        controls: Vec<Point>,
        profile: RateProfile,
        weight: SpatialWeight,
        grid: &Grid,
        disc: &Discretization,
    ) -> Result<DynamicsSpec> {
        if controls.is_empty() {
            return Err(Error::Input("empty control set".into()));
        }
        let dim = grid.dim();
        let kappa = controls.iter().map(|u| (u[0] * u[0] + u[1] * u[1]).sqrt()).fold(0.0, f64::max);
        let alpha = cone_constant(&controls, dim);
        let diam = grid.diameter();
        let horizon = if alpha > 0.0 {
            let delta = disc.delta.unwrap_or_else(|| crate::cost::default_delta(kappa, alpha, 0.0, diam));
            disc.t_max_factor * crate::cost::reach_coefficient(kappa, alpha, 0.0, diam, delta)? * diam
        } else {
            // (H3) fails; the horizon only sizes β₁ and β₂ for the report.
            disc.t_max_factor * diam / kappa.max(f64::MIN_POSITIVE)
        };

        let (lo, hi) = (grid.lower(), grid.upper());
        let corners = [lo, [hi[0], lo[1]], [lo[0], hi[1]], hi];
        let w_min = corners.iter().map(|&c| weight.at(c)).fold(f64::INFINITY, f64::min);
        let w_max = corners.iter().map(|&c| weight.at(c)).fold(f64::NEG_INFINITY, f64::max);
        if w_min < 0.0 {
            return Err(Error::Input(format!("spatial weight is negative on the domain ({w_min})")));
        }
        let (r0, r1) = (profile.rate(0.0), profile.rate(horizon));
        let (rate_min, rate_max) = (r0.min(r1), r0.max(r1));
        let curvature = profile.rate_derivative(0.0).abs().max(profile.rate_derivative(horizon).abs());
        let slope = (weight.slope[0].powi(2) + weight.slope[1].powi(2)).sqrt();
        let bounds = DynamicsBounds {
            kappa,
            lip_velocity: 0.0,
            lip_cost: curvature * w_max + rate_max * slope,
            alpha,
            beta1: rate_max * w_max,
            beta2: rate_min * w_min,
        };
        let system = ConstantVelocity::new(dim, controls, profile, weight);
        Ok(DynamicsSpec::new(
            Arc::new(system),
            bounds,
            profile.monotonicity(),
            format!("constant_velocity/{}", profile.name()),
        ))
    }

    pub fn num_controls(&self) -> usize {
        self.system.num_controls()
    }

    pub fn velocity(&self, t: f64, x: Point, u: usize) -> Point {
        self.system.velocity(t, x, u)
    }

    pub fn running_cost(&self, t: f64, x: Point, u: usize) -> f64 {
        self.system.running_cost(t, x, u)
    }

    /// Neither `k` nor `L` depends on time.
    pub fn is_autonomous(&self) -> bool {
        !self.system.velocity_depends_on_time() && !self.system.cost_depends_on_time()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_match_their_derivatives() {
        for p in [RateProfile::Quadratic, RateProfile::ExpSaturating, RateProfile::Linear] {
            for &t in &[0.1, 0.7, 1.9] {
                let e = 1e-6;
                let dg = (p.g(t + e) - p.g(t - e)) / (2.0 * e);
                assert!((dg - p.rate(t)).abs() < 1e-8, "{p:?} g' at {t}");
                let dint = (p.integral(t + e) - p.integral(t - e)) / (2.0 * e);
                assert!((dint - p.g(t)).abs() < 1e-8, "{p:?} ∫g at {t}");
            }
        }
    }

    #[test]
    fn cone_constants() {
        assert_eq!(cone_constant(&axis_controls(1), 1), 1.0);
        let a2 = cone_constant(&axis_controls(2), 2);
        assert!((a2 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(cone_constant(&[[1.0, 0.0]], 1) < 0.0);
    }

    #[test]
    fn unit_speed_bounds_on_example_domain() {
        let g = Grid::interval(0.0, 2.0, 41).unwrap();
        let disc = Discretization { dt: 0.05, t_max_factor: 1.0, delta: None };
        let d = DynamicsSpec::unit_speed_gprime(RateProfile::Quadratic, &g, &disc).unwrap();
        assert_eq!(d.bounds.kappa, 1.0);
        assert_eq!(d.bounds.alpha, 1.0);
        assert_eq!(d.bounds.beta2, 0.0);
        assert!(d.bounds.beta1 >= 2.0);
        assert_eq!(d.monotonicity, Monotonicity::Increasing);
        assert!(!d.is_autonomous());
        let lin = DynamicsSpec::unit_speed_gprime(RateProfile::Linear, &g, &disc).unwrap();
        assert!(lin.is_autonomous());
        assert_eq!(lin.bounds.beta1, 1.0);
    }
}
