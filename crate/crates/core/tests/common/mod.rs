#![allow(dead_code)]

pub mod oracles;
#[allow(unused_imports)]
pub use oracles::*;

use tariffot::cost::{compute_cost_matrix, CostMatrix};
use tariffot::model::RateProfile;
use tariffot::{DiscreteMeasure, Discretization, DynamicsSpec, Grid, ProblemSpec, TariffSpec};

/// Unit-speed problem on `[a, b]` with `n` nodes and `dt = h`.
pub fn line_spec(
    a: f64,
    b: f64,
    n: usize,
    profile: RateProfile,
    mu_plus: Vec<f64>,
    mu_minus: Vec<f64>,
    tariffs: TariffSpec,
) -> ProblemSpec {
    let grid = Grid::interval(a, b, n).unwrap();
    line_spec_on(grid, profile, mu_plus, mu_minus, tariffs)
}

pub fn line_spec_on(
    grid: Grid,
    profile: RateProfile,
    mu_plus: Vec<f64>,
    mu_minus: Vec<f64>,
    tariffs: TariffSpec,
) -> ProblemSpec {
    let disc = Discretization::new(grid.spacing());
    let dynamics = DynamicsSpec::unit_speed_gprime(profile, &grid, &disc).unwrap();
    ProblemSpec::new(
        grid,
        DiscreteMeasure::new(mu_plus).unwrap(),
        DiscreteMeasure::new(mu_minus).unwrap(),
        tariffs,
        dynamics,
        disc,
    )
    .unwrap()
}

pub fn with_cost(spec: ProblemSpec) -> (ProblemSpec, CostMatrix) {
    let cost = compute_cost_matrix(&spec).unwrap();
    (spec, cost)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Free boundary of a numeric run against the closed form. Nodes within `h`
/// of the closed-form jump at `2 - x1` are compared with the completed graph
/// (the range of `τ⁻¹` over `[y - h, y + h]`); a node there where `φ⁻` has a
/// kink is reported in `excluded` instead, since `τ⁻¹` is two-valued at the
/// jump.
pub struct FreeBoundaryCheck {
    pub max_err: f64,
    pub worst_y: f64,
    pub checked: usize,
    pub near_jump: usize,
    pub excluded: Vec<f64>,
}

pub fn check_free_boundary(
    spec: &ProblemSpec,
    phi_minus: &[f64],
    fb: &tariffot::hjb::FreeBoundary,
    cf: &tariffot::example1d::Example1DSolution,
    h: f64,
) -> FreeBoundaryCheck {
    let jump = 2.0 - cf.x1;
    let mut out = FreeBoundaryCheck { max_err: 0.0, worst_y: f64::NAN, checked: 0, near_jump: 0, excluded: vec![] };
    for y in spec.mu_minus.support() {
        let yc = spec.grid.node(y)[0];
        let tau = fb.tau_inv(y).expect("free boundary defined on supp μ⁻");
        let near = (yc - jump).abs() <= h + 1e-12;
        let err = if near {
            if tariffot::hjb::node_gradient(&spec.grid, phi_minus, y).is_none() {
                out.excluded.push(yc);
                continue;
            }
            out.near_jump += 1;
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for k in 0..=200 {
                let v = cf.tau_inv(yc - h + 2.0 * h * k as f64 / 200.0);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            (lo - tau).max(tau - hi).max(0.0)
        } else {
            (tau - cf.tau_inv(yc)).abs()
        };
        out.checked += 1;
        if err > out.max_err || out.worst_y.is_nan() {
            out.max_err = out.max_err.max(err);
            out.worst_y = yc;
        }
    }
    out
}
