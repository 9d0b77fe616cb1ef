use super::dynamics::{sample_directions, Monotonicity};
use super::grid::{dist, Point};
use super::problem::ProblemSpec;
use crate::cost::CostMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Not applicable or not checkable on samples; the detail says why.
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationCheck {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&ValidationCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationCheck> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

const REL_TOL: f64 = 1e-9;

fn check(name: &'static str, violation: Option<String>, ok: &str) -> ValidationCheck {
    match violation {
        Some(detail) => ValidationCheck { name, status: CheckStatus::Fail, detail },
        None => ValidationCheck { name, status: CheckStatus::Pass, detail: ok.to_string() },
    }
}

fn skipped(name: &'static str, detail: &str) -> ValidationCheck {
    ValidationCheck { name, status: CheckStatus::Skipped, detail: detail.to_string() }
}

/// Spot-checks the standing assumptions on grid and time samples.
///
/// Never fails; each violated assumption becomes a `Fail` entry carrying the
/// offending sample. The no-arbitrage check needs `cost` and is skipped
/// without it.
pub fn validate_problem(spec: &ProblemSpec, cost: Option<&CostMatrix>) -> ValidationReport {
    let grid = &spec.grid;
    let dynamics = &spec.dynamics;
    let sys = dynamics.system.as_ref();
    let b = dynamics.bounds;
    let nu = sys.num_controls();
    let horizon = spec.horizon().unwrap_or(1.0);
    let dt = spec.dt();

    let stride = (grid.len() / 64).max(1);
    let xs: Vec<usize> = (0..grid.len()).step_by(stride).collect();
    let ts: Vec<f64> = (0..=4).map(|i| horizon * i as f64 / 4.0).collect();
    let sample_list: Vec<(f64, usize, usize)> = xs
        .iter()
        .flat_map(|&i| ts.iter().flat_map(move |&t| (0..nu).map(move |u| (t, i, u))))
        .collect();
    let samples = || sample_list.iter().copied();
    let norm = |p: Point| (p[0] * p[0] + p[1] * p[1]).sqrt();
    let mut checks = Vec::new();

    checks.push(check(
        "H0 finite control set",
        (nu == 0).then(|| "control set is empty".to_string()),
        &format!("{nu} controls"),
    ));

    checks.push(check(
        "H1 bounded velocity",
        samples().find_map(|(t, i, u)| {
            let s = norm(sys.velocity(t, grid.node(i), u));
            (s > b.kappa * (1.0 + REL_TOL)).then(|| format!("|k(t={t}, node {i}, u={u})| = {s} > kappa = {}", b.kappa))
        }),
        &format!("|k| <= {}", b.kappa),
    ));

    checks.push(check(
        "H2 Lipschitz velocity",
        samples().find_map(|(t, i, u)| {
            let k0 = sys.velocity(t, grid.node(i), u);
            let kt = sys.velocity(t + dt, grid.node(i), u);
            let dk = norm([kt[0] - k0[0], kt[1] - k0[1]]);
            if dk > b.lip_velocity * dt * (1.0 + REL_TOL) + 1e-12 {
                return Some(format!("k jumps by {dk} over dt at t={t}, node {i}, u={u}"));
            }
            grid.neighbors(i).into_iter().find_map(|j| {
                let kj = sys.velocity(t, grid.node(j), u);
                let dk = norm([kj[0] - k0[0], kj[1] - k0[1]]);
                let dx = grid.distance(i, j);
                (dk > b.lip_velocity * dx * (1.0 + REL_TOL) + 1e-12)
                    .then(|| format!("k varies by {dk} between nodes {i} and {j} at t={t}, u={u}"))
            })
        }),
        &format!("C = {}", b.lip_velocity),
    ));

    let dirs = sample_directions(grid.dim());
    let cone_violation = if b.alpha <= 0.0 {
        Some(format!("cone constant alpha = {} is not positive", b.alpha))
    } else {
        xs.iter().flat_map(|&i| ts.iter().map(move |&t| (t, i))).find_map(|(t, i)| {
            dirs.iter().find_map(|v| {
                let best = (0..nu)
                    .map(|u| {
                        let k = sys.velocity(t, grid.node(i), u);
                        k[0] * v[0] + k[1] * v[1]
                    })
                    .fold(f64::INFINITY, f64::min);
                (best > -b.alpha + 1e-12)
                    .then(|| format!("no control with k.v <= -alpha at t={t}, node {i}, v=({}, {})", v[0], v[1]))
            })
        })
    };
    checks.push(check("H3 inward cone", cone_violation, &format!("alpha = {}", b.alpha)));

    let h4 = if b.beta2 < 0.0 || b.beta1 < b.beta2 {
        Some(format!("inconsistent bounds beta2 = {}, beta1 = {}", b.beta2, b.beta1))
    } else {
        samples().find_map(|(t, i, u)| {
            let l = sys.running_cost(t, grid.node(i), u);
            let slack = REL_TOL * (1.0 + b.beta1.abs());
            (l < b.beta2 - slack || l > b.beta1 + slack)
                .then(|| format!("L(t={t}, node {i}, u={u}) = {l} outside [{}, {}]", b.beta2, b.beta1))
        })
    };
    checks.push(check("H4 Lagrangian bounds", h4, &format!("{} <= L <= {}", b.beta2, b.beta1)));

    checks.push(check(
        "H5 Lipschitz Lagrangian",
        samples().find_map(|(t, i, u)| {
            let l0 = sys.running_cost(t, grid.node(i), u);
            grid.neighbors(i).into_iter().find_map(|j| {
                let dl = (sys.running_cost(t, grid.node(j), u) - l0).abs();
                (dl > b.lip_cost * grid.distance(i, j) * (1.0 + REL_TOL) + 1e-12)
                    .then(|| format!("L varies by {dl} between nodes {i} and {j} at t={t}"))
            })
        }),
        &format!("C = {}", b.lip_cost),
    ));

    checks.push(skipped(
        "H6 convex velocity-cost set",
        "finite control set; the discrete scheme realises convex combinations by switching",
    ));

    checks.push(check(
        "H9 autonomous velocity",
        samples().find_map(|(t, i, u)| {
            let x = grid.node(i);
            let (a, c) = (sys.velocity(t, x, u), sys.velocity(t + 0.5 * horizon + dt, x, u));
            (dist(a, c) > 1e-12).then(|| format!("k depends on t at node {i}, u={u}"))
        }),
        "k independent of t",
    ));

    checks.push(match dynamics.monotonicity {
        Monotonicity::None => skipped("H10 monotone running cost", "no monotonicity declared"),
        m => {
            let sign = if m == Monotonicity::Increasing { 1.0 } else { -1.0 };
            check(
                "H10 monotone running cost",
                samples().find_map(|(t, i, u)| {
                    let d = sys.cost_time_derivative(t, grid.node(i), u);
                    (sign * d <= 0.0).then(|| format!("dL/dt = {d} at t={t}, node {i}, u={u} contradicts {m:?}"))
                }),
                &format!("{m:?}"),
            )
        }
    });

    let (mp, mm) = (spec.mu_plus.total(), spec.mu_minus.total());
    let balance = if spec.tariffs.exporters().is_empty() && mp > mm * (1.0 + REL_TOL) + 1e-15 {
        Some(format!("mu_plus mass {mp} exceeds mu_minus mass {mm} and no export is allowed"))
    } else if spec.tariffs.importers().is_empty() && mm > mp * (1.0 + REL_TOL) + 1e-15 {
        Some(format!("mu_minus mass {mm} exceeds mu_plus mass {mp} and no import is allowed"))
    } else {
        None
    };
    checks.push(check("mass balance", balance, "feasible"));

    checks.push(match cost {
        None => skipped("no-arbitrage", "deferred until the cost matrix is available"),
        Some(c) => check("no-arbitrage", no_arbitrage_violation(spec, c).map(|v| v.1), "holds on all reserve pairs"),
    });

    ValidationReport { checks }
}

/// Worst reserve pair with `ψ⁻(y) − ψ⁺(x) > c(x, y)`, as `((x, y, excess), message)`.
pub(crate) fn no_arbitrage_violation(spec: &ProblemSpec, cost: &CostMatrix) -> Option<((usize, usize, f64), String)> {
    let t = &spec.tariffs;
    let mut worst: Option<(usize, usize, f64)> = None;
    for x in t.importers() {
        let pp = t.import(x).unwrap_or(f64::INFINITY);
        for y in t.exporters() {
            let pm = t.export(y).unwrap_or(f64::NEG_INFINITY);
            let excess = pm - pp - cost.cost(x, y);
            if excess > 1e-12 * (1.0 + pm.abs() + pp.abs()) && worst.is_none_or(|w| excess > w.2) {
                worst = Some((x, y, excess));
            }
        }
    }
    worst.map(|(x, y, e)| {
        ((x, y, e), format!("psi_minus({y}) - psi_plus({x}) = {} > c = {}", e + cost.cost(x, y), cost.cost(x, y)))
    })
}
