//! Eulerian description of a plan: a density process `ρ` over (time, node,
//! control) and a stopping distribution `η` over (time, node).
//!
//! `ρ` holds moving mass only: an atom following a trajectory with stop layer
//! `m` sits at `(l, γ_l, u_l)` for `l < m`, and `η` receives it at `(m, γ_m)`.
//! Mass that does not move goes straight into `η` at layer 0.

mod basis;

use std::collections::BTreeMap;

use rayon::prelude::*;

pub use basis::{space_time_basis, spatial_basis, TestFunction};

use crate::cost::CostMatrix;
use crate::model::ProblemSpec;
use crate::transport::PlanDecomposition;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EulerianPair {
    pub dt: f64,
    /// `rho[l]` maps `(node, control)` to the mass moving on `[l·dt, (l+1)·dt)`.
    pub rho: Vec<BTreeMap<(usize, usize), f64>>,
    /// `(layer, node)` → stopped mass.
    pub eta: BTreeMap<(usize, usize), f64>,
    /// Imported mass per node.
    pub chi_plus: Vec<f64>,
    /// Exported mass per node.
    pub chi_minus: Vec<f64>,
}

impl EulerianPair {
    /// `μ⁺ + χ⁺`, the total starting mass.
    pub fn initial_mass(&self, spec: &ProblemSpec) -> f64 {
        spec.mu_plus.total() + self.chi_plus.iter().sum::<f64>()
    }

    pub fn layer_mass(&self, l: usize) -> f64 {
        self.rho.get(l).map_or(0.0, |m| m.values().sum())
    }

    pub fn eta_mass(&self) -> f64 {
        self.eta.values().sum()
    }

    /// Largest `|mass(ρ_l) − (initial − η(layers ≤ l))|` over all layers.
    pub fn conservation_defect(&self, spec: &ProblemSpec) -> f64 {
        let initial = self.initial_mass(spec);
        let last = self.eta.keys().map(|k| k.0).max().unwrap_or(0).max(self.rho.len());
        let mut stopped = vec![0.0; last + 1];
        for (&(l, _), &m) in &self.eta {
            stopped[l] += m;
        }
        let mut cumulative = 0.0;
        let mut worst = 0.0f64;
        for (l, s) in stopped.iter().enumerate() {
            cumulative += s;
            worst = worst.max((self.layer_mass(l) - (initial - cumulative)).abs());
        }
        worst
    }

    /// `∑ L·dt·ρ + ∑ ψ⁺ χ⁺ − ∑ ψ⁻ χ⁻`, with the same per-step weights as the
    /// cost graph.
    pub fn objective(&self, cost: &CostMatrix, spec: &ProblemSpec) -> f64 {
        let g = cost.graph();
        let mut total = 0.0;
        for (l, layer) in self.rho.iter().enumerate() {
            for (&(v, u), &m) in layer {
                total += g.weight(l, v, u) * m;
            }
        }
        for (i, &m) in self.chi_plus.iter().enumerate() {
            if m > 0.0 {
                total += spec.tariffs.import(i).unwrap_or(f64::NAN) * m;
            }
        }
        for (i, &m) in self.chi_minus.iter().enumerate() {
            if m > 0.0 {
                total -= spec.tariffs.export(i).unwrap_or(f64::NAN) * m;
            }
        }
        total
    }

    /// Node marginal of the moving mass at layer 0 plus the mass stopped at
    /// layer 0. Equals `μ⁺ + χ⁺` for a lifted plan.
    pub fn start_marginal(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        if let Some(layer) = self.rho.first() {
            for (&(v, _), &m) in layer {
                out[v] += m;
            }
        }
        for (&(l, v), &m) in &self.eta {
            if l == 0 {
                out[v] += m;
            }
        }
        out
    }
}

/// Spreads every atom of the plan along its optimal trajectory. The reserve
/// endpoint of each `ib`/`bi` atom is the one the LP chose, which attains the
/// boundary selector's minimum (ties may differ from the lowest index).
pub fn lift_plan_to_eulerian(d: &PlanDecomposition, cost: &CostMatrix, spec: &ProblemSpec) -> Result<EulerianPair> {
    let n = spec.grid.len();
    let mut by_source: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
    for &(x, y, m) in d.pi_ii.iter().chain(&d.pi_ib).chain(&d.pi_bi) {
        by_source.entry(x).or_default().push((y, m));
    }
    let sources: Vec<(usize, Vec<(usize, f64)>)> = by_source.into_iter().collect();
    let pieces: Vec<Result<Vec<(crate::cost::Trajectory, f64)>>> = sources
        .par_iter()
        .map(|(x, targets)| {
            let ys: Vec<usize> = targets.iter().map(|t| t.0).collect();
            let trs = cost.trajectories_from(*x, &ys)?;
            Ok(trs.into_iter().zip(targets.iter().map(|t| t.1)).collect())
        })
        .collect();

    let steps = cost.graph().steps();
    let mut rho: Vec<BTreeMap<(usize, usize), f64>> = vec![BTreeMap::new(); steps];
    let mut eta = BTreeMap::new();
    for piece in pieces {
        for (tr, m) in piece? {
            for s in &tr.samples {
                match s.control {
                    Some(u) => *rho[s.layer].entry((s.node, u)).or_insert(0.0) += m,
                    None => *eta.entry((s.layer, s.node)).or_insert(0.0) += m,
                }
            }
        }
    }
    while rho.last().is_some_and(|l| l.is_empty()) {
        rho.pop();
    }
    let mut chi_plus = vec![0.0; n];
    for &(x, _, m) in &d.pi_bi {
        chi_plus[x] += m;
    }
    let mut chi_minus = vec![0.0; n];
    for &(_, y, m) in &d.pi_ib {
        chi_minus[y] += m;
    }
    Ok(EulerianPair { dt: cost.dt(), rho, eta, chi_plus, chi_minus })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakResidualReport {
    pub names: Vec<String>,
    pub residuals: Vec<f64>,
    /// Per-function bound on the residual of an exactly lifted pair.
    pub bounds: Vec<f64>,
    /// Mass used for normalisation.
    pub mass: f64,
}

impl WeakResidualReport {
    pub fn max_abs(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a, r| a.max(r.abs()))
    }

    /// `max |residual| / mass` (0 for an empty pair).
    pub fn max_normalized(&self) -> f64 {
        if self.mass > 0.0 {
            self.max_abs() / self.mass
        } else {
            self.max_abs()
        }
    }

    /// Every residual within its bound plus `slack`.
    pub fn within_bounds(&self, slack: f64) -> bool {
        self.residuals.iter().zip(&self.bounds).all(|(r, b)| r.abs() <= b + slack)
    }
}

/// Discrete weak continuity equation
///
/// `∑ ρ·[ξ(t+dt, x+k·dt) − ξ(t, x)] − ∑ ξ dη + ∑ ξ(0,·) d(μ⁺ + χ⁺)`
///
/// for every basis function. Along a trajectory the bracket telescopes except
/// where `x + k·dt` was snapped to a node, so the residual is at most
/// `Lip_x(ξ)·∑ ρ·|x + k·dt − snap|`, which is the reported bound.
pub fn continuity_residual(pair: &EulerianPair, spec: &ProblemSpec) -> WeakResidualReport {
    let grid = &spec.grid;
    let dt = pair.dt;
    let horizon = (pair.rho.len().max(1)) as f64 * dt;
    let horizon = horizon.max(pair.eta.keys().map(|k| k.0).max().unwrap_or(0) as f64 * dt);
    let basis = space_time_basis(grid, horizon);

    // Moving entries with their unsnapped end point.
    let mut moves = Vec::new();
    let mut snap_defect = 0.0;
    for (l, layer) in pair.rho.iter().enumerate() {
        let t = l as f64 * dt;
        for (&(v, u), &m) in layer {
            let x = grid.node(v);
            let k = spec.dynamics.velocity(t, x, u);
            let end = [x[0] + k[0] * dt, x[1] + k[1] * dt];
            if let Some(w) = grid.snap(end) {
                snap_defect += m * crate::model::dist(end, grid.node(w));
            }
            moves.push((t, x, end, m));
        }
    }
    let n = grid.len();
    let mut initial = spec.mu_plus.weights().to_vec();
    for i in 0..n {
        initial[i] += pair.chi_plus[i];
    }
    let (lo, hi) = (grid.lower(), grid.upper());
    let rows: Vec<(f64, f64)> = basis
        .par_iter()
        .map(|f| {
            let mut r = 0.0;
            for &(t, x, end, m) in &moves {
                r += m * (f.value(t + dt, end) - f.value(t, x));
            }
            for (&(l, v), &m) in &pair.eta {
                r -= m * f.value(l as f64 * dt, grid.node(v));
            }
            for (i, &m) in initial.iter().enumerate() {
                if m != 0.0 {
                    r += m * f.value(0.0, grid.node(i));
                }
            }
            (r, f.lip_x(lo, hi, horizon) * snap_defect)
        })
        .collect();
    WeakResidualReport {
        names: basis.iter().map(|f| f.name()).collect(),
        residuals: rows.iter().map(|r| r.0).collect(),
        bounds: rows.iter().map(|r| r.1).collect(),
        mass: pair.initial_mass(spec),
    }
}

/// `∑ ψ dη − ∑ ψ d(μ⁻ + χ⁻)` over the spatial basis, plus one entry per node
/// (`η(·, y) − μ⁻(y) − χ⁻(y)`, named by coordinate) so that the node-level
/// marginal is checked exactly. Bounds are zero.
pub fn stopping_marginal_residual(pair: &EulerianPair, spec: &ProblemSpec) -> WeakResidualReport {
    let grid = &spec.grid;
    let n = grid.len();
    let mut marginal = vec![0.0; n];
    for (&(_, v), &m) in &pair.eta {
        marginal[v] += m;
    }
    let target: Vec<f64> = (0..n).map(|i| spec.mu_minus.weight(i) + pair.chi_minus[i]).collect();
    let mut names = Vec::new();
    let mut residuals = Vec::new();
    for f in spatial_basis(grid) {
        let r: f64 = (0..n).map(|i| (marginal[i] - target[i]) * f.value(0.0, grid.node(i))).sum();
        names.push(f.name());
        residuals.push(r);
    }
    for i in 0..n {
        names.push(format!("node({})", grid.label(i)));
        residuals.push(marginal[i] - target[i]);
    }
    let bounds = vec![0.0; residuals.len()];
    WeakResidualReport { names, residuals, bounds, mass: target.iter().sum() }
}

/// Whether every `η` atom sits at `(τ(x, y), y)` for some plan pair `(x, y)`.
pub fn eta_on_stop_graph(pair: &EulerianPair, d: &PlanDecomposition, cost: &CostMatrix) -> Result<()> {
    for &(l, y) in pair.eta.keys() {
        let ok = d
            .pi_ii
            .iter()
            .chain(&d.pi_ib)
            .chain(&d.pi_bi)
            .any(|&(x, yy, _)| yy == y && cost.tau_steps(x, y) == l);
        if !ok {
            return Err(Error::Invariant(format!("eta atom at layer {l}, node {y} is off the stop graph")));
        }
    }
    Ok(())
}
