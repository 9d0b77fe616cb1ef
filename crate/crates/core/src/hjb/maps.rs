use rayon::prelude::*;

use super::flow::{hamiltonian, hamiltonian_flow, FlowDirection, FlowSample, FlowTrajectory, StopReason};
use super::value::{free_boundary, ValueField};
use crate::model::{Grid, Point, ProblemSpec};
use crate::transport::TransportPlan;
use crate::Result;

/// Finite-difference gradient of a nodal field: centred at interior nodes,
/// one-sided at reserve and boundary nodes. `None` at a kink, i.e. where the
/// two one-sided slopes differ by more than `√h`.
pub fn node_gradient(grid: &Grid, field: &[f64], i: usize) -> Option<Point> {
    let mut g = [0.0; 2];
    for (axis, ga) in g.iter_mut().enumerate().take(grid.dim()) {
        let h = grid.axis_spacing(axis);
        let fwd = grid.step_node(i, axis, 1).map(|j| (field[j] - field[i]) / h);
        let bwd = grid.step_node(i, axis, -1).map(|j| (field[i] - field[j]) / h);
        if let (Some(b), Some(f)) = (bwd, fwd) {
            if (f - b).abs() > h.sqrt() {
                return None;
            }
        }
        *ga = node_gradient_axis(grid, field, i, axis);
    }
    Some(g)
}

/// Candidate gradients at node `i`. On a kinked axis these are the slopes one
/// cell out on each side, since a discrete kink is spread over two cells and
/// the slopes at `i` mix both branches; near the edge of the grid the slope
/// at `i` stands in. Other axes take the `node_gradient` value.
pub fn one_sided_gradients(grid: &Grid, field: &[f64], i: usize) -> Vec<Point> {
    let mut out = vec![[0.0; 2]];
    for axis in 0..grid.dim() {
        let h = grid.axis_spacing(axis);
        let fwd = grid.step_node(i, axis, 1).map(|j| (field[j] - field[i]) / h);
        let bwd = grid.step_node(i, axis, -1).map(|j| (field[i] - field[j]) / h);
        let choices = match (bwd, fwd) {
            (Some(b), Some(f)) if (f - b).abs() > h.sqrt() => {
                let outer = |dir: i64| {
                    let a = grid.step_node(i, axis, dir)?;
                    let o = grid.step_node(a, axis, dir)?;
                    Some((field[a] - field[o]) / h * -(dir as f64))
                };
                vec![outer(-1).unwrap_or(b), outer(1).unwrap_or(f)]
            }
            _ => {
vec![node_gradient_axis(grid, field, i, axis)]
            }
        };
        out = out
            .into_iter()
            .flat_map(|g| {
                choices.iter().map(move |&c| {
                    let mut g = g;
                    g[axis] = c;
                    g
                })
            })
            .collect();
    }
    out
}

fn node_gradient_axis(grid: &Grid, field: &[f64], i: usize, axis: usize) -> f64 {
    let h = grid.axis_spacing(axis);
    let fwd = grid.step_node(i, axis, 1).map(|j| (field[j] - field[i]) / h);
    let bwd = grid.step_node(i, axis, -1).map(|j| (field[i] - field[j]) / h);
    match (bwd, fwd) {
        (Some(b), Some(f)) => {
            if grid.is_reserve(i) {
                if grid.step_node(i, axis, -1).is_some_and(|j| grid.is_reserve(j)) {
                    f
                } else {
                    b
                }
            } else {
                0.5 * (f + b)
            }
        }
        (Some(b), None) => b,
        (None, Some(f)) => f,
        (None, None) => 0.0,
    }
}

/// `φ⁻` at the snapped end minus the running cost along the flow
/// (trapezoid over the samples).
fn realized_value(flow: &FlowTrajectory, node: usize, phi_minus: &[f64], spec: &ProblemSpec) -> f64 {
    let d = &spec.dynamics;
    let l = |s: &FlowSample| d.running_cost(s.t, s.x, hamiltonian(s.t, s.x, s.p, d).control);
    let cost: f64 = flow.samples.windows(2).map(|w| 0.5 * (w[1].t - w[0].t) * (l(&w[0]) + l(&w[1]))).sum();
    phi_minus[node] - cost
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapEntry {
    /// Node nearest the flow's end point.
    pub node: usize,
    /// Stop time (forward) or the seed's free-boundary time (reverse).
    pub time: f64,
    pub flow: FlowTrajectory,
}

impl MapEntry {
    pub fn reason(&self) -> StopReason {
        self.flow.stop_reason
    }
}

/// `T⁺` on the support of `μ⁺` and `T⁻` on the support of `μ⁻`; seeds where
/// the gradient is unavailable are listed in `skipped_*`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportMaps {
    pub t_plus: Vec<Option<MapEntry>>,
    pub t_minus: Vec<Option<MapEntry>>,
    pub skipped_plus: Vec<usize>,
    pub skipped_minus: Vec<usize>,
}

impl TransportMaps {
    /// Whether `T⁺(x)` ends on the interior (`ii`) rather than a reserve node (`ib`).
    pub fn is_interior_plus(&self, grid: &Grid, x: usize) -> Option<bool> {
        self.t_plus[x].as_ref().map(|e| !grid.is_reserve(e.node))
    }

    /// Flows stopped by transversality, with `|H|` at their stop.
    pub fn transversality_residuals(&self) -> Vec<f64> {
        self.t_plus
            .iter()
            .flatten()
            .filter(|e| e.reason() == StopReason::Transversality)
            .map(|e| e.flow.final_h.abs())
            .collect()
    }

    /// Largest `|T⁻(T⁺(x)) − x|` over seeds where both maps are defined.
    pub fn round_trip_defect(&self, grid: &Grid) -> Option<f64> {
        let mut worst: Option<f64> = None;
        for (x, e) in self.t_plus.iter().enumerate() {
            if let Some(back) = e.as_ref().and_then(|e| self.t_minus[e.node].as_ref()) {
                let d = grid.distance(back.node, x);
                worst = Some(worst.map_or(d, |w: f64| w.max(d)));
            }
        }
        worst
    }

    /// Mass of plan pairs `(x, y)` with `x ∈ supp μ⁺` and `|T⁺(x) − y| ≤ tol`,
    /// and the total mass of such pairs. Skipped seeds count as misses.
    pub fn plan_agreement(&self, plan: &TransportPlan, spec: &ProblemSpec, tol: f64) -> (f64, f64) {
        let (mut hit, mut total) = (0.0, 0.0);
        for &(x, y, m) in &plan.pi {
            if spec.mu_plus.weight(x) == 0.0 {
                continue;
            }
            total += m;
            if self.t_plus[x].as_ref().is_some_and(|e| spec.grid.distance(e.node, y) <= tol + 1e-12) {
                hit += m;
            }
        }
        (hit, total)
    }
}

/// Builds `T⁺` from forward flows seeded with `∇J(0, ·)` and `T⁻` from
/// reverse flows seeded at `(τ⁻¹(y), y)` with `∇φ⁻(y)`.
pub fn transport_maps(field: &ValueField, phi_minus: &[f64], spec: &ProblemSpec) -> Result<TransportMaps> {
    let grid = &spec.grid;
    let n = grid.len();
    let j0 = field.layer(0);
    let fb = free_boundary(field, spec.dynamics.monotonicity)?;

    let plus: Vec<(usize, Result<Option<MapEntry>>)> = spec
        .mu_plus
        .support()
        .into_par_iter()
        .map(|x| {
            let entry = |p: Point| {
                hamiltonian_flow(grid.node(x), p, spec, FlowDirection::Forward, 0.0).map(|flow| {
                    let end = flow.end();
                    grid.snap(end.x).map(|node| MapEntry { node, time: flow.stop_time, flow })
                })
            };
            let r = match node_gradient(grid, j0, x) {
                Some(p) => entry(p),
                None => {
                    // kink of J(0, ·): keep the one-sided flow worth the most
                    let mut best: Option<(f64, MapEntry)> = None;
                    for p in one_sided_gradients(grid, j0, x) {
                        if let Ok(Some(e)) = entry(p) {
                            let v = realized_value(&e.flow, e.node, phi_minus, spec);
                            if best.as_ref().is_none_or(|b| v > b.0) {
                                best = Some((v, e));
                            }
                        }
                    }
                    Ok(best.map(|b| b.1))
                }
            };
            (x, r)
        })
        .collect();
    let minus: Vec<(usize, Result<Option<MapEntry>>)> = spec
        .mu_minus
        .support()
        .into_par_iter()
        .map(|y| {
            let r = match (fb.tau_inv(y), node_gradient(grid, phi_minus, y)) {
                (Some(tau), Some(p)) => {
                    hamiltonian_flow(grid.node(y), p, spec, FlowDirection::Reverse, tau).map(|flow| {
                        let end = flow.end();
                        grid.snap(end.x).map(|node| MapEntry { node, time: tau, flow })
                    })
                }
                _ => Ok(None),
            };
            (y, r)
        })
        .collect();

    let mut maps =
        TransportMaps { t_plus: vec![None; n], t_minus: vec![None; n], skipped_plus: vec![], skipped_minus: vec![] };
    for (x, r) in plus {
        match r? {
            Some(e) => maps.t_plus[x] = Some(e),
            None => maps.skipped_plus.push(x),
        }
    }
    for (y, r) in minus {
        match r? {
            Some(e) => maps.t_minus[y] = Some(e),
            None => maps.skipped_minus.push(y),
        }
    }
    Ok(maps)
}
