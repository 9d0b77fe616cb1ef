use rayon::prelude::*;

use crate::cost::TimeExpandedGraph;
use crate::model::{Monotonicity, ProblemSpec};
use crate::{Error, Result};

/// Contact tolerance between `J` and the obstacle.
pub const CONTACT_TOL: f64 = 1e-10;

/// `J(l, x)` for layers `0..=steps`, stored layer by layer.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueField {
    pub dt: f64,
    pub steps: usize,
    pub nodes: usize,
    pub j: Vec<f64>,
    pub obstacle: Vec<f64>,
}

impl ValueField {
    pub fn value(&self, layer: usize, x: usize) -> f64 {
        self.j[layer * self.nodes + x]
    }

    pub fn layer(&self, layer: usize) -> &[f64] {
        &self.j[layer * self.nodes..(layer + 1) * self.nodes]
    }

    pub fn time(&self, layer: usize) -> f64 {
        layer as f64 * self.dt
    }

    /// `min_t J(t, ·)`. With a finite horizon `J(T, ·)` is the obstacle and
    /// `J ≥ φ⁻`, so this returns the obstacle itself.
    pub fn tightened_obstacle(&self) -> Vec<f64> {
        (0..self.nodes).map(|x| (0..=self.steps).map(|l| self.value(l, x)).fold(f64::INFINITY, f64::min)).collect()
    }

    /// Largest `φ⁻ − J` (should be ≤ 0).
    pub fn obstacle_violation(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for l in 0..=self.steps {
            for (x, &o) in self.obstacle.iter().enumerate() {
                worst = worst.max(o - self.value(l, x));
            }
        }
        worst
    }

    /// Largest deviation from `J(l,x) = max(φ⁻(x), max_u J(l+1, x_u) − L·dt)`.
    pub fn bellman_defect(&self, graph: &TimeExpandedGraph) -> f64 {
        let mut worst = 0.0f64;
        for l in 0..self.steps {
            for x in 0..self.nodes {
                let rhs = bellman(graph, l, x, self.obstacle[x], self.layer(l + 1));
                worst = worst.max((self.value(l, x) - rhs).abs());
            }
        }
        worst
    }

    /// Largest violation of time monotonicity over layers `0..=last`:
    /// `J(·, x)` non-increasing when `∂ₜL > 0`, non-decreasing when `∂ₜL < 0`.
    pub fn monotonicity_violation(&self, mono: Monotonicity, last: usize) -> Result<f64> {
        let sign = match mono {
            Monotonicity::Increasing => 1.0,
            Monotonicity::Decreasing => -1.0,
            Monotonicity::None => return Err(Error::Unsupported("running cost is not monotone in time".into())),
        };
        let mut worst = 0.0f64;
        for l in 0..last.min(self.steps) {
            for x in 0..self.nodes {
                worst = worst.max(sign * (self.value(l + 1, x) - self.value(l, x)));
            }
        }
        Ok(worst)
    }
}

fn bellman(graph: &TimeExpandedGraph, l: usize, x: usize, obstacle: f64, next: &[f64]) -> f64 {
    let mut best = obstacle;
    for u in 0..graph.controls() {
        if let Some(w) = graph.target(l, x, u) {
            best = best.max(next[w] - graph.weight(l, x, u));
        }
    }
    best
}

/// Backward induction from `J(T, ·) = φ⁻` on the spec's time-expanded graph.
pub fn solve_value_function(phi_minus: &[f64], spec: &ProblemSpec) -> Result<ValueField> {
    let graph = TimeExpandedGraph::build(spec)?;
    Ok(value_on_graph(phi_minus, &graph))
}

/// Same as [`solve_value_function`] on an existing graph, e.g. the one of a
/// cost matrix, so both share the horizon.
pub fn value_on_graph(phi_minus: &[f64], graph: &TimeExpandedGraph) -> ValueField {
    let n = graph.nodes();
    let steps = graph.steps();
    let mut j = vec![0.0; (steps + 1) * n];
    j[steps * n..].copy_from_slice(phi_minus);
    for l in (0..steps).rev() {
        let (head, tail) = j.split_at_mut((l + 1) * n);
        let next = &tail[..n];
        head[l * n..].par_iter_mut().enumerate().for_each(|(x, v)| *v = bellman(graph, l, x, phi_minus[x], next));
    }
    ValueField { dt: graph.dt(), steps, nodes: n, j, obstacle: phi_minus.to_vec() }
}

/// Value field for the obstacle `min_t J(t, ·)` when `tighten` is set; the
/// replacement is applied once.
pub fn solve_value_function_with(phi_minus: &[f64], graph: &TimeExpandedGraph, tighten: bool) -> ValueField {
    let field = value_on_graph(phi_minus, graph);
    if tighten {
        value_on_graph(&field.tightened_obstacle(), graph)
    } else {
        field
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// First contact time, for `∂ₜL > 0`.
    Inf,
    /// Last time of the contact run starting at `t = 0`, for `∂ₜL < 0`.
    Sup,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeBoundary {
    pub kind: BoundaryKind,
    /// Contact layer per node; `None` when the sup-type run is empty.
    pub layer: Vec<Option<usize>>,
    pub dt: f64,
}

impl FreeBoundary {
    pub fn tau_inv(&self, y: usize) -> Option<f64> {
        self.layer[y].map(|l| l as f64 * self.dt)
    }
}

/// The sup-type boundary ignores the contact at `T`, which only reflects the
/// terminal condition `J(T, ·) = φ⁻` of the truncated horizon.
pub fn free_boundary(field: &ValueField, mono: Monotonicity) -> Result<FreeBoundary> {
    let touches = |l: usize, y: usize| field.value(l, y) - field.obstacle[y] <= CONTACT_TOL;
    let (kind, layer) = match mono {
        Monotonicity::Increasing => {
            (BoundaryKind::Inf, (0..field.nodes).map(|y| (0..=field.steps).find(|&l| touches(l, y))).collect())
        }
        Monotonicity::Decreasing => (
            BoundaryKind::Sup,
            (0..field.nodes)
                .map(|y| {
                    if !touches(0, y) {
                        return None;
                    }
                    let mut l = 0;
                    while l < field.steps && touches(l + 1, y) {
                        l += 1;
                    }
                    Some(l)
                })
                .collect(),
        ),
        Monotonicity::None => {
            return Err(Error::Unsupported("free boundary needs a running cost monotone in time".into()))
        }
    };
    Ok(FreeBoundary { kind, layer, dt: field.dt })
}

/// `∑ φ⁻ μ⁻ − ∑ J(0, ·) μ⁺` after checking `ψ⁻ ≤ φ⁻` on exporters and
/// `J(0, ·) ≤ ψ⁺` on importers.
pub fn dual_value_eulerian(field: &ValueField, phi_minus: &[f64], spec: &ProblemSpec) -> Result<f64> {
    let j0 = field.layer(0);
    let scale = 1.0 + phi_minus.iter().chain(j0).fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = 1e-9 * scale;
    for y in spec.tariffs.exporters() {
        let p = spec.tariffs.export(y).unwrap_or(f64::NEG_INFINITY);
        if p - phi_minus[y] > tol {
            return Err(Error::CandidateInfeasible(format!(
                "phi_minus({}) = {} is below the export tariff {p}",
                spec.grid.label(y),
                phi_minus[y]
            )));
        }
    }
    for x in spec.tariffs.importers() {
        let p = spec.tariffs.import(x).unwrap_or(f64::INFINITY);
        if j0[x] - p > tol {
            return Err(Error::CandidateInfeasible(format!(
                "J(0, {}) = {} exceeds the import tariff {p}",
                spec.grid.label(x),
                j0[x]
            )));
        }
    }
    let a: f64 = spec.mu_minus.support().iter().map(|&y| phi_minus[y] * spec.mu_minus.weight(y)).sum();
    let b: f64 = spec.mu_plus.support().iter().map(|&x| j0[x] * spec.mu_plus.weight(x)).sum();
    Ok(a - b)
}
