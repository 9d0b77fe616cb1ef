//! Free end-time control cost `c(x, y)` on a time-expanded graph.
//!
//! `c(x, y)` is the least accumulated `L·dt` over snapped control paths that
//! start at node `x` at time 0 and stop at `y` at any layer up to the horizon.
//! `τ(x, y)` is the earliest layer attaining it.

mod graph;
mod lipschitz;
mod reach;
mod search;

use std::sync::Arc;

use rayon::prelude::*;

pub use graph::TimeExpandedGraph;
pub use lipschitz::{check_lipschitz, LipschitzReport};
pub use reach::{default_delta, reach_coefficient, reach_time_bound, theta};

use crate::model::ProblemSpec;
use crate::{Error, Result};
use graph::NO_ARC;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Spatial Dijkstra when the dynamics are autonomous, layered otherwise.
    Auto,
    Layered,
}

/// Dense cost and stop-time matrices. Predecessor tables are regenerated per
/// source on demand from the shared graph, which is deterministic.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    n: usize,
    c: Vec<f64>,
    arrival: Vec<u32>,
    graph: Arc<TimeExpandedGraph>,
    mode: SearchMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub layer: usize,
    pub t: f64,
    pub node: usize,
    /// Control applied on `[t, t + dt)`; `None` on the final (stopping) sample.
    pub control: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub stop_layer: usize,
    pub stop_time: f64,
}

impl Trajectory {
    pub fn start(&self) -> usize {
        self.samples[0].node
    }

    pub fn end(&self) -> usize {
        self.samples[self.samples.len() - 1].node
    }

    /// Number of moves.
    pub fn len(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Accumulated `L·dt`, summed in path order.
    pub fn cost(&self, graph: &TimeExpandedGraph) -> f64 {
        self.samples
            .iter()
            .filter_map(|s| s.control.map(|u| graph.weight(s.layer, s.node, u)))
            .fold(0.0, |acc, w| acc + w)
    }
}

pub fn compute_cost_matrix(spec: &ProblemSpec) -> Result<CostMatrix> {
    compute_cost_matrix_with(spec, SearchMode::Auto)
}

pub fn compute_cost_matrix_with(spec: &ProblemSpec, mode: SearchMode) -> Result<CostMatrix> {
    let graph = Arc::new(TimeExpandedGraph::build(spec)?);
    CostMatrix::from_graph(graph, mode)
}

impl CostMatrix {
    pub fn from_graph(graph: Arc<TimeExpandedGraph>, mode: SearchMode) -> Result<CostMatrix> {
        let n = graph.nodes();
        let force = mode == SearchMode::Layered;
        let rows: Vec<_> = (0..n)
            .into_par_iter()
            .map(|x| {
                let s = search::search(&graph, x, 0, false, force);
                (s.best, s.arrival)
            })
            .collect();
        let mut c = Vec::with_capacity(n * n);
        let mut arrival = Vec::with_capacity(n * n);
        for (x, (best, arr)) in rows.into_iter().enumerate() {
            if let Some(y) = arr.iter().position(|&a| a == NO_ARC) {
                return Err(Error::Unreachable { from: x, to: y });
            }
            c.extend(best);
            arrival.extend(arr);
        }
        Ok(CostMatrix { n, c, arrival, graph, mode })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn cost(&self, x: usize, y: usize) -> f64 {
        self.c[x * self.n + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.c[x * self.n..(x + 1) * self.n]
    }

    pub fn tau_steps(&self, x: usize, y: usize) -> usize {
        self.arrival[x * self.n + y] as usize
    }

    pub fn tau(&self, x: usize, y: usize) -> f64 {
        self.tau_steps(x, y) as f64 * self.graph.dt()
    }

    pub fn graph(&self) -> &TimeExpandedGraph {
        &self.graph
    }

    pub fn dt(&self) -> f64 {
        self.graph.dt()
    }

    /// Costs from `x` when departing at layer `start` instead of 0.
    pub fn shifted_row(&self, x: usize, start: usize) -> Vec<f64> {
        search::search(&self.graph, x, start, false, self.mode == SearchMode::Layered).best
    }

    /// Optimal trajectories from `x` to each of `targets`, sharing one search.
    pub fn trajectories_from(&self, x: usize, targets: &[usize]) -> Result<Vec<Trajectory>> {
        let s = search::search(&self.graph, x, 0, true, self.mode == SearchMode::Layered);
        let dt = self.graph.dt();
        targets
            .iter()
            .map(|&y| {
                let path = s.path(&self.graph, y).ok_or(Error::Unreachable { from: x, to: y })?;
                let stop_layer = path[path.len() - 1].0;
                let samples = path
                    .into_iter()
                    .map(|(layer, node, control)| TrajectorySample { layer, t: layer as f64 * dt, node, control })
                    .collect();
                Ok(Trajectory { samples, stop_layer, stop_time: stop_layer as f64 * dt })
            })
            .collect()
    }
}

/// Reconstructs `(γ, u, τ)` for the pair `(x, y)`: the concrete selector.
pub fn optimal_trajectory(cost: &CostMatrix, x: usize, y: usize) -> Result<Trajectory> {
    Ok(cost.trajectories_from(x, &[y])?.remove(0))
}
