use crate::model::ProblemSpec;
use crate::Result;

pub(crate) const NO_ARC: u32 = u32::MAX;

/// Layered graph over `(layer, node)`: control `u` at node `v` in layer `l`
/// leads to the node nearest `v + k·dt` in layer `l + 1`, at weight `L·dt`.
///
/// Transition and weight tables are stored once when the corresponding map
/// does not depend on time, and per layer otherwise.
#[derive(Debug, Clone)]
pub struct TimeExpandedGraph {
    nodes: usize,
    controls: usize,
    steps: usize,
    dt: f64,
    moves: Vec<u32>,
    moves_vary: bool,
    weights: Vec<f64>,
    weights_vary: bool,
    min_weight: Vec<f64>,
}

impl TimeExpandedGraph {
    pub fn build(spec: &ProblemSpec) -> Result<TimeExpandedGraph> {
        let steps = spec.time_steps()?;
        Ok(Self::with_steps(spec, steps))
    }

    pub fn with_steps(spec: &ProblemSpec, steps: usize) -> TimeExpandedGraph {
        let grid = &spec.grid;
        let sys = spec.dynamics.system.as_ref();
        let (n, nc, dt) = (grid.len(), sys.num_controls(), spec.dt());
        let moves_vary = sys.velocity_depends_on_time();
        let weights_vary = sys.cost_depends_on_time();
        let mut moves = Vec::with_capacity(n * nc * if moves_vary { steps } else { 1 });
        for l in 0..if moves_vary { steps } else { 1 } {
            let t = l as f64 * dt;
            for v in 0..n {
                let x = grid.node(v);
                for u in 0..nc {
                    let k = sys.velocity(t, x, u);
                    let target = grid.snap([x[0] + k[0] * dt, x[1] + k[1] * dt]);
                    moves.push(target.map_or(NO_ARC, |w| w as u32));
                }
            }
        }
        let mut weights = Vec::with_capacity(n * nc * if weights_vary { steps } else { 1 });
        for l in 0..if weights_vary { steps } else { 1 } {
            let t = l as f64 * dt;
            for v in 0..n {
                let x = grid.node(v);
                for u in 0..nc {
                    weights.push(sys.running_cost(t, x, u) * dt);
                }
            }
        }
        let layer_min = |l: usize| {
            let off = if weights_vary { l * n * nc } else { 0 };
            weights[off..off + n * nc].iter().copied().fold(f64::INFINITY, f64::min)
        };
        let min_weight = (0..steps).map(layer_min).collect();
        TimeExpandedGraph { nodes: n, controls: nc, steps, dt, moves, moves_vary, weights, weights_vary, min_weight }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn controls(&self) -> usize {
        self.controls
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn is_autonomous(&self) -> bool {
        !self.moves_vary && !self.weights_vary
    }

    /// Target of control `u` at node `v` in layer `layer`, if it stays on the grid.
    #[inline]
    pub fn target(&self, layer: usize, v: usize, u: usize) -> Option<usize> {
        let off = if self.moves_vary { layer * self.nodes * self.controls } else { 0 };
        let w = self.moves[off + v * self.controls + u];
        (w != NO_ARC).then_some(w as usize)
    }

    #[inline]
    pub fn weight(&self, layer: usize, v: usize, u: usize) -> f64 {
        let off = if self.weights_vary { layer * self.nodes * self.controls } else { 0 };
        self.weights[off + v * self.controls + u]
    }

    pub(crate) fn min_weight(&self, layer: usize) -> f64 {
        self.min_weight[layer]
    }
}
