//! Primal network simplex for uncapacitated min-cost flow.
//!
//! Follows the classic layout: an artificial root joined to every node, a
//! strongly feasible spanning tree, and a leaving-arc rule that keeps it
//! strongly feasible (no cycling). Tree depths and potentials are recomputed
//! after every pivot, which is O(n) and fine at the sizes used here.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Scan arcs in blocks of about √m and take the best candidate in the
    /// first block that has one.
    #[default]
    BlockSearch,
    /// Lowest-index eligible arc.
    Bland,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dir {
    /// The tree arc points from the node to its parent.
    Up,
    /// The tree arc points from the parent to the node.
    Down,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    nodes: usize,
    source: Vec<usize>,
    target: Vec<usize>,
    cost: Vec<f64>,
    supply: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct FlowSolution {
    pub flow: Vec<f64>,
    /// Node potentials with reduced cost `cost + pi[src] − pi[tgt] ≥ 0`.
    pub potential: Vec<f64>,
    /// Largest flow left on an artificial arc; positive means infeasible.
    pub artificial_flow: f64,
    pub pivots: usize,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> FlowNetwork {
        FlowNetwork { nodes, source: Vec::new(), target: Vec::new(), cost: Vec::new(), supply: vec![0.0; nodes] }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cost: f64) -> usize {
        debug_assert!(cost.is_finite());
        self.source.push(from);
        self.target.push(to);
        self.cost.push(cost);
        self.source.len() - 1
    }

    pub fn set_supply(&mut self, node: usize, supply: f64) {
        self.supply[node] = supply;
    }

    pub fn arcs(&self) -> usize {
        self.source.len()
    }

    pub fn arc(&self, e: usize) -> (usize, usize, f64) {
        (self.source[e], self.target[e], self.cost[e])
    }

    pub fn solve(&self, rule: PivotRule) -> Result<FlowSolution> {
        Simplex::new(self).run(rule)
    }
}

struct Simplex {
    n: usize,
    m: usize,
    root: usize,
    source: Vec<usize>,
    target: Vec<usize>,
    cost: Vec<f64>,
    flow: Vec<f64>,
    in_tree: Vec<bool>,
    parent: Vec<usize>,
    pred: Vec<usize>,
    dir: Vec<Dir>,
    depth: Vec<usize>,
    pi: Vec<f64>,
    stamp: Vec<usize>,
    epoch: usize,
    eps: f64,
    block: usize,
    next_arc: usize,
}

impl Simplex {
    fn new(net: &FlowNetwork) -> Simplex {
        let n = net.nodes;
        let m = net.source.len();
        let root = n;
        let max_cost = net.cost.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        let art = (max_cost + 1.0) * (n as f64 + 1.0);
        let mut source = net.source.clone();
        let mut target = net.target.clone();
        let mut cost = net.cost.clone();
        let mut flow = vec![0.0; m + n];
        let mut dir = vec![Dir::Up; n + 1];
        let mut pi = vec![0.0; n + 1];
        for u in 0..n {
            let e = m + u;
            let s = net.supply[u];
            if s >= 0.0 {
                source.push(u);
                target.push(root);
                cost.push(0.0);
                flow[e] = s;
                dir[u] = Dir::Up;
            } else {
                source.push(root);
                target.push(u);
                cost.push(art);
                flow[e] = -s;
                dir[u] = Dir::Down;
                pi[u] = art;
            }
        }
        let mut in_tree = vec![false; m + n];
        in_tree[m..].fill(true);
        let mut parent = vec![root; n + 1];
        parent[root] = usize::MAX;
        let mut pred: Vec<usize> = (0..n).map(|u| m + u).collect();
        pred.push(usize::MAX);
        let mut depth = vec![1; n + 1];
        depth[root] = 0;
        Simplex {
            n,
            m,
            root,
            source,
            target,
            cost,
            flow,
            in_tree,
            parent,
            pred,
            dir,
            depth,
            pi,
            stamp: vec![0; n + 1],
            epoch: 0,
            eps: 1e-11 * (1.0 + max_cost),
            block: ((m as f64).sqrt().ceil() as usize).max(10),
            next_arc: 0,
        }
    }

    fn reduced_cost(&self, e: usize) -> f64 {
        self.cost[e] + self.pi[self.source[e]] - self.pi[self.target[e]]
    }

    fn entering_block(&mut self) -> Option<usize> {
        if self.m == 0 {
            return None;
        }
        let mut best = -self.eps;
        let mut found = None;
        let mut count = self.block;
        for step in 0..self.m {
            let e = (self.next_arc + step) % self.m;
            if !self.in_tree[e] {
                let rc = self.reduced_cost(e);
                if rc < best {
                    best = rc;
                    found = Some(e);
                }
            }
            count -= 1;
            if count == 0 {
                if found.is_some() {
                    self.next_arc = (e + 1) % self.m;
                    return found;
                }
                count = self.block;
            }
        }
        found
    }

    fn entering_bland(&self) -> Option<usize> {
        (0..self.m).find(|&e| !self.in_tree[e] && self.reduced_cost(e) < -self.eps)
    }

    fn join(&self, mut u: usize, mut v: usize) -> usize {
        while u != v {
            if self.depth[u] > self.depth[v] {
                u = self.parent[u];
            } else if self.depth[v] > self.depth[u] {
                v = self.parent[v];
            } else {
                u = self.parent[u];
                v = self.parent[v];
            }
        }
        u
    }

    fn pivot(&mut self, e_in: usize) -> Result<()> {
        let first = self.source[e_in];
        let second = self.target[e_in];
        let join = self.join(first, second);

        // Flow runs first → second → … → join → … → first.
        let mut delta = f64::INFINITY;
        let mut u_out = usize::MAX;
        let mut on_first = true;
        let mut u = first;
        while u != join {
            if self.dir[u] == Dir::Up {
                let d = self.flow[self.pred[u]];
                if d < delta {
                    delta = d;
                    u_out = u;
                }
            }
            u = self.parent[u];
        }
        let mut u = second;
        while u != join {
            if self.dir[u] == Dir::Down {
                let d = self.flow[self.pred[u]];
                if d <= delta {
                    delta = d;
                    u_out = u;
                    on_first = false;
                }
            }
            u = self.parent[u];
        }
        if u_out == usize::MAX {
            return Err(Error::Invariant("unbounded min-cost flow (negative cycle)".into()));
        }

        if delta > 0.0 {
            self.flow[e_in] += delta;
            let mut u = first;
            while u != join {
                let e = self.pred[u];
                match self.dir[u] {
                    Dir::Up => self.flow[e] -= delta,
                    Dir::Down => self.flow[e] += delta,
                }
                u = self.parent[u];
            }
            let mut u = second;
            while u != join {
                let e = self.pred[u];
                match self.dir[u] {
                    Dir::Up => self.flow[e] += delta,
                    Dir::Down => self.flow[e] -= delta,
                }
                u = self.parent[u];
            }
        }
        let e_out = self.pred[u_out];
        self.flow[e_out] = 0.0;
        self.in_tree[e_out] = false;
        self.in_tree[e_in] = true;

        // Re-hang the subtree below the leaving arc from the entering arc.
        let (u_in, v_in) = if on_first { (first, second) } else { (second, first) };
        let mut w = u_in;
        let mut new_parent = v_in;
        let mut new_pred = e_in;
        let mut new_dir = if self.source[e_in] == u_in { Dir::Up } else { Dir::Down };
        loop {
            let (old_parent, old_pred, old_dir) = (self.parent[w], self.pred[w], self.dir[w]);
            self.parent[w] = new_parent;
            self.pred[w] = new_pred;
            self.dir[w] = new_dir;
            if w == u_out {
                break;
            }
            new_parent = w;
            new_pred = old_pred;
            new_dir = match old_dir {
                Dir::Up => Dir::Down,
                Dir::Down => Dir::Up,
            };
            w = old_parent;
        }
        self.refresh();
        Ok(())
    }

    /// Recomputes depth and potentials from the root down.
    fn refresh(&mut self) {
        self.epoch += 1;
        let epoch = self.epoch;
        self.stamp[self.root] = epoch;
        let mut chain = Vec::new();
        for v in 0..self.n {
            let mut w = v;
            while self.stamp[w] != epoch {
                chain.push(w);
                w = self.parent[w];
            }
            while let Some(w) = chain.pop() {
                let p = self.parent[w];
                let e = self.pred[w];
                self.depth[w] = self.depth[p] + 1;
                self.pi[w] = match self.dir[w] {
                    Dir::Up => self.pi[p] - self.cost[e],
                    Dir::Down => self.pi[p] + self.cost[e],
                };
                self.stamp[w] = epoch;
            }
        }
    }

    fn run(mut self, rule: PivotRule) -> Result<FlowSolution> {
        let limit = 50 * (self.m + self.n) + 1000;
        let mut pivots = 0;
        loop {
            let e = match rule {
                PivotRule::BlockSearch => self.entering_block(),
                PivotRule::Bland => self.entering_bland(),
            };
            let Some(e) = e else { break };
            self.pivot(e)?;
            pivots += 1;
            if pivots > limit {
                return Err(Error::Invariant(format!("network simplex exceeded {limit} pivots")));
            }
        }
        let artificial_flow = self.flow[self.m..].iter().fold(0.0f64, |a, &f| a.max(f));
        let root_pi = self.pi[self.root];
        Ok(FlowSolution {
            flow: self.flow[..self.m].to_vec(),
            potential: self.pi[..self.n].iter().map(|p| p - root_pi).collect(),
            artificial_flow,
            pivots,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn transport(costs: &[[f64; 3]; 3], supply: [f64; 3], demand: [f64; 3], rule: PivotRule) -> (f64, FlowSolution) {
        let mut net = FlowNetwork::new(6);
        for i in 0..3 {
            net.set_supply(i, supply[i]);
            net.set_supply(3 + i, -demand[i]);
            for j in 0..3 {
                net.add_arc(i, 3 + j, costs[i][j]);
            }
        }
        let sol = net.solve(rule).unwrap();
        let obj = (0..net.arcs()).map(|e| net.arc(e).2 * sol.flow[e]).sum();
        (obj, sol)
    }

    #[test]
    fn small_transportation_problem() {
        // optimum: 0→0 (1), 1→2 (1), 2→1 (1) cost 1 + 1 + 1 = 3
        let c = [[1.0, 4.0, 5.0], [3.0, 6.0, 1.0], [4.0, 1.0, 7.0]];
        for rule in [PivotRule::BlockSearch, PivotRule::Bland] {
            let (obj, sol) = transport(&c, [1.0, 1.0, 1.0], [1.0, 1.0, 1.0], rule);
            assert!((obj - 3.0).abs() < 1e-12, "{rule:?}: {obj}");
            assert_eq!(sol.artificial_flow, 0.0);
            // dual feasibility and complementary slackness
            for i in 0..3 {
                for j in 0..3 {
                    let rc = c[i][j] + sol.potential[i] - sol.potential[3 + j];
                    assert!(rc > -1e-9);
                    if sol.flow[i * 3 + j] > 0.0 {
                        assert!(rc.abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn infeasible_shows_artificial_flow() {
        let mut net = FlowNetwork::new(2);
        net.set_supply(0, 1.0);
        net.set_supply(1, -1.0);
        net.add_arc(1, 0, 1.0);
        let sol = net.solve(PivotRule::BlockSearch).unwrap();
        assert!(sol.artificial_flow > 0.5);
    }

    #[test]
    fn degenerate_problem_terminates() {
        let c = [[1.0, 1.0, 1.0], [1.0, 1.0, 1.0], [1.0, 1.0, 1.0]];
        for rule in [PivotRule::BlockSearch, PivotRule::Bland] {
            let (obj, _) = transport(&c, [1.0, 1.0, 1.0], [1.0, 1.0, 1.0], rule);
            assert!((obj - 3.0).abs() < 1e-12);
        }
    }
}
