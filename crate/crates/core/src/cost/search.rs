use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::graph::{TimeExpandedGraph, NO_ARC};

/// Shortest paths from one source, started at a given layer.
#[derive(Debug, Clone)]
pub(crate) struct SourceSearch {
    pub source: usize,
    pub start: usize,
    /// Minimal cost over all arrival layers.
    pub best: Vec<f64>,
    /// Earliest layer attaining `best`, or `NO_ARC` when unreached.
    pub arrival: Vec<u32>,
    preds: Preds,
}

#[derive(Debug, Clone)]
enum Preds {
    None,
    /// `(layer − start)·n + node → v·nc + u`
    Layered(Vec<u32>),
    /// `node → v·nc + u`
    Spatial(Vec<u32>),
}

impl SourceSearch {
    /// `(layer, node, control)` steps from the source to `y`, ending with the
    /// arrival sample (control `None`). Requires predecessor tables.
    pub fn path(&self, g: &TimeExpandedGraph, y: usize) -> Option<Vec<(usize, usize, Option<usize>)>> {
        let arr = self.arrival[y];
        if arr == NO_ARC {
            return None;
        }
        let (n, nc) = (g.nodes(), g.controls());
        let mut rev = vec![(arr as usize, y, None)];
        let mut node = y;
        let mut layer = arr as usize;
        while layer > self.start {
            let code = match &self.preds {
                Preds::Layered(p) => p[(layer - self.start) * n + node],
                Preds::Spatial(p) => p[node],
                Preds::None => return None,
            };
            debug_assert_ne!(code, NO_ARC);
            let (v, u) = (code as usize / nc, code as usize % nc);
            layer -= 1;
            rev.push((layer, v, Some(u)));
            node = v;
        }
        debug_assert_eq!(node, self.source);
        rev.reverse();
        Some(rev)
    }
}

/// Layer-by-layer dynamic programme. Relaxation visits nodes and controls in
/// increasing index and only accepts strict improvements, so ties resolve to
/// the lowest (node, control); the recorded arrival is the earliest layer
/// attaining the minimum.
pub(crate) fn layered(g: &TimeExpandedGraph, source: usize, start: usize, keep_preds: bool) -> SourceSearch {
    let (n, nc, steps) = (g.nodes(), g.controls(), g.steps());
    let mut cur = vec![f64::INFINITY; n];
    let mut next = vec![f64::INFINITY; n];
    let mut best = vec![f64::INFINITY; n];
    let mut arrival = vec![NO_ARC; n];
    cur[source] = 0.0;
    best[source] = 0.0;
    arrival[source] = start as u32;
    let mut preds = if keep_preds { vec![NO_ARC; (steps.saturating_sub(start) + 1) * n] } else { Vec::new() };
    let prune = (start..steps).all(|l| g.min_weight(l) >= 0.0);
    let mut reached = 1usize;
    let mut lower_bound = 0.0;

    for l in start..steps {
        next.fill(f64::INFINITY);
        let row = (l + 1 - start) * n;
        for v in 0..n {
            let cv = cur[v];
            if cv == f64::INFINITY {
                continue;
            }
            for u in 0..nc {
                if let Some(w) = g.target(l, v, u) {
                    let cand = cv + g.weight(l, v, u);
                    if cand < next[w] {
                        next[w] = cand;
                        if keep_preds {
                            preds[row + w] = (v * nc + u) as u32;
                        }
                    }
                }
            }
        }
        for w in 0..n {
            if next[w] < best[w] {
                if best[w] == f64::INFINITY {
                    reached += 1;
                }
                best[w] = next[w];
                arrival[w] = (l + 1) as u32;
            }
        }
        std::mem::swap(&mut cur, &mut next);
        lower_bound += g.min_weight(l);
        // Any later arrival costs at least `lower_bound`; once that reaches the
        // worst current value nothing can strictly improve.
        if prune && reached == n && lower_bound >= best.iter().copied().fold(0.0, f64::max) {
            break;
        }
    }
    let preds = if keep_preds { Preds::Layered(preds) } else { Preds::None };
    SourceSearch { source, start, best, arrival, preds }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key {
    cost: f64,
    hops: u32,
    node: usize,
}

impl Eq for Key {}

impl Ord for Key {
    // reversed for a min-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then(other.hops.cmp(&self.hops))
            .then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Spatial Dijkstra for autonomous graphs, ordered by (cost, hops, node) with
/// predecessor ties to the lowest (node, control). Falls back to [`layered`]
/// when some optimal path needs more steps than the horizon allows.
pub(crate) fn spatial(g: &TimeExpandedGraph, source: usize, start: usize, keep_preds: bool) -> SourceSearch {
    debug_assert!(g.is_autonomous());
    let (n, nc) = (g.nodes(), g.controls());
    let mut dist = vec![f64::INFINITY; n];
    let mut hops = vec![u32::MAX; n];
    let mut pred = vec![NO_ARC; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    hops[source] = 0;
    heap.push(Key { cost: 0.0, hops: 0, node: source });
    while let Some(Key { cost, hops: hv, node: v }) = heap.pop() {
        if done[v] || cost != dist[v] || hv != hops[v] {
            continue;
        }
        done[v] = true;
        for u in 0..nc {
            let Some(w) = g.target(0, v, u) else { continue };
            if done[w] {
                continue;
            }
            let cand = cost + g.weight(0, v, u);
            let code = (v * nc + u) as u32;
            let better = match cand.total_cmp(&dist[w]) {
                Ordering::Less => true,
                Ordering::Equal => hv + 1 < hops[w] || (hv + 1 == hops[w] && code < pred[w]),
                Ordering::Greater => false,
            };
            if better {
                dist[w] = cand;
                hops[w] = hv + 1;
                pred[w] = code;
                heap.push(Key { cost: cand, hops: hv + 1, node: w });
            }
        }
    }
    let budget = g.steps().saturating_sub(start) as u32;
    if hops.iter().any(|&h| h != u32::MAX && h > budget) {
        return layered(g, source, start, keep_preds);
    }
    let arrival = hops.iter().map(|&h| if h == u32::MAX { NO_ARC } else { start as u32 + h }).collect();
    let preds = if keep_preds { Preds::Spatial(pred) } else { Preds::None };
    SourceSearch { source, start, best: dist, arrival, preds }
}

pub(crate) fn search(g: &TimeExpandedGraph, source: usize, start: usize, keep_preds: bool, force_layered: bool) -> SourceSearch {
    if g.is_autonomous() && !force_layered {
        spatial(g, source, start, keep_preds)
    } else {
        layered(g, source, start, keep_preds)
    }
}
