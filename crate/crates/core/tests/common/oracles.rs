//! Exhaustive oracles, independent of the solver code.

use tariffot::cost::{CostMatrix, TimeExpandedGraph};
use tariffot::ProblemSpec;

/// Exhaustive vertex enumeration of the tariff LP written with free reserve
/// legs: variables are the allowed (row, column) pairs, constraints are the
/// interior marginals only. Every subset of linearly independent columns is
/// tried, so this is slow but independent of the simplex code.
pub fn vertex_oracle(spec: &ProblemSpec, cost: &CostMatrix) -> Option<f64> {
    let n = spec.grid.len();
    let t = &spec.tariffs;
    let rows: Vec<usize> = (0..n).filter(|&i| spec.mu_plus.weight(i) > 0.0 || t.import(i).is_some()).collect();
    let cols: Vec<usize> = (0..n).filter(|&i| spec.mu_minus.weight(i) > 0.0 || t.export(i).is_some()).collect();
    let mut vars = Vec::new();
    for &x in &rows {
        for &y in &cols {
            let rx = spec.mu_plus.weight(x) == 0.0;
            let ry = spec.mu_minus.weight(y) == 0.0;
            if rx && ry {
                continue;
            }
            let mut c = cost.cost(x, y);
            if rx {
                c += t.import(x).unwrap();
            }
            if ry {
                c -= t.export(y).unwrap();
            }
            vars.push((x, y, c));
        }
    }
    // constraint rows: interior sources then interior targets
    let cons: Vec<(bool, usize, f64)> = spec
        .mu_plus
        .support()
        .into_iter()
        .map(|x| (true, x, spec.mu_plus.weight(x)))
        .chain(spec.mu_minus.support().into_iter().map(|y| (false, y, spec.mu_minus.weight(y))))
        .collect();
    let k = cons.len();
    let column = |v: usize| -> Vec<f64> {
        cons.iter()
            .map(|&(src, node, _)| {
                let (x, y, _) = vars[v];
                if (src && x == node) || (!src && y == node) {
                    1.0
                } else {
                    0.0
                }
            })
            .collect()
    };
    let rhs: Vec<f64> = cons.iter().map(|c| c.2).collect();
    let mut best: Option<f64> = None;
    let mut subset = Vec::new();
    fn rec(
        start: usize,
        subset: &mut Vec<usize>,
        k: usize,
        nvars: usize,
        f: &mut dyn FnMut(&[usize]),
    ) {
        f(subset);
        if subset.len() == k {
            return;
        }
        for v in start..nvars {
            subset.push(v);
            rec(v + 1, subset, k, nvars, f);
            subset.pop();
        }
    }
    let mut visit = |s: &[usize]| {
        if let Some(sol) = solve_exact(s.iter().map(|&v| column(v)).collect(), &rhs) {
            if sol.iter().all(|&z| z >= -1e-12) {
                let obj: f64 = s.iter().zip(&sol).map(|(&v, &z)| vars[v].2 * z).sum();
                if best.is_none_or(|b| obj < b) {
                    best = Some(obj);
                }
            }
        }
    };
    rec(0, &mut subset, k, vars.len(), &mut visit);
    best
}

/// Solves `A z = b` for linearly independent columns `A`, or `None` if the
/// columns are dependent or the system is inconsistent.
pub fn solve_exact(cols: Vec<Vec<f64>>, b: &[f64]) -> Option<Vec<f64>> {
    let m = b.len();
    let k = cols.len();
    let mut a: Vec<Vec<f64>> = (0..m).map(|i| (0..k).map(|j| cols[j][i]).chain([b[i]]).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for j in 0..k {
        let p = (r..m).max_by(|&p, &q| a[p][j].abs().total_cmp(&a[q][j].abs()))?;
        if a[p][j].abs() < 1e-12 {
            return None;
        }
        a.swap(r, p);
        for i in 0..m {
            if i != r {
                let f = a[i][j] / a[r][j];
                for c in j..=k {
                    a[i][c] -= f * a[r][c];
                }
            }
        }
        pivots.push(r);
        r += 1;
    }
    if (r..m).any(|i| a[i][k].abs() > 1e-9) {
        return None;
    }
    Some((0..k).map(|j| a[j][k] / a[j][j]).collect())
}

/// `(cost, steps)` of the cheapest control sequence from `x` to each node,
/// earliest arrival among equal costs; `None` when no sequence arrives.
pub fn enumerate_cost_row(g: &TimeExpandedGraph, x: usize) -> Vec<Option<(f64, usize)>> {
    fn rec(g: &TimeExpandedGraph, l: usize, v: usize, acc: f64, best: &mut [Option<(f64, usize)>]) {
        let better = match best[v] {
            None => true,
            Some((c, k)) => acc < c || (acc == c && l < k),
        };
        if better {
            best[v] = Some((acc, l));
        }
        if l == g.steps() {
            return;
        }
        for u in 0..g.controls() {
            if let Some(w) = g.target(l, v, u) {
                rec(g, l + 1, w, acc + g.weight(l, v, u), best);
            }
        }
    }
    let mut best = vec![None; g.nodes()];
    rec(g, 0, x, 0.0, &mut best);
    best
}

/// Every control sequence from `(layer, x)` with every stop, valued as
/// `φ⁻(end)` minus the step weights taken last to first.
pub fn enumerate_value(graph: &TimeExpandedGraph, phi: &[f64], layer: usize, x: usize) -> f64 {
    fn rec(g: &TimeExpandedGraph, phi: &[f64], l: usize, v: usize, weights: &mut Vec<f64>, best: &mut f64) {
        let mut val = phi[v];
        for w in weights.iter().rev() {
            val -= w;
        }
        *best = best.max(val);
        if l == g.steps() {
            return;
        }
        for u in 0..g.controls() {
            if let Some(w) = g.target(l, v, u) {
                weights.push(g.weight(l, v, u));
                rec(g, phi, l + 1, w, weights, best);
                weights.pop();
            }
        }
    }
    let mut best = f64::NEG_INFINITY;
    rec(graph, phi, layer, x, &mut Vec::new(), &mut best);
    best
}

