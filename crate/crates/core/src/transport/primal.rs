use super::simplex::{FlowNetwork, PivotRule};
use crate::cost::CostMatrix;
use crate::model::{no_arbitrage_violation, ProblemSpec};
use crate::{Error, Result};

/// Optimal plan of the tariff-augmented Kantorovich problem.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    /// `(source node, target node, mass)`, sorted, positive masses only.
    pub pi: Vec<(usize, usize, f64)>,
    /// Import mass per node (zero off `K⁺`).
    pub xi_plus: Vec<f64>,
    /// Export mass per node (zero off `K⁻`).
    pub xi_minus: Vec<f64>,
    pub objective: f64,
    /// Potentials of the final basis, `(φ⁺, φ⁻)` on network rows and columns
    /// and NaN elsewhere. Absent for plans not produced by the solver.
    pub(crate) basis: Option<(Vec<f64>, Vec<f64>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LpOptions {
    pub pivot: PivotRule,
    /// Keep reserve-to-reserve arcs instead of pruning them.
    pub include_reserve_pairs: bool,
}

impl TransportPlan {
    /// Builds a plan from raw couplings; tariffs are read off reserve rows/columns.
    pub fn from_couplings(pi: Vec<(usize, usize, f64)>, cost: &CostMatrix, spec: &ProblemSpec) -> TransportPlan {
        let n = spec.grid.len();
        let mut pi: Vec<_> = pi.into_iter().filter(|e| e.2 > 0.0).collect();
        pi.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut xi_plus = vec![0.0; n];
        let mut xi_minus = vec![0.0; n];
        for &(x, y, m) in &pi {
            if spec.grid.in_reserve_plus(x) && spec.mu_plus.weight(x) == 0.0 {
                xi_plus[x] += m;
            }
            if spec.grid.in_reserve_minus(y) && spec.mu_minus.weight(y) == 0.0 {
                xi_minus[y] += m;
            }
        }
        let objective = plan_objective(&pi, &xi_plus, &xi_minus, cost, spec);
        TransportPlan { pi, xi_plus, xi_minus, objective, basis: None }
    }

    pub fn total_mass(&self) -> f64 {
        self.pi.iter().map(|e| e.2).sum()
    }

    pub fn row_sums(&self, n: usize) -> Vec<f64> {
        let mut r = vec![0.0; n];
        for &(x, _, m) in &self.pi {
            r[x] += m;
        }
        r
    }

    pub fn col_sums(&self, n: usize) -> Vec<f64> {
        let mut c = vec![0.0; n];
        for &(_, y, m) in &self.pi {
            c[y] += m;
        }
        c
    }
}

/// `∑ c·π + ∑ ψ⁺·ξ⁺ − ∑ ψ⁻·ξ⁻`.
pub fn plan_objective(
    pi: &[(usize, usize, f64)],
    xi_plus: &[f64],
    xi_minus: &[f64],
    cost: &CostMatrix,
    spec: &ProblemSpec,
) -> f64 {
    let mut total: f64 = pi.iter().map(|&(x, y, m)| cost.cost(x, y) * m).sum();
    for (i, &m) in xi_plus.iter().enumerate() {
        if m > 0.0 {
            total += spec.tariffs.import(i).unwrap_or(f64::NAN) * m;
        }
    }
    for (i, &m) in xi_minus.iter().enumerate() {
        if m > 0.0 {
            total -= spec.tariffs.export(i).unwrap_or(f64::NAN) * m;
        }
    }
    total
}

pub fn solve_primal(cost: &CostMatrix, spec: &ProblemSpec) -> Result<TransportPlan> {
    solve_primal_with(cost, spec, LpOptions::default())
}

/// Same LP with the supplier role restricted to `K⁺` and the absorber role
/// to `K⁻`; the reserve sets live on the grid, so this is [`solve_primal`]
/// followed by [`super::recover_dual`].
pub fn solve_general_reserve(cost: &CostMatrix, spec: &ProblemSpec) -> Result<(TransportPlan, super::DualPotentials)> {
    let plan = solve_primal(cost, spec)?;
    let duals = super::recover_dual(&plan, cost, spec)?;
    Ok((plan, duals))
}

/// Min-cost flow layout:
///
/// - a row per node of `supp μ⁺` and per importer, with supply `μ⁺(x)`;
/// - a column per node of `supp μ⁻` and per exporter, with supply `−μ⁻(y)`;
/// - arcs row → column at cost `c(x, y)`;
/// - hub `IMP` (supply `μ⁻(Ω) + e`) with arcs `IMP → row r` at cost `ψ⁺(r)`;
/// - hub `EXP` (supply `−μ⁺(Ω) − e`) with arcs `column s → EXP` at cost `−ψ⁻(s)`;
/// - a zero-cost arc `IMP → EXP`, which always carries at least `e`.
///
/// Forbidden roles simply have no arc.
pub fn solve_primal_with(cost: &CostMatrix, spec: &ProblemSpec, opts: LpOptions) -> Result<TransportPlan> {
    let grid = &spec.grid;
    let n = grid.len();
    if let Some(((x, y, excess), _)) = no_arbitrage_violation(spec, cost) {
        return Err(Error::NoArbitrage { import: x, export: y, excess });
    }
    let importers = spec.tariffs.importers();
    let exporters = spec.tariffs.exporters();
    let rows: Vec<usize> =
        (0..n).filter(|&i| spec.mu_plus.weight(i) > 0.0 || importers.binary_search(&i).is_ok()).collect();
    let cols: Vec<usize> =
        (0..n).filter(|&i| spec.mu_minus.weight(i) > 0.0 || exporters.binary_search(&i).is_ok()).collect();
    let (nr, nc) = (rows.len(), cols.len());
    let imp = nr + nc;
    let exp = imp + 1;
    let mut net = FlowNetwork::new(nr + nc + 2);

    let m_plus = spec.mu_plus.total();
    let m_minus = spec.mu_minus.total();
    let slack = m_plus.max(m_minus).max(1.0);
    for (r, &x) in rows.iter().enumerate() {
        net.set_supply(r, spec.mu_plus.weight(x));
    }
    for (c, &y) in cols.iter().enumerate() {
        net.set_supply(nr + c, -spec.mu_minus.weight(y));
    }
    net.set_supply(imp, m_minus + slack);
    net.set_supply(exp, -(m_plus + slack));

    let mut pair_arcs = Vec::with_capacity(nr * nc);
    for (r, &x) in rows.iter().enumerate() {
        let reserve_row = spec.mu_plus.weight(x) == 0.0;
        for (c, &y) in cols.iter().enumerate() {
            let reserve_col = spec.mu_minus.weight(y) == 0.0;
            if reserve_row && reserve_col && !opts.include_reserve_pairs {
                continue;
            }
            let e = net.add_arc(r, nr + c, cost.cost(x, y));
            pair_arcs.push((e, x, y));
        }
    }
    let mut import_arcs = Vec::new();
    for (r, &x) in rows.iter().enumerate() {
        if let Some(p) = spec.tariffs.import(x) {
            import_arcs.push((net.add_arc(imp, r, p), x));
        }
    }
    let mut export_arcs = Vec::new();
    for (c, &y) in cols.iter().enumerate() {
        if let Some(p) = spec.tariffs.export(y) {
            export_arcs.push((net.add_arc(nr + c, exp, -p), y));
        }
    }
    net.add_arc(imp, exp, 0.0);

    let sol = net.solve(opts.pivot)?;
    let scale = m_plus + m_minus + slack;
    if sol.artificial_flow > 1e-9 * scale {
        let msg = if importers.is_empty() && exporters.is_empty() {
            "unbalanced problem without reserve".to_string()
        } else {
            format!("no feasible plan; {:.3e} mass cannot be routed", sol.artificial_flow)
        };
        return Err(Error::Infeasible(msg));
    }

    let flow_tol = 1e-12 * scale;
    let mut pi = Vec::new();
    for &(e, x, y) in &pair_arcs {
        if sol.flow[e] > flow_tol {
            pi.push((x, y, sol.flow[e]));
        }
    }
    let mut xi_plus = vec![0.0; n];
    for &(e, x) in &import_arcs {
        if sol.flow[e] > flow_tol {
            xi_plus[x] = sol.flow[e];
        }
    }
    let mut xi_minus = vec![0.0; n];
    for &(e, y) in &export_arcs {
        if sol.flow[e] > flow_tol {
            xi_minus[y] = sol.flow[e];
        }
    }
    pi.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let objective = plan_objective(&pi, &xi_plus, &xi_minus, cost, spec);

    // Potentials relative to the import hub; the export hub shares its value
    // because the IMP → EXP arc is basic with reduced cost zero.
    let base = sol.potential[imp];
    let mut pot: Vec<f64> = sol.potential.iter().map(|p| p - base).collect();
    let components = support_components(&net, &sol.flow, flow_tol, nr + nc + 2);
    repin_components(&net, &components, imp, &mut pot);
    let mut phi_plus = vec![f64::NAN; n];
    let mut phi_minus = vec![f64::NAN; n];
    for (r, &x) in rows.iter().enumerate() {
        phi_plus[x] = pot[r];
    }
    for (c, &y) in cols.iter().enumerate() {
        phi_minus[y] = pot[nr + c];
    }

    Ok(TransportPlan { pi, xi_plus, xi_minus, objective, basis: Some((phi_plus, phi_minus)) })
}

/// Connected components of the graph of arcs carrying flow.
fn support_components(net: &FlowNetwork, flow: &[f64], tol: f64, nodes: usize) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..nodes).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in 0..net.arcs() {
        if flow[e] > tol {
            let (a, b, _) = net.arc(e);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    (0..nodes).map(|x| find(&mut parent, x)).collect()
}

/// Shifts every flow component other than the hub's by the largest amount
/// that keeps all reduced costs nonnegative. Components are balanced, so the
/// dual objective does not change. A component with no constraint from above
/// takes its lower limit, and a free one is shifted to make its smallest
/// potential zero.
fn repin_components(net: &FlowNetwork, comp: &[usize], hub: usize, pot: &mut [f64]) {
    let hub_comp = comp[hub];
    let mut roots: Vec<usize> = comp.iter().copied().filter(|&c| c != hub_comp).collect();
    roots.sort_unstable();
    roots.dedup();
    for root in roots {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for e in 0..net.arcs() {
            let (a, b, c) = net.arc(e);
            let (ina, inb) = (comp[a] == root, comp[b] == root);
            if inb && !ina {
                hi = hi.min(c + pot[a] - pot[b]);
            } else if ina && !inb {
                lo = lo.max(pot[b] - c - pot[a]);
            }
        }
        let shift = if hi.is_finite() {
            hi
        } else if lo.is_finite() {
            lo
        } else {
            -(0..pot.len()).filter(|&k| comp[k] == root).map(|k| pot[k]).fold(f64::INFINITY, f64::min)
        };
        for k in 0..pot.len() {
            if comp[k] == root {
                pot[k] += shift;
            }
        }
    }
}
