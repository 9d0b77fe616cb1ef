use super::primal::TransportPlan;
use super::simplex::{FlowNetwork, PivotRule};
use crate::cost::CostMatrix;
use crate::model::{Grid, ProblemSpec};
use crate::{Error, Result};

/// A plan split by whether source and target are interior or reserve nodes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlanDecomposition {
    pub pi_ii: Vec<(usize, usize, f64)>,
    /// Interior source exported at a reserve node.
    pub pi_ib: Vec<(usize, usize, f64)>,
    /// Imported at a reserve node, delivered to an interior target.
    pub pi_bi: Vec<(usize, usize, f64)>,
    /// Source marginal of `pi_ib`.
    pub nu_plus: Vec<f64>,
    /// Target marginal of `pi_bi`.
    pub nu_minus: Vec<f64>,
}

pub fn decompose_plan(plan: &TransportPlan, grid: &Grid) -> Result<PlanDecomposition> {
    let n = grid.len();
    let mut d = PlanDecomposition { nu_plus: vec![0.0; n], nu_minus: vec![0.0; n], ..Default::default() };
    for &(x, y, m) in &plan.pi {
        match (grid.is_reserve(x), grid.is_reserve(y)) {
            (false, false) => d.pi_ii.push((x, y, m)),
            (false, true) => {
                d.pi_ib.push((x, y, m));
                d.nu_plus[x] += m;
            }
            (true, false) => {
                d.pi_bi.push((x, y, m));
                d.nu_minus[y] += m;
            }
            (true, true) => {
                return Err(Error::Invariant(format!(
                    "plan moves {m:.3e} mass between reserve nodes {} and {}",
                    grid.label(x),
                    grid.label(y)
                )))
            }
        }
    }
    Ok(d)
}

/// Objective of each piece next to the optimum of its own subproblem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubproblemCheck {
    pub ii: (f64, f64),
    pub ib: (f64, f64),
    pub bi: (f64, f64),
}

impl SubproblemCheck {
    /// Largest amount by which a piece exceeds its subproblem optimum.
    pub fn max_excess(&self) -> f64 {
        [self.ii, self.ib, self.bi].iter().map(|(a, b)| a - b).fold(0.0, f64::max)
    }
}

/// Re-solves the three subproblems: interior transport between the marginals
/// of `pi_ii`, export of `ν⁺` at cost `c − ψ⁻` and import of `ν⁻` at cost
/// `c + ψ⁺`. The last two have no coupling constraint on the reserve side, so
/// each source (target) simply takes its cheapest reserve node.
pub fn verify_subproblems(d: &PlanDecomposition, cost: &CostMatrix, spec: &ProblemSpec) -> Result<SubproblemCheck> {
    let n = spec.grid.len();
    let mut rows = vec![0.0; n];
    let mut cols = vec![0.0; n];
    let mut ii = 0.0;
    for &(x, y, m) in &d.pi_ii {
        rows[x] += m;
        cols[y] += m;
        ii += cost.cost(x, y) * m;
    }
    let ii_opt = balanced_transport(&rows, &cols, cost)?;

    let mut ib = 0.0;
    for &(x, y, m) in &d.pi_ib {
        ib += (cost.cost(x, y) - spec.tariffs.export(y).unwrap_or(f64::NAN)) * m;
    }
    let exporters = spec.tariffs.exporters();
    let mut ib_opt = 0.0;
    for (x, &m) in d.nu_plus.iter().enumerate().filter(|e| *e.1 > 0.0) {
        let best = exporters
            .iter()
            .map(|&y| cost.cost(x, y) - spec.tariffs.export(y).unwrap_or(f64::NAN))
            .fold(f64::INFINITY, f64::min);
        ib_opt += best * m;
    }

    let mut bi = 0.0;
    for &(x, y, m) in &d.pi_bi {
        bi += (cost.cost(x, y) + spec.tariffs.import(x).unwrap_or(f64::NAN)) * m;
    }
    let importers = spec.tariffs.importers();
    let mut bi_opt = 0.0;
    for (y, &m) in d.nu_minus.iter().enumerate().filter(|e| *e.1 > 0.0) {
        let best = importers
            .iter()
            .map(|&x| cost.cost(x, y) + spec.tariffs.import(x).unwrap_or(f64::NAN))
            .fold(f64::INFINITY, f64::min);
        bi_opt += best * m;
    }
    Ok(SubproblemCheck { ii: (ii, ii_opt), ib: (ib, ib_opt), bi: (bi, bi_opt) })
}

/// Optimal value of the plain balanced transport problem.
fn balanced_transport(rows: &[f64], cols: &[f64], cost: &CostMatrix) -> Result<f64> {
    let src: Vec<usize> = (0..rows.len()).filter(|&i| rows[i] > 0.0).collect();
    let dst: Vec<usize> = (0..cols.len()).filter(|&i| cols[i] > 0.0).collect();
    if src.is_empty() || dst.is_empty() {
        return Ok(0.0);
    }
    let mut net = FlowNetwork::new(src.len() + dst.len());
    for (r, &x) in src.iter().enumerate() {
        net.set_supply(r, rows[x]);
    }
    // Absorb rounding differences between the two marginals in the last column.
    let surplus: f64 = src.iter().map(|&x| rows[x]).sum::<f64>() - dst.iter().map(|&y| cols[y]).sum::<f64>();
    for (c, &y) in dst.iter().enumerate() {
        let extra = if c + 1 == dst.len() { surplus } else { 0.0 };
        net.set_supply(src.len() + c, -(cols[y] + extra));
    }
    let mut arcs = Vec::new();
    for (r, &x) in src.iter().enumerate() {
        for (c, &y) in dst.iter().enumerate() {
            arcs.push((net.add_arc(r, src.len() + c, cost.cost(x, y)), x, y));
        }
    }
    let sol = net.solve(PivotRule::BlockSearch)?;
    Ok(arcs.iter().map(|&(e, x, y)| sol.flow[e] * cost.cost(x, y)).sum())
}
