use crate::cost::CostMatrix;
use crate::model::ProblemSpec;
use crate::{Error, Result};

/// Cheapest reserve node for exporting from each node and for importing to
/// each node. Entry `i` is `None` where no reserve node is usable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundarySelectors {
    /// `argmin_y c(x, y) − ψ⁻(y)` over exporters.
    pub t_ib: Vec<Option<usize>>,
    /// `argmin_x c(x, y) + ψ⁺(x)` over importers.
    pub t_bi: Vec<Option<usize>>,
}

/// Ties go to the lowest node index.
pub fn boundary_selectors(cost: &CostMatrix, spec: &ProblemSpec) -> Result<BoundarySelectors> {
    let n = spec.grid.len();
    let exporters = spec.tariffs.exporters();
    let importers = spec.tariffs.importers();
    if exporters.is_empty() && importers.is_empty() {
        return Err(Error::Input("no reserve node has a finite tariff".into()));
    }
    let t_ib = (0..n)
        .map(|x| argmin(exporters.iter().map(|&y| (y, cost.cost(x, y) - spec.tariffs.export(y).unwrap()))))
        .collect();
    let t_bi = (0..n)
        .map(|y| argmin(importers.iter().map(|&x| (x, cost.cost(x, y) + spec.tariffs.import(x).unwrap()))))
        .collect();
    Ok(BoundarySelectors { t_ib, t_bi })
}

fn argmin(values: impl Iterator<Item = (usize, f64)>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values {
        if v.is_finite() && best.is_none_or(|(_, b)| v < b) {
            best = Some((i, v));
        }
    }
    best.map(|b| b.0)
}
