use super::grid::{Grid, Point};
use crate::{Error, Result};

/// Nonnegative mass per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(weights: Vec<f64>) -> Result<DiscreteMeasure> {
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Input(format!(
                "mass at node {i} is negative or not finite ({})",
                weights[i]
            )));
        }
        Ok(DiscreteMeasure { weights })
    }

    pub fn zeros(n: usize) -> DiscreteMeasure {
        DiscreteMeasure { weights: vec![0.0; n] }
    }

    /// Single atom of mass `mass` at node `i`.
    pub fn dirac(n: usize, i: usize, mass: f64) -> Result<DiscreteMeasure> {
        let mut w = vec![0.0; n];
        w[i] = mass;
        DiscreteMeasure::new(w)
    }

    /// Equal weights on the interior nodes lying in the box `[lo, hi]`,
    /// scaled so the total equals `total`.
    pub fn uniform(grid: &Grid, lo: Point, hi: Point, total: f64) -> Result<DiscreteMeasure> {
        let tol = 1e-9 * grid.spacing();
        let inside: Vec<usize> = (0..grid.len())
            .filter(|&i| grid.is_interior(i))
            .filter(|&i| {
                let p = grid.node(i);
                (0..grid.dim()).all(|a| p[a] >= lo[a] - tol && p[a] <= hi[a] + tol)
            })
            .collect();
        if inside.is_empty() {
            return Err(Error::Input("uniform measure box contains no interior node".into()));
        }
        if !(total.is_finite() && total >= 0.0) {
            return Err(Error::Input(format!("uniform measure total {total} is negative")));
        }
        let mut w = vec![0.0; grid.len()];
        let each = total / inside.len() as f64;
        for i in inside {
            w[i] = each;
        }
        Ok(DiscreteMeasure { weights: w })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&i| self.weights[i] > 0.0).collect()
    }

    pub fn scaled(&self, lambda: f64) -> Result<DiscreteMeasure> {
        DiscreteMeasure::new(self.weights.iter().map(|w| w * lambda).collect())
    }
}

/// Import costs `ψ⁺` and export rebates `ψ⁻` per node.
///
/// Forbidden roles are stored as `+∞` (import) and `-∞` (export). Callers go
/// through [`TariffSpec::import`] / [`TariffSpec::export`], which return `None`
/// for those, so the sentinels never enter arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct TariffSpec {
    psi_plus: Vec<f64>,
    psi_minus: Vec<f64>,
}

impl TariffSpec {
    /// All roles forbidden.
    pub fn closed(n: usize) -> TariffSpec {
        TariffSpec { psi_plus: vec![f64::INFINITY; n], psi_minus: vec![f64::NEG_INFINITY; n] }
    }

    /// The same import cost and export rebate on every reserve node.
    pub fn uniform(grid: &Grid, psi_plus: f64, psi_minus: f64) -> TariffSpec {
        let mut t = TariffSpec::closed(grid.len());
        for i in grid.reserve_plus_nodes() {
            t.psi_plus[i] = psi_plus;
        }
        for i in grid.reserve_minus_nodes() {
            t.psi_minus[i] = psi_minus;
        }
        t
    }

    pub fn set_import(&mut self, i: usize, value: f64) {
        self.psi_plus[i] = value;
    }

    pub fn set_export(&mut self, i: usize, value: f64) {
        self.psi_minus[i] = value;
    }

    pub fn forbid_import(&mut self, i: usize) {
        self.psi_plus[i] = f64::INFINITY;
    }

    pub fn forbid_export(&mut self, i: usize) {
        self.psi_minus[i] = f64::NEG_INFINITY;
    }

    pub fn len(&self) -> usize {
        self.psi_plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi_plus.is_empty()
    }

    /// `ψ⁺(i)` when importing at `i` is allowed.
    pub fn import(&self, i: usize) -> Option<f64> {
        let v = self.psi_plus[i];
        v.is_finite().then_some(v)
    }

    /// `ψ⁻(i)` when exporting at `i` is allowed.
    pub fn export(&self, i: usize) -> Option<f64> {
        let v = self.psi_minus[i];
        v.is_finite().then_some(v)
    }

    pub fn importers(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.psi_plus[i].is_finite()).collect()
    }

    pub fn exporters(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.psi_minus[i].is_finite()).collect()
    }

    pub fn has_finite(&self) -> bool {
        self.psi_plus.iter().chain(&self.psi_minus).any(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_mass_names_node() {
        let err = DiscreteMeasure::new(vec![0.0, 1.0, -0.5]).unwrap_err();
        assert!(err.to_string().contains("node 2"), "{err}");
    }

    #[test]
    fn uniform_on_half_interval() {
        let g = Grid::interval(0.0, 2.0, 401).unwrap();
        let mu = DiscreteMeasure::uniform(&g, [0.0, 0.0], [1.0, 0.0], 1.0).unwrap();
        assert_eq!(mu.support().len(), 200);
        assert!((mu.total() - 1.0).abs() < 1e-12);
        assert_eq!(mu.weight(0), 0.0);
        assert!(mu.weight(200) > 0.0);
    }

    #[test]
    fn sentinels_stay_out_of_arithmetic() {
        let g = Grid::interval(0.0, 2.0, 5).unwrap();
        let mut t = TariffSpec::uniform(&g, 0.1, -0.1);
        t.forbid_import(0);
        assert_eq!(t.import(0), None);
        assert_eq!(t.import(4), Some(0.1));
        assert_eq!(t.export(2), None);
        assert_eq!(t.importers(), vec![4]);
        assert_eq!(t.exporters(), vec![0, 4]);
    }
}
