use crate::{Error, Result};

/// A point in one or two dimensions. One-dimensional grids leave the second
/// component at zero.
pub type Point = [f64; 2];

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Domain description accepted by [`build_grid`].
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Interval { a: f64, b: f64, n: usize },
    Rectangle { x: [f64; 2], y: [f64; 2], nx: usize, ny: usize },
}

/// Evenly spaced tensor grid on an interval or rectangle.
///
/// Nodes are numbered with the first axis varying fastest. Geometric boundary
/// nodes start out in both reserve sets; [`Grid::with_reserves`] overrides that.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    origin: Point,
    step: Point,
    counts: [usize; 2],
    nodes: Vec<Point>,
    boundary: Vec<bool>,
    reserve_plus: Vec<bool>,
    reserve_minus: Vec<bool>,
}

pub fn build_grid(domain: &Domain) -> Result<Grid> {
    match *domain {
        Domain::Interval { a, b, n } => Grid::interval(a, b, n),
        Domain::Rectangle { x, y, nx, ny } => Grid::rectangle(x, y, nx, ny),
    }
}

impl Grid {
    pub fn interval(a: f64, b: f64, n: usize) -> Result<Grid> {
        check_axis(a, b, n, "interval")?;
        let h = (b - a) / (n - 1) as f64;
        let nodes: Vec<Point> = (0..n).map(|i| [axis_coord(a, b, h, i, n), 0.0]).collect();
        let boundary: Vec<bool> = (0..n).map(|i| i == 0 || i == n - 1).collect();
        Ok(Grid {
            dim: 1,
            origin: [a, 0.0],
            step: [h, 0.0],
            counts: [n, 1],
            reserve_plus: boundary.clone(),
            reserve_minus: boundary.clone(),
            boundary,
            nodes,
        })
    }

    pub fn rectangle(x: [f64; 2], y: [f64; 2], nx: usize, ny: usize) -> Result<Grid> {
        check_axis(x[0], x[1], nx, "x axis")?;
        check_axis(y[0], y[1], ny, "y axis")?;
        let hx = (x[1] - x[0]) / (nx - 1) as f64;
        let hy = (y[1] - y[0]) / (ny - 1) as f64;
        let mut nodes = Vec::with_capacity(nx * ny);
        let mut boundary = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                nodes.push([
                    axis_coord(x[0], x[1], hx, i, nx),
                    axis_coord(y[0], y[1], hy, j, ny),
                ]);
                boundary.push(i == 0 || j == 0 || i == nx - 1 || j == ny - 1);
            }
        }
        Ok(Grid {
            dim: 2,
            origin: [x[0], y[0]],
            step: [hx, hy],
            counts: [nx, ny],
            reserve_plus: boundary.clone(),
            reserve_minus: boundary.clone(),
            boundary,
            nodes,
        })
    }

    /// Replaces both reserve sets. Nodes outside `K⁺ ∪ K⁻` become interior.
    pub fn with_reserves(mut self, plus: &[usize], minus: &[usize]) -> Result<Grid> {
        let n = self.len();
        for &i in plus.iter().chain(minus) {
            if i >= n {
                return Err(Error::Input(format!("reserve node {i} out of range (grid has {n} nodes)")));
            }
        }
        self.reserve_plus = vec![false; n];
        self.reserve_minus = vec![false; n];
        for &i in plus {
            self.reserve_plus[i] = true;
        }
        for &i in minus {
            self.reserve_minus[i] = true;
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> Point {
        self.nodes[i]
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn counts(&self) -> [usize; 2] {
        self.counts
    }

    /// Largest axis spacing.
    pub fn spacing(&self) -> f64 {
        self.step[0].max(self.step[1])
    }

    pub fn axis_spacing(&self, axis: usize) -> f64 {
        self.step[axis]
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.boundary[i]
    }

    pub fn in_reserve_plus(&self, i: usize) -> bool {
        self.reserve_plus[i]
    }

    pub fn in_reserve_minus(&self, i: usize) -> bool {
        self.reserve_minus[i]
    }

    pub fn is_reserve(&self, i: usize) -> bool {
        self.reserve_plus[i] || self.reserve_minus[i]
    }

    pub fn is_interior(&self, i: usize) -> bool {
        !self.is_reserve(i)
    }

    pub fn interior_mask(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.is_interior(i)).collect()
    }

    pub fn reserve_plus_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.reserve_plus[i]).collect()
    }

    pub fn reserve_minus_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.reserve_minus[i]).collect()
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_interior(i)).collect()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        dist(self.nodes[i], self.nodes[j])
    }

    /// Euclidean diameter of the bounding box.
    pub fn diameter(&self) -> f64 {
        let ex = self.step[0] * (self.counts[0] - 1) as f64;
        let ey = self.step[1] * (self.counts[1].max(1) - 1) as f64;
        (ex * ex + ey * ey).sqrt()
    }

    pub fn lower(&self) -> Point {
        self.origin
    }

    pub fn upper(&self) -> Point {
        let mut p = self.origin;
        for (axis, c) in p.iter_mut().enumerate().take(self.dim) {
            *c += self.step[axis] * (self.counts[axis] - 1) as f64;
        }
        p
    }

    /// Nearest node, ties to the lower index. `None` when the point lies more
    /// than half a cell outside the grid.
    pub fn snap(&self, p: Point) -> Option<usize> {
        let mut idx = [0usize; 2];
        for axis in 0..self.dim {
            let v = (p[axis] - self.origin[axis]) / self.step[axis];
            let last = (self.counts[axis] - 1) as f64;
            if !(v >= -0.5 - 1e-9 && v <= last + 0.5 + 1e-9) {
                return None;
            }
            let r = v.floor();
            let k = if v - r > 0.5 { r + 1.0 } else { r };
            idx[axis] = k.clamp(0.0, last) as usize;
        }
        Some(idx[0] + idx[1] * self.counts[0])
    }

    /// Node whose coordinates equal `p` up to a hundredth of the spacing.
    pub fn locate(&self, p: Point) -> Option<usize> {
        let i = self.snap(p)?;
        (dist(self.nodes[i], p) <= 1e-2 * self.spacing()).then_some(i)
    }

    /// Axis neighbours of node `i` (up to 2 in 1-D, 4 in 2-D).
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let (ix, iy) = (i % self.counts[0], i / self.counts[0]);
        let mut out = Vec::with_capacity(4);
        if ix > 0 {
            out.push(i - 1);
        }
        if ix + 1 < self.counts[0] {
            out.push(i + 1);
        }
        if self.dim == 2 {
            if iy > 0 {
                out.push(i - self.counts[0]);
            }
            if iy + 1 < self.counts[1] {
                out.push(i + self.counts[0]);
            }
        }
        out
    }

    /// Neighbour one step along `axis` in direction `sign` (±1).
    pub fn step_node(&self, i: usize, axis: usize, sign: i64) -> Option<usize> {
        let mut idx = [(i % self.counts[0]) as i64, (i / self.counts[0]) as i64];
        idx[axis] += sign;
        if idx[axis] < 0 || idx[axis] >= self.counts[axis] as i64 {
            return None;
        }
        Some(idx[0] as usize + idx[1] as usize * self.counts[0])
    }

    /// Coordinate label used in CSV output: `x` in 1-D, `x y` in 2-D.
    pub fn label(&self, i: usize) -> String {
        let p = self.nodes[i];
        if self.dim == 1 {
            format!("{}", p[0])
        } else {
            format!("{} {}", p[0], p[1])
        }
    }
}

fn check_axis(a: f64, b: f64, n: usize, what: &str) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) || b <= a {
        return Err(Error::Input(format!("{what}: non-positive extent [{a}, {b}]")));
    }
    if n < 3 {
        return Err(Error::Input(format!("{what}: need at least 3 nodes, got {n}")));
    }
    Ok(())
}

// Endpoints are set exactly so the last node lands on b.
fn axis_coord(a: f64, b: f64, h: f64, i: usize, n: usize) -> f64 {
    if i + 1 == n {
        b
    } else {
        a + h * i as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_five_nodes() {
        let g = Grid::interval(0.0, 2.0, 5).unwrap();
        let xs: Vec<f64> = g.nodes().iter().map(|p| p[0]).collect();
        assert_eq!(xs, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(g.reserve_plus_nodes(), vec![0, 4]);
        assert_eq!(g.reserve_minus_nodes(), vec![0, 4]);
        assert!(g.is_boundary(0) && g.is_boundary(4) && !g.is_boundary(2));
    }

    #[test]
    fn interval_spacing_and_interior_count() {
        let g = Grid::interval(0.0, 2.0, 201).unwrap();
        assert!((g.spacing() - 0.01).abs() < 1e-15);
        assert_eq!(g.interior_nodes().len(), 199);
    }

    #[test]
    fn rectangle_perimeter() {
        let g = build_grid(&Domain::Rectangle { x: [0.0, 1.0], y: [0.0, 1.0], nx: 5, ny: 5 }).unwrap();
        assert_eq!(g.len(), 25);
        assert_eq!((0..25).filter(|&i| g.is_boundary(i)).count(), 16);
        assert_eq!(g.interior_nodes().len(), 9);
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(Grid::interval(1.0, 1.0, 5).is_err());
        assert!(Grid::interval(0.0, 1.0, 2).is_err());
        assert!(Grid::rectangle([0.0, 1.0], [1.0, 0.0], 3, 3).is_err());
    }

    #[test]
    fn snap_ties_go_low() {
        let g = Grid::interval(0.0, 1.0, 5).unwrap();
        assert_eq!(g.snap([0.125, 0.0]), Some(0));
        assert_eq!(g.snap([0.126, 0.0]), Some(1));
        assert_eq!(g.snap([-0.1, 0.0]), Some(0));
        assert_eq!(g.snap([-0.2, 0.0]), None);
        assert_eq!(g.snap([1.2, 0.0]), None);
    }

    #[test]
    fn reserve_override_makes_rest_interior() {
        let g = Grid::interval(0.0, 2.0, 5).unwrap().with_reserves(&[0], &[4]).unwrap();
        assert!(g.in_reserve_plus(0) && !g.in_reserve_minus(0));
        assert!(g.in_reserve_minus(4) && !g.in_reserve_plus(4));
        assert_eq!(g.interior_nodes(), vec![1, 2, 3]);
    }

    #[test]
    fn neighbours_in_2d() {
        let g = Grid::rectangle([0.0, 1.0], [0.0, 1.0], 3, 3).unwrap();
        let mut n = g.neighbors(4);
        n.sort();
        assert_eq!(n, vec![1, 3, 5, 7]);
        assert_eq!(g.neighbors(0).len(), 2);
    }
}
