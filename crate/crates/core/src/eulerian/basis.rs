//! Fixed test-function basis for the weak residuals.
//!
//! For a box `[lo, hi]` and horizon `T` the basis is, in this order:
//!
//! 1. the monomials `1, x, t, x·t, x², t²` (and `y, y², x·y` in 2-D);
//! 2. space-time hats: spatial hats centred at 1/4, 1/2 and 3/4 of each axis
//!    with half-width 1/4 of the extent (tensor products in 2-D), times
//!    temporal hats centred at `0, T/4, T/2` with half-width `T/4`.
//!
//! Coordinates are used as is; the residual bounds scale with each
//! function's spatial Lipschitz constant.

use crate::model::{Grid, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    /// `x^px · y^py · t^pt`
    Monomial { px: u32, py: u32, pt: u32 },
    /// Product of tent functions; a zero half-width means constant in that axis.
    Hat { center: Point, half: Point, t_center: f64, t_half: f64 },
}

fn tent(z: f64, c: f64, half: f64) -> f64 {
    if half == 0.0 {
        1.0
    } else {
        (1.0 - (z - c).abs() / half).max(0.0)
    }
}

impl TestFunction {
    pub fn value(&self, t: f64, x: Point) -> f64 {
        match *self {
            TestFunction::Monomial { px, py, pt } => x[0].powi(px as i32) * x[1].powi(py as i32) * t.powi(pt as i32),
            TestFunction::Hat { center, half, t_center, t_half } => {
                tent(x[0], center[0], half[0]) * tent(x[1], center[1], half[1]) * tent(t, t_center, t_half)
            }
        }
    }

    /// Lipschitz constant in `x` over `[lo, hi] × [0, horizon]`.
    pub fn lip_x(&self, lo: Point, hi: Point, horizon: f64) -> f64 {
        match *self {
            TestFunction::Monomial { px, py, pt } => {
                let reach = |p: u32, a: f64, b: f64| a.abs().max(b.abs()).powi(p as i32);
                let slope = |p: u32, a: f64, b: f64| {
                    if p == 0 {
                        0.0
                    } else {
                        p as f64 * a.abs().max(b.abs()).powi(p as i32 - 1)
                    }
                };
                let tp = horizon.powi(pt as i32);
                let gx = slope(px, lo[0], hi[0]) * reach(py, lo[1], hi[1]);
                let gy = slope(py, lo[1], hi[1]) * reach(px, lo[0], hi[0]);
                (gx * gx + gy * gy).sqrt() * tp
            }
            TestFunction::Hat { half, .. } => {
                let inv = |h: f64| if h == 0.0 { 0.0 } else { 1.0 / h };
                (inv(half[0]).powi(2) + inv(half[1]).powi(2)).sqrt()
            }
        }
    }

    pub fn name(&self) -> String {
        match *self {
            TestFunction::Monomial { px, py, pt } => {
                let mut s = String::new();
                for (v, p) in [("x", px), ("y", py), ("t", pt)] {
                    match p {
                        0 => {}
                        1 => s.push_str(v),
                        _ => s.push_str(&format!("{v}^{p}")),
                    }
                }
                if s.is_empty() {
                    "1".into()
                } else {
                    s
                }
            }
            TestFunction::Hat { center, half, t_center, .. } => {
                if half[1] == 0.0 {
                    format!("hat(x={:.4},t={:.4})", center[0], t_center)
                } else {
                    format!("hat(x={:.4},y={:.4},t={:.4})", center[0], center[1], t_center)
                }
            }
        }
    }
}

fn spatial_hats(grid: &Grid) -> Vec<(Point, Point)> {
    let (lo, hi) = (grid.lower(), grid.upper());
    let axis = |a: usize| -> Vec<(f64, f64)> {
        let w = hi[a] - lo[a];
        [0.25, 0.5, 0.75].iter().map(|f| (lo[a] + f * w, 0.25 * w)).collect()
    };
    if grid.dim() == 1 {
        axis(0).into_iter().map(|(c, h)| ([c, 0.0], [h, 0.0])).collect()
    } else {
        let (xs, ys) = (axis(0), axis(1));
        xs.iter().flat_map(|&(cx, hx)| ys.iter().map(move |&(cy, hy)| ([cx, cy], [hx, hy]))).collect()
    }
}

/// Space-time basis for the continuity residual.
pub fn space_time_basis(grid: &Grid, horizon: f64) -> Vec<TestFunction> {
    let mono = |px, py, pt| TestFunction::Monomial { px, py, pt };
    let mut basis = vec![mono(0, 0, 0), mono(1, 0, 0), mono(0, 0, 1), mono(1, 0, 1), mono(2, 0, 0), mono(0, 0, 2)];
    if grid.dim() == 2 {
        basis.extend([mono(0, 1, 0), mono(0, 2, 0), mono(1, 1, 0)]);
    }
    for (center, half) in spatial_hats(grid) {
        for tc in [0.0, 0.25, 0.5] {
            basis.push(TestFunction::Hat { center, half, t_center: tc * horizon, t_half: 0.25 * horizon });
        }
    }
    basis
}

/// Time-independent basis for the stopping-marginal residual.
pub fn spatial_basis(grid: &Grid) -> Vec<TestFunction> {
    let mono = |px, py| TestFunction::Monomial { px, py, pt: 0 };
    let mut basis = vec![mono(0, 0), mono(1, 0), mono(2, 0)];
    if grid.dim() == 2 {
        basis.extend([mono(0, 1), mono(0, 2), mono(1, 1)]);
    }
    for (center, half) in spatial_hats(grid) {
        basis.push(TestFunction::Hat { center, half, t_center: 0.0, t_half: 0.0 });
    }
    basis
}
