//! Problem files: JSON with top-level keys `grid`, `mu_plus`, `mu_minus`,
//! `tariffs`, `dynamics` and `discretization`.
//!
//! ```json
//! {
//!   "grid": { "kind": "interval", "a": 0, "b": 2, "n": 201 },
//!   "mu_plus": { "kind": "uniform", "lo": 0, "hi": 0.995, "density": 1 },
//!   "mu_minus": { "kind": "atoms", "atoms": [{ "at": 1.5, "mass": 0.2 }] },
//!   "tariffs": { "psi_minus": [{ "node": 0, "value": -0.0625 }] },
//!   "dynamics": { "name": "unit_speed_gprime", "g": "quadratic" },
//!   "discretization": { "dt": 0.01 }
//! }
//! ```
//!
//! Measures are `uniform` (interior nodes in the box `[lo, hi]`, given a
//! `total` or a `density` per unit length or area), `atoms`, `weights` (one
//! entry per node) or `zero`. Tariff entries address a node by index or by
//! coordinate; nodes without an entry are closed. Every error carries the
//! line and column it refers to.

use serde::{de, Deserialize, Deserializer};
use serde_json::value::RawValue;

use crate::model::{DiscreteMeasure, Discretization, DynamicsSpec, Grid, Point, RateProfile, TariffSpec};
use crate::{Error, ProblemSpec, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Sections<'a> {
    #[serde(borrow)]
    grid: Option<&'a RawValue>,
    #[serde(borrow)]
    mu_plus: Option<&'a RawValue>,
    #[serde(borrow)]
    mu_minus: Option<&'a RawValue>,
    #[serde(borrow)]
    tariffs: Option<&'a RawValue>,
    #[serde(borrow)]
    dynamics: Option<&'a RawValue>,
    #[serde(borrow)]
    discretization: Option<&'a RawValue>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum GridConfig {
    Interval {
        a: f64,
        b: f64,
        n: usize,
        reserve_plus: Option<Vec<usize>>,
        reserve_minus: Option<Vec<usize>>,
    },
    Rectangle {
        x: [f64; 2],
        y: [f64; 2],
        nx: usize,
        ny: usize,
        reserve_plus: Option<Vec<usize>>,
        reserve_minus: Option<Vec<usize>>,
    },
}

/// A coordinate: a bare number in 1-D, a pair in 2-D.
#[derive(Deserialize, Clone, Copy)]
#[serde(untagged)]
enum Coord {
    Scalar(f64),
    Pair([f64; 2]),
}

impl Coord {
    fn point(self) -> Point {
        match self {
            Coord::Scalar(x) => [x, 0.0],
            Coord::Pair(p) => p,
        }
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum MeasureConfig {
    Uniform { lo: Coord, hi: Coord, total: Option<Mass>, density: Option<Mass> },
    Atoms { atoms: Vec<Atom> },
    Weights {
        #[serde(deserialize_with = "masses")]
        weights: Vec<f64>,
    },
    Zero {},
}

/// Finite nonnegative mass.
#[derive(Clone, Copy)]
struct Mass(f64);

impl<'de> Deserialize<'de> for Mass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Mass, D::Error> {
        let v = f64::deserialize(d)?;
        if v.is_finite() && v >= 0.0 {
            Ok(Mass(v))
        } else {
            Err(de::Error::custom(format!("mass must be finite and nonnegative, got {v}")))
        }
    }
}

fn masses<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
    let w = Vec::<f64>::deserialize(d)?;
    match w.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        Some(i) => Err(de::Error::custom(format!("negative mass {} at node {i}", w[i]))),
        None => Ok(w),
    }
}

/// A node given by index or by coordinate.
#[derive(Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
struct Site {
    node: Option<usize>,
    at: Option<Coord>,
}

#[derive(Clone, Copy)]
struct Atom {
    site: Site,
    mass: f64,
}

impl<'de> Deserialize<'de> for Atom {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Atom, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            node: Option<usize>,
            at: Option<Coord>,
            mass: f64,
        }
        let r = Raw::deserialize(d)?;
        if !(r.mass.is_finite() && r.mass >= 0.0) {
            let place = match (r.node, r.at) {
                (Some(i), _) => format!("node {i}"),
                (None, Some(c)) => format!("coordinate {:?}", c.point()),
                (None, None) => "an unaddressed atom".into(),
            };
            return Err(de::Error::custom(format!("negative mass {} at {place}", r.mass)));
        }
        Ok(Atom { site: Site { node: r.node, at: r.at }, mass: r.mass })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TariffConfig {
    #[serde(default)]
    psi_plus: Vec<TariffEntry>,
    #[serde(default)]
    psi_minus: Vec<TariffEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TariffEntry {
    node: Option<usize>,
    at: Option<Coord>,
    value: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DynamicsConfig {
    name: String,
    g: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscretizationConfig {
    dt: f64,
    #[serde(default = "one")]
    t_max_factor: f64,
    delta: Option<f64>,
}

fn one() -> f64 {
    1.0
}

/// A section of the input together with where it starts.
struct Section<'a> {
    key: &'static str,
    raw: &'a RawValue,
    line: usize,
    column: usize,
}

impl<'a> Section<'a> {
    fn locate(text: &str, key: &'static str, raw: &'a RawValue) -> Section<'a> {
        let offset = (raw.get().as_ptr() as usize).saturating_sub(text.as_ptr() as usize).min(text.len());
        let before = &text[..offset];
        let line = before.matches('\n').count() + 1;
        let column = offset - before.rfind('\n').map_or(0, |p| p + 1) + 1;
        Section { key, raw, line, column }
    }

    fn parse<T: Deserialize<'a>>(&self) -> Result<T> {
        serde_json::from_str(self.raw.get()).map_err(|e| {
            let (line, column) = if e.line() <= 1 {
                (self.line, self.column + e.column().saturating_sub(1))
            } else {
                (self.line + e.line() - 1, e.column())
            };
            let msg = e.to_string();
            let msg = msg.rsplit_once(" at line ").map_or(msg.as_str(), |(m, _)| m);
            Error::Parse(format!("{}: {msg} at line {line} column {column}", self.key))
        })
    }

    /// Error about the section as a whole, placed at its start.
    fn error(&self, msg: impl std::fmt::Display) -> Error {
        Error::Parse(format!("{}: {msg} at line {} column {}", self.key, self.line, self.column))
    }
}

fn section<'a>(text: &str, key: &'static str, raw: Option<&'a RawValue>) -> Result<Section<'a>> {
    raw.map(|r| Section::locate(text, key, r)).ok_or_else(|| Error::Parse(format!("missing key: {key}")))
}

/// Parses a problem file. The result is either a complete, validated
/// [`ProblemSpec`] or an error; nothing is returned half built.
pub fn parse_config(text: &str) -> Result<ProblemSpec> {
    let body = if text.trim().is_empty() { "{}" } else { text };
    let sections: Sections = serde_json::from_str(body).map_err(|e| Error::Parse(e.to_string()))?;
    let text = body;
    // check presence in schema order so the first missing key is reported
    let grid_s = section(text, "grid", sections.grid)?;
    let plus_s = section(text, "mu_plus", sections.mu_plus)?;
    let minus_s = section(text, "mu_minus", sections.mu_minus)?;
    let tariff_s = section(text, "tariffs", sections.tariffs)?;
    let dyn_s = section(text, "dynamics", sections.dynamics)?;
    let disc_s = section(text, "discretization", sections.discretization)?;

    let grid = build(&grid_s, grid_s.parse()?)?;
    let mu_plus = measure(&plus_s, &grid, plus_s.parse()?)?;
    let mu_minus = measure(&minus_s, &grid, minus_s.parse()?)?;
    let tariffs = tariffs(&tariff_s, &grid, tariff_s.parse()?)?;
    let d: DiscretizationConfig = disc_s.parse()?;
    for (name, v) in [("dt", Some(d.dt)), ("t_max_factor", Some(d.t_max_factor)), ("delta", d.delta)] {
        if let Some(v) = v {
            if !(v.is_finite() && v > 0.0) {
                return Err(disc_s.error(format!("{name} must be positive, got {v}")));
            }
        }
    }
    let disc = Discretization { dt: d.dt, t_max_factor: d.t_max_factor, delta: d.delta };
    let dc: DynamicsConfig = dyn_s.parse()?;
    if dc.name != "unit_speed_gprime" {
        return Err(dyn_s.error(format!("unknown dynamics '{}' (built in: unit_speed_gprime)", dc.name)));
    }
    let profile = RateProfile::from_name(&dc.g).ok_or_else(|| {
        dyn_s.error(format!("unknown g '{}' (expected quadratic, exp_saturating or linear)", dc.g))
    })?;
    let dynamics = DynamicsSpec::unit_speed_gprime(profile, &grid, &disc).map_err(|e| dyn_s.error(e))?;
    ProblemSpec::new(grid, mu_plus, mu_minus, tariffs, dynamics, disc).map_err(|e| Error::Parse(e.to_string()))
}

fn build(s: &Section, g: GridConfig) -> Result<Grid> {
    let (grid, plus, minus) = match g {
        GridConfig::Interval { a, b, n, reserve_plus, reserve_minus } => {
            (Grid::interval(a, b, n), reserve_plus, reserve_minus)
        }
        GridConfig::Rectangle { x, y, nx, ny, reserve_plus, reserve_minus } => {
            (Grid::rectangle(x, y, nx, ny), reserve_plus, reserve_minus)
        }
    };
    let grid = grid.map_err(|e| s.error(e))?;
    if plus.is_none() && minus.is_none() {
        return Ok(grid);
    }
    let plus = plus.unwrap_or_else(|| grid.reserve_plus_nodes());
    let minus = minus.unwrap_or_else(|| grid.reserve_minus_nodes());
    grid.with_reserves(&plus, &minus).map_err(|e| s.error(e))
}

fn resolve(s: &Section, grid: &Grid, node: Option<usize>, at: Option<Coord>) -> Result<usize> {
    match (node, at) {
        (Some(i), None) if i < grid.len() => Ok(i),
        (Some(i), None) => Err(s.error(format!("node {i} is out of range (grid has {} nodes)", grid.len()))),
        (None, Some(c)) => {
            grid.snap(c.point()).ok_or_else(|| s.error(format!("coordinate {:?} lies outside the grid", c.point())))
        }
        _ => Err(s.error("give exactly one of 'node' and 'at'")),
    }
}

fn measure(s: &Section, grid: &Grid, m: MeasureConfig) -> Result<DiscreteMeasure> {
    let n = grid.len();
    let mu = match m {
        MeasureConfig::Zero {} => Ok(DiscreteMeasure::zeros(n)),
        MeasureConfig::Weights { weights } => {
            if weights.len() != n {
                return Err(s.error(format!("weights has {} entries, grid has {n} nodes", weights.len())));
            }
            DiscreteMeasure::new(weights)
        }
        MeasureConfig::Atoms { atoms } => {
            let mut w = vec![0.0; n];
            for a in atoms {
                w[resolve(s, grid, a.site.node, a.site.at)?] += a.mass;
            }
            DiscreteMeasure::new(w)
        }
        MeasureConfig::Uniform { lo, hi, total, density } => {
            let (lo, hi) = (lo.point(), hi.point());
            let shape = DiscreteMeasure::uniform(grid, lo, hi, 1.0).map_err(|e| s.error(e))?;
            match (total, density) {
                (Some(t), None) => DiscreteMeasure::uniform(grid, lo, hi, t.0),
                (None, Some(rho)) => {
                    let cell: f64 = (0..grid.dim()).map(|a| grid.axis_spacing(a)).product();
                    let w = shape.weights().iter().map(|&w| if w > 0.0 { rho.0 * cell } else { 0.0 }).collect();
                    DiscreteMeasure::new(w)
                }
                _ => return Err(s.error("uniform measure needs exactly one of 'total' and 'density'")),
            }
        }
    };
    let mu = mu.map_err(|e| s.error(e))?;
    if let Some(i) = mu.support().into_iter().find(|&i| !grid.is_interior(i)) {
        return Err(s.error(format!("mass on reserve node {i} at {}", grid.label(i))));
    }
    Ok(mu)
}

fn tariffs(s: &Section, grid: &Grid, t: TariffConfig) -> Result<TariffSpec> {
    let mut out = TariffSpec::closed(grid.len());
    for e in &t.psi_plus {
        let i = resolve(s, grid, e.node, e.at)?;
        if !e.value.is_finite() {
            return Err(s.error(format!("psi_plus at node {i} must be finite; omit the entry to close the node")));
        }
        if !grid.in_reserve_plus(i) {
            return Err(s.error(format!("psi_plus on node {i}, which is not an import node")));
        }
        out.set_import(i, e.value);
    }
    for e in &t.psi_minus {
        let i = resolve(s, grid, e.node, e.at)?;
        if !e.value.is_finite() {
            return Err(s.error(format!("psi_minus at node {i} must be finite; omit the entry to close the node")));
        }
        if !grid.in_reserve_minus(i) {
            return Err(s.error(format!("psi_minus on node {i}, which is not an export node")));
        }
        out.set_export(i, e.value);
    }
    Ok(out)
}
