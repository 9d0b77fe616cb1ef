//! CSV records for every pipeline stage and the SVG figure renderer.
//!
//! Each record type reads back with [`read_csv`], so `render` can work from
//! files written by earlier runs.

mod svg;

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cost::CostMatrix;
use crate::eulerian::{EulerianPair, WeakResidualReport};
use crate::hjb::{FlowTrajectory, FreeBoundary, StopReason, TransportMaps, ValueField, CONTACT_TOL};
use crate::model::{Grid, ProblemSpec};
use crate::transport::{DualPotentials, TransportPlan};
use crate::Result;

pub use svg::{render_svg, RenderData};

pub fn write_csv_to<W: Write, T: Serialize>(w: W, records: &[T]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_csv<T: Serialize>(path: impl AsRef<Path>, records: &[T]) -> Result<()> {
    write_csv_to(File::create(path)?, records)
}

pub fn read_csv<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRecord {
    pub src: usize,
    pub dst: usize,
    pub src_x: f64,
    pub src_y: f64,
    pub dst_x: f64,
    pub dst_y: f64,
    pub cost: f64,
    pub tau: f64,
}

pub fn cost_records(cost: &CostMatrix, grid: &Grid) -> Vec<CostRecord> {
    let n = grid.len();
    let mut out = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let (a, b) = (grid.node(x), grid.node(y));
            out.push(CostRecord {
                src: x,
                dst: y,
                src_x: a[0],
                src_y: a[1],
                dst_x: b[0],
                dst_y: b[1],
                cost: cost.cost(x, y),
                tau: cost.tau(x, y),
            });
        }
    }
    out
}

/// `leg` is `ii` (interior to interior), `ib` (exported) or `bi` (imported).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRecord {
    pub src: usize,
    pub dst: usize,
    pub src_x: f64,
    pub src_y: f64,
    pub dst_x: f64,
    pub dst_y: f64,
    pub mass: f64,
    pub leg: String,
}

pub fn plan_records(plan: &TransportPlan, grid: &Grid) -> Vec<PlanRecord> {
    plan.pi
        .iter()
        .map(|&(x, y, m)| {
            let (a, b) = (grid.node(x), grid.node(y));
            let leg = match (grid.is_interior(x), grid.is_interior(y)) {
                (true, true) => "ii",
                (true, false) => "ib",
                (false, true) => "bi",
                (false, false) => "bb",
            };
            PlanRecord { src: x, dst: y, src_x: a[0], src_y: a[1], dst_x: b[0], dst_y: b[1], mass: m, leg: leg.into() }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualRecord {
    pub node: usize,
    pub x: f64,
    pub y: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub phi_plus: f64,
    pub phi_minus: f64,
}

pub fn dual_records(duals: &DualPotentials, spec: &ProblemSpec) -> Vec<DualRecord> {
    (0..spec.grid.len())
        .map(|i| {
            let p = spec.grid.node(i);
            DualRecord {
                node: i,
                x: p[0],
                y: p[1],
                mu_plus: spec.mu_plus.weight(i),
                mu_minus: spec.mu_minus.weight(i),
                phi_plus: duals.phi_plus[i],
                phi_minus: duals.phi_minus[i],
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoRecord {
    pub layer: usize,
    pub t: f64,
    pub node: usize,
    pub x: f64,
    pub y: f64,
    pub control: usize,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaRecord {
    pub layer: usize,
    pub t: f64,
    pub node: usize,
    pub x: f64,
    pub y: f64,
    pub mass: f64,
}

pub fn rho_records(pair: &EulerianPair, grid: &Grid) -> Vec<RhoRecord> {
    let mut out = vec![];
    for (l, layer) in pair.rho.iter().enumerate() {
        for (&(node, control), &mass) in layer {
            let p = grid.node(node);
            out.push(RhoRecord { layer: l, t: l as f64 * pair.dt, node, x: p[0], y: p[1], control, mass });
        }
    }
    out
}

pub fn eta_records(pair: &EulerianPair, grid: &Grid) -> Vec<EtaRecord> {
    pair.eta
        .iter()
        .map(|(&(l, node), &mass)| {
            let p = grid.node(node);
            EtaRecord { layer: l, t: l as f64 * pair.dt, node, x: p[0], y: p[1], mass }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub kind: String,
    pub function: String,
    pub residual: f64,
    pub bound: f64,
}

pub fn residual_records(kind: &str, report: &WeakResidualReport) -> Vec<ResidualRecord> {
    (0..report.names.len())
        .map(|k| ResidualRecord {
            kind: kind.into(),
            function: report.names[k].clone(),
            residual: report.residuals[k],
            bound: report.bounds[k],
        })
        .collect()
}

/// `contact` marks `J − φ⁻ ≤` [`CONTACT_TOL`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueRecord {
    pub layer: usize,
    pub t: f64,
    pub node: usize,
    pub x: f64,
    pub y: f64,
    pub j: f64,
    pub phi_minus: f64,
    pub contact: bool,
}

pub fn value_records(field: &ValueField, phi_minus: &[f64], grid: &Grid) -> Vec<ValueRecord> {
    let mut out = Vec::with_capacity(field.j.len());
    for l in 0..=field.steps {
        for i in 0..field.nodes {
            let p = grid.node(i);
            let j = field.value(l, i);
            out.push(ValueRecord {
                layer: l,
                t: field.time(l),
                node: i,
                x: p[0],
                y: p[1],
                j,
                phi_minus: phi_minus[i],
                contact: j - phi_minus[i] <= CONTACT_TOL,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeBoundaryRecord {
    pub node: usize,
    pub x: f64,
    pub y: f64,
    pub layer: Option<usize>,
    pub tau_inv: Option<f64>,
}

/// Free boundary at the nodes in `nodes` (usually `supp μ⁻`).
pub fn free_boundary_records(fb: &FreeBoundary, grid: &Grid, nodes: &[usize]) -> Vec<FreeBoundaryRecord> {
    nodes
        .iter()
        .map(|&i| {
            let p = grid.node(i);
            FreeBoundaryRecord { node: i, x: p[0], y: p[1], layer: fb.layer[i], tau_inv: fb.tau_inv(i) }
        })
        .collect()
}

/// One row per flow sample; `flow` numbers the trajectories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowRecord {
    pub flow: usize,
    pub direction: String,
    pub seed: usize,
    pub end: usize,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub px: f64,
    pub py: f64,
    pub stop_reason: String,
}

pub fn stop_reason_name(r: StopReason) -> &'static str {
    match r {
        StopReason::Transversality => "transversality",
        StopReason::Immediate => "immediate",
        StopReason::Boundary => "boundary",
        StopReason::Horizon => "horizon",
    }
}

fn push_flow(out: &mut Vec<FlowRecord>, id: usize, direction: &str, seed: usize, end: usize, f: &FlowTrajectory) {
    for s in &f.samples {
        out.push(FlowRecord {
            flow: id,
            direction: direction.into(),
            seed,
            end,
            t: s.t,
            x: s.x[0],
            y: s.x[1],
            px: s.p[0],
            py: s.p[1],
            stop_reason: stop_reason_name(f.stop_reason).into(),
        });
    }
}

/// Forward flows of `T⁺` followed by reverse flows of `T⁻`.
pub fn flow_records(maps: &TransportMaps) -> Vec<FlowRecord> {
    let mut out = vec![];
    let mut id = 0;
    for (dir, map) in [("forward", &maps.t_plus), ("reverse", &maps.t_minus)] {
        for (seed, e) in map.iter().enumerate() {
            if let Some(e) = e {
                push_flow(&mut out, id, dir, seed, e.node, &e.flow);
                id += 1;
            }
        }
    }
    out
}
