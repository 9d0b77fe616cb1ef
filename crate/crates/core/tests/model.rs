mod common;

use common::*;
use tariffot::cost::compute_cost_matrix;
use tariffot::example1d::example_spec;
use tariffot::model::{build_grid, validate_problem, CheckStatus, Domain, RateProfile, SpatialWeight};
use tariffot::{DiscreteMeasure, Discretization, DynamicsSpec, Grid, ProblemSpec, TariffSpec};

#[test]
fn grid_descriptors() {
    let g = build_grid(&Domain::Interval { a: 0.0, b: 2.0, n: 201 }).unwrap();
    assert!((g.spacing() - 0.01).abs() < 1e-15);
    assert_eq!(g.interior_nodes().len(), 199);
    let r = build_grid(&Domain::Rectangle { x: [0.0, 1.0], y: [0.0, 1.0], nx: 5, ny: 5 }).unwrap();
    assert_eq!(r.reserve_plus_nodes().len(), 16);
    assert!(build_grid(&Domain::Interval { a: 1.0, b: 1.0, n: 5 }).is_err());
}

#[test]
fn worked_example_validates() {
    let spec = example_spec(RateProfile::Quadratic, 0.0625, 0.0625, 0.05).unwrap();
    let cost = compute_cost_matrix(&spec).unwrap();
    let report = validate_problem(&spec, Some(&cost));
    assert!(report.all_passed(), "{:?}", report.failures().collect::<Vec<_>>());
    assert_eq!(report.get("no-arbitrage").unwrap().status, CheckStatus::Pass);
    // read-only and repeatable
    assert_eq!(report, validate_problem(&spec, Some(&cost)));
    assert_eq!(validate_problem(&spec, None).get("no-arbitrage").unwrap().status, CheckStatus::Skipped);
}

#[test]
fn arbitrage_is_reported() {
    let mut t = TariffSpec::closed(5);
    t.set_export(0, 5.0);
    t.set_import(4, 0.0);
    let spec = line_spec(0.0, 2.0, 5, RateProfile::Linear, vec![0.0; 5], vec![0.0; 5], t);
    let cost = compute_cost_matrix(&spec).unwrap();
    assert_eq!(cost.cost(4, 0), 2.0);
    let report = validate_problem(&spec, Some(&cost));
    let check = report.get("no-arbitrage").unwrap();
    assert_eq!(check.status, CheckStatus::Fail);
}

#[test]
fn one_sided_controls_fail_the_cone_check() {
    let grid = Grid::interval(0.0, 2.0, 5).unwrap();
    let disc = Discretization::new(0.5);
    let d = DynamicsSpec::constant_velocity(vec![[1.0, 0.0]], RateProfile::Linear, SpatialWeight::UNIFORM, &grid, &disc)
        .unwrap();
    let spec =
        ProblemSpec::new(grid, DiscreteMeasure::zeros(5), DiscreteMeasure::zeros(5), TariffSpec::closed(5), d, disc).unwrap();
    let report = validate_problem(&spec, None);
    assert_eq!(report.get("H3 inward cone").unwrap().status, CheckStatus::Fail);
    assert!(!report.all_passed());
}
