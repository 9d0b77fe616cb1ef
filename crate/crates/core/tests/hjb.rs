mod common;

use common::*;
use proptest::prelude::*;
use tariffot::cost::TimeExpandedGraph;
use tariffot::example1d::*;
use tariffot::hjb::*;
use tariffot::model::RateProfile;
use tariffot::pipeline;
use tariffot::{DiscreteMeasure, Discretization, DynamicsSpec, Error, Grid, Monotonicity, ProblemSpec, TariffSpec};

fn quadratic_line(n: usize) -> ProblemSpec {
    line_spec(0.0, 2.0, n, RateProfile::Quadratic, vec![0.0; n], vec![0.0; n], TariffSpec::closed(n))
}

#[test]
fn hamiltonian_of_unit_speed_example() {
    let spec = quadratic_line(5);
    for (t, p) in [(0.0, 0.3), (0.7, -1.2), (1.5, 0.25)] {
        let h = hamiltonian(t, [1.0, 0.0], [p, 0.0], &spec.dynamics);
        assert!((h.value - (p.abs() - t)).abs() < 1e-15);
        // controls are +1, -1
        assert_eq!(h.control, if p > 0.0 { 0 } else { 1 });
    }
    let h = hamiltonian(0.5, [1.0, 0.0], [0.5, 0.0], &spec.dynamics);
    assert_eq!(h.value, 0.0);
    let exp = line_spec(0.0, 2.0, 5, RateProfile::ExpSaturating, vec![0.0; 5], vec![0.0; 5], TariffSpec::closed(5));
    let h = hamiltonian(0.3, [1.0, 0.0], [0.0, 0.0], &exp.dynamics);
    assert!((h.value + (-0.3f64).exp()).abs() < 1e-15 && h.value < 0.0);
    assert_eq!((h.control, h.gap), (0, 0.0));
}

#[test]
fn flat_obstacle_stops_at_once() {
    let spec = quadratic_line(9);
    let field = solve_value_function(&vec![0.0; 9], &spec).unwrap();
    // L = t vanishes at t = 0, so the first move is free but the rest cost
    assert!(field.j.iter().all(|&v| v == 0.0));
    let fb = free_boundary(&field, Monotonicity::Increasing).unwrap();
    assert!(fb.layer.iter().all(|&l| l == Some(0)));
    assert!(matches!(free_boundary(&field, Monotonicity::None), Err(Error::Unsupported(_))));
    assert_eq!(field.tightened_obstacle(), vec![0.0; 9]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn value_matches_enumeration(
        n in 3usize..6,
        steps_2d in 1usize..4,
        steps in 1usize..6,
        profile in prop_oneof![Just(RateProfile::Quadratic), Just(RateProfile::ExpSaturating), Just(RateProfile::Linear)],
        phi in prop::collection::vec(-1.0f64..1.0, 9),
        two_d in any::<bool>(),
    ) {
        let spec = if two_d {
            let grid = Grid::rectangle([0.0, 1.0], [0.0, 1.0], 3, 3).unwrap();
            let disc = Discretization::new(0.5);
            let d = DynamicsSpec::unit_speed_gprime(profile, &grid, &disc).unwrap();
            ProblemSpec::new(grid, DiscreteMeasure::zeros(9), DiscreteMeasure::zeros(9), TariffSpec::closed(9), d, disc).unwrap()
        } else {
            line_spec(0.0, 1.0, n, profile, vec![0.0; n], vec![0.0; n], TariffSpec::closed(n))
        };
        let m = spec.grid.len();
        let steps = if two_d { steps_2d } else { steps };
        let graph = TimeExpandedGraph::with_steps(&spec, steps);
        let field = value_on_graph(&phi[..m], &graph);
        for l in 0..=steps {
            for x in 0..m {
                prop_assert_eq!(field.value(l, x), enumerate_value(&graph, &phi[..m], l, x));
            }
        }
        prop_assert!(field.obstacle_violation() <= 0.0);
        prop_assert_eq!(field.bellman_defect(&graph), 0.0);
    }
}

#[test]
fn convex_example_value_and_boundary() {
    let (pm, pp) = (0.0625, 0.0625);
    let spec = example_spec(RateProfile::Quadratic, pm, pp, 0.01).unwrap();
    let out = pipeline::solve(&spec).unwrap();
    let field = out.value_field();
    assert!(field.obstacle_violation() <= 0.0);
    assert!(field.bellman_defect(out.cost.graph()) == 0.0);
    assert_eq!(field.monotonicity_violation(Monotonicity::Increasing, field.steps).unwrap(), 0.0);
    assert_eq!(field.tightened_obstacle(), out.duals.phi_minus);

    let fb = free_boundary(&field, Monotonicity::Increasing).unwrap();
    let cf = closed_form_example(RateProfile::Quadratic, pm, pp, 0.5).unwrap();
    for y in spec.mu_minus.support() {
        let l = fb.layer[y].unwrap();
        for k in 0..=field.steps {
            let gap = field.value(k, y) - out.duals.phi_minus[y];
            if k < l {
                assert!(gap > CONTACT_TOL);
            } else {
                assert!(gap <= CONTACT_TOL);
            }
        }
    }
    let c = check_free_boundary(&spec, &out.duals.phi_minus, &fb, &cf, 0.01);
    assert!(c.max_err <= 0.02 + 1e-9, "y = {}: {}", c.worst_y, c.max_err);
    assert!(c.excluded.len() <= 1, "{:?}", c.excluded);

    // dual value with the optimal potential equals the LP objective
    let v = out.dual_value_eulerian(&field, &spec).unwrap();
    assert!((v - out.plan.objective).abs() <= 1e-9 * (1.0 + out.plan.objective.abs()));
    // J is fixed, so lowering φ⁻ at one target node is linear
    let y = spec.mu_minus.support()[10];
    let mut lowered = out.duals.phi_minus.clone();
    lowered[y] -= 0.1;
    let v2 = dual_value_eulerian(&field, &lowered, &spec).unwrap();
    assert!((v - v2 - 0.1 * spec.mu_minus.weight(y)).abs() < 1e-12);
    // φ⁻ below the export tariff at 0 makes the candidate infeasible
    lowered[0] = -1.0;
    assert!(matches!(dual_value_eulerian(&field, &lowered, &spec), Err(Error::CandidateInfeasible(_))));
}

#[test]
fn identity_dual_value_is_zero() {
    let mu = vec![0.0, 0.0, 1.0, 0.0, 0.0];
    let spec = line_spec(0.0, 2.0, 5, RateProfile::Quadratic, mu.clone(), mu, TariffSpec::closed(5));
    let out = pipeline::solve(&spec).unwrap();
    let field = out.value_field();
    assert_eq!(out.dual_value_eulerian(&field, &spec).unwrap(), 0.0);
}

#[test]
fn convex_example_flows() {
    let spec = example_spec(RateProfile::Quadratic, 0.0625, 0.0625, 0.01).unwrap();
    // forward from the interior branch: p = g'(1 - x1) = 1/2
    let f = hamiltonian_flow([0.7, 0.0], [0.5, 0.0], &spec, FlowDirection::Forward, 0.0).unwrap();
    assert_eq!(f.stop_reason, StopReason::Transversality);
    assert!((f.stop_time - 0.5).abs() < 1e-9);
    assert!((f.end().x[0] - 1.2).abs() < 1e-9);
    assert!(f.final_h.abs() <= 1e-8);
    // dH/dt = -∂ₜL = -1 along the flow
    for w in f.samples.windows(2) {
        let h0 = hamiltonian(w[0].t, w[0].x, w[0].p, &spec.dynamics).value;
        let h1 = hamiltonian(w[1].t, w[1].x, w[1].p, &spec.dynamics).value;
        if w[1].t > w[0].t + 1e-9 {
            assert!(((h1 - h0) / (w[1].t - w[0].t) + 1.0).abs() < 1e-9);
        }
    }
    // reverse from y = 1.5 at τ⁻¹ = 1/2 lands on 1
    let r = hamiltonian_flow([1.5, 0.0], [0.5, 0.0], &spec, FlowDirection::Reverse, 0.5).unwrap();
    assert_eq!(r.stop_reason, StopReason::Horizon);
    assert!((r.end().x[0] - 1.0).abs() < 1e-12 && r.end().t.abs() < 1e-12);
    // H already negative: stop at once
    let i = hamiltonian_flow([0.7, 0.0], [0.0, 0.0], &spec, FlowDirection::Forward, 0.2).unwrap();
    assert_eq!(i.stop_reason, StopReason::Immediate);
    // export branch runs into the boundary exactly when H reaches 0
    let b = hamiltonian_flow([0.3, 0.0], [-0.5, 0.0], &spec, FlowDirection::Forward, 0.0).unwrap();
    assert_eq!(b.stop_reason, StopReason::Boundary);
    assert!((b.stop_time - 0.3).abs() < 1e-9);
}

#[test]
fn tied_controls_are_a_kink() {
    let grid = Grid::rectangle([0.0, 1.0], [0.0, 1.0], 5, 5).unwrap();
    let disc = Discretization::new(0.25);
    let d = DynamicsSpec::unit_speed_gprime(RateProfile::Quadratic, &grid, &disc).unwrap();
    let spec = ProblemSpec::new(grid, DiscreteMeasure::zeros(25), DiscreteMeasure::zeros(25), TariffSpec::closed(25), d, disc)
        .unwrap();
    let e = hamiltonian_flow([0.5, 0.5], [0.5, 0.5], &spec, FlowDirection::Forward, 0.0).unwrap_err();
    assert!(matches!(e, Error::KinkCrossing { layer: 0, .. }), "{e}");
}

#[test]
fn convex_example_maps() {
    let h = 0.01;
    let spec = example_spec(RateProfile::Quadratic, 0.0625, 0.0625, h).unwrap();
    let out = pipeline::solve(&spec).unwrap();
    let field = out.value_field();
    let maps = transport_maps(&field, &out.duals.phi_minus, &spec).unwrap();
    let (hit, total) = maps.plan_agreement(&out.plan, &spec, 2.0 * h);
    assert!(hit >= 0.99 * total, "{hit} of {total}");
    assert!(maps.transversality_residuals().iter().all(|&r| r <= 1e-8));
    assert!(maps.round_trip_defect(&spec.grid).unwrap() <= 2.0 * h + 1e-9);
    for x in spec.mu_plus.support() {
        let xc = spec.grid.node(x)[0];
        if let Some(e) = &maps.t_plus[x] {
            let end = spec.grid.node(e.node)[0];
            let ok = |expect: f64| (end - expect).abs() <= 2.0 * h + 1e-9;
            // either branch at the split point
            let hit = if (xc - 0.5).abs() <= h { ok(0.0) || ok(xc + 0.5) } else if xc < 0.5 { ok(0.0) } else { ok(xc + 0.5) };
            assert!(hit, "x = {xc}: {end}");
        }
    }
    assert!(maps.skipped_plus.is_empty(), "{:?}", maps.skipped_plus);
}

#[test]
fn concave_example_free_boundary() {
    let pp = concave_demo_p_plus();
    let h = 0.01;
    let spec = example_spec(RateProfile::ExpSaturating, 0.0, pp, h).unwrap();
    let out = pipeline::solve(&spec).unwrap();
    let field = out.value_field();
    let fb = free_boundary(&field, Monotonicity::Decreasing).unwrap();
    assert_eq!(fb.kind, BoundaryKind::Sup);
    let cf = closed_form_example(RateProfile::ExpSaturating, 0.0, pp, 0.5).unwrap();
    let c = check_free_boundary(&spec, &out.duals.phi_minus, &fb, &cf, h);
    assert!(c.max_err <= 2.0 * h + 1e-9, "y = {}: {}", c.worst_y, c.max_err);
    assert!(c.excluded.len() <= 1, "{:?}", c.excluded);
    // the interior map reverses orientation
    let maps = transport_maps(&field, &out.duals.phi_minus, &spec).unwrap();
    for x in spec.mu_plus.support() {
        let xc = spec.grid.node(x)[0];
        if let (Some(e), true) = (&maps.t_plus[x], xc > 0.5 + 2.0 * h) {
            assert!((spec.grid.node(e.node)[0] - (2.0 - xc)).abs() <= 2.0 * h + 1e-9, "x = {xc}");
        }
    }
}

#[test]
fn overlapping_mass_stays_put_when_cost_decreases() {
    let n = 21;
    let mut mu = vec![0.0; n];
    for (i, m) in mu.iter_mut().enumerate().take(15).skip(5) {
        *m = 0.1 + 0.01 * i as f64;
    }
    let grid = Grid::interval(0.0, 2.0, n).unwrap();
    let t = TariffSpec::uniform(&grid, 0.3, -0.1);
    let spec = line_spec_on(grid, RateProfile::ExpSaturating, mu.clone(), mu.clone(), t);
    let out = pipeline::solve(&spec).unwrap();
    let diag: Vec<_> = (5..15).map(|i| (i, i, mu[i])).collect();
    assert_eq!(out.plan.pi, diag);
    let pair = out.eulerian(&spec).unwrap();
    assert!(pair.rho.is_empty());
    assert!(pair.eta.keys().all(|&(l, _)| l == 0));
}
