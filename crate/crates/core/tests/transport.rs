mod common;

use common::*;
use proptest::prelude::*;
use tariffot::cost::CostMatrix;
use tariffot::model::RateProfile;
use tariffot::transport::*;
use tariffot::{Error, Grid, ProblemSpec, TariffSpec};

fn check_all(spec: &ProblemSpec, cost: &CostMatrix, plan: &TransportPlan, duals: &DualPotentials) {
    let n = spec.grid.len();
    let scale = 1.0 + plan.objective.abs();
    assert!(relative_gap(plan, duals, spec) <= 1e-9, "gap {} vs {}", plan.objective, duals.objective(spec));
    assert!(duals.max_infeasibility(cost, spec) <= 1e-9 * scale);
    assert!(duals.reserve_order_violation(spec) <= 1e-9 * scale);
    let rows = plan.row_sums(n);
    let cols = plan.col_sums(n);
    for i in 0..n {
        if spec.grid.is_reserve(i) {
            assert!(close(rows[i], plan.xi_plus[i], 1e-9));
            assert!(close(cols[i], plan.xi_minus[i], 1e-9));
        } else {
            assert!(close(rows[i], spec.mu_plus.weight(i), 1e-9), "row {i}");
            assert!(close(cols[i], spec.mu_minus.weight(i), 1e-9), "col {i}");
        }
    }
    assert!(plan.pi.iter().all(|&(x, y, m)| m > 0.0 && !(spec.grid.is_reserve(x) && spec.grid.is_reserve(y))));
    assert!(check_complementary_slackness(plan, duals, cost, spec).holds(1e-8));
}

fn export_only() -> (ProblemSpec, CostMatrix) {
    let mut t = TariffSpec::closed(5);
    t.set_export(0, 0.0);
    t.set_export(4, 0.0);
    with_cost(line_spec(0.0, 2.0, 5, RateProfile::Linear, vec![0.0, 1.0, 0.0, 0.0, 0.0], vec![0.0; 5], t))
}

#[test]
fn export_only_instance() {
    let (spec, cost) = export_only();
    let (plan, duals) = solve_general_reserve(&cost, &spec).unwrap();
    assert!(close(plan.objective, 0.5, 1e-12));
    assert_eq!(plan.pi, vec![(1, 0, 1.0)]);
    assert_eq!(plan.xi_minus[0], 1.0);
    check_all(&spec, &cost, &plan, &duals);
    let d = decompose_plan(&plan, &spec.grid).unwrap();
    assert_eq!(d.pi_ib, plan.pi);
    assert_eq!(d.nu_plus, spec.mu_plus.weights());
    assert!(verify_subproblems(&d, &cost, &spec).unwrap().max_excess() <= 1e-12);
}

#[test]
fn identity_instance() {
    let mu = vec![0.0, 0.0, 1.0, 0.0, 0.0];
    let (spec, cost) =
        with_cost(line_spec(0.0, 2.0, 5, RateProfile::Quadratic, mu.clone(), mu, TariffSpec::closed(5)));
    let (plan, duals) = solve_general_reserve(&cost, &spec).unwrap();
    assert_eq!(plan.pi, vec![(2, 2, 1.0)]);
    assert_eq!(plan.objective, 0.0);
    assert!(plan.xi_plus.iter().chain(&plan.xi_minus).all(|&m| m == 0.0));
    check_all(&spec, &cost, &plan, &duals);
    assert!(close(duals.phi_plus[2], 0.0, 1e-12) && close(duals.phi_minus[2], 0.0, 1e-12));
    let r = check_complementary_slackness(&plan, &duals, &cost, &spec);
    assert_eq!((r.import, r.export), (0.0, 0.0));
    let d = decompose_plan(&plan, &spec.grid).unwrap();
    assert_eq!(d.pi_ii, plan.pi);
    assert!(d.pi_ib.is_empty() && d.pi_bi.is_empty());
}

#[test]
fn split_reserve_roles() {
    // import only at x=0, export only at x=2
    let grid = Grid::interval(0.0, 2.0, 5).unwrap().with_reserves(&[0], &[4]).unwrap();
    let mut t = TariffSpec::closed(5);
    t.set_import(0, 0.25);
    t.set_export(4, -0.25);
    let spec = line_spec_on(grid, RateProfile::Linear, vec![0.0, 2.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 0.5, 1.0, 0.0], t);
    let (spec, cost) = with_cost(spec);
    let (plan, duals) = solve_general_reserve(&cost, &spec).unwrap();
    check_all(&spec, &cost, &plan, &duals);
    assert!(plan.xi_plus.iter().enumerate().all(|(i, &m)| i == 0 || m == 0.0));
    assert!(plan.xi_minus.iter().enumerate().all(|(i, &m)| i == 4 || m == 0.0));
    // 1.5 units go to targets, 0.5 leave through x=2 for 1.5 + 0.25
    let oracle = vertex_oracle(&spec, &cost).unwrap();
    assert!(close(plan.objective, oracle, 1e-9), "{} vs {oracle}", plan.objective);
    assert!(close(plan.objective, 0.5 * 0.5 + 1.0 * 1.0 + 0.5 * 1.75, 1e-12));
}

#[test]
fn no_sink_is_infeasible() {
    let grid = Grid::interval(0.0, 2.0, 5).unwrap().with_reserves(&[0, 4], &[]).unwrap();
    let mut t = TariffSpec::closed(5);
    t.set_import(0, 0.0);
    let spec = line_spec_on(grid, RateProfile::Linear, vec![0.0, 2.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0, 0.0], t);
    let (spec, cost) = with_cost(spec);
    assert!(matches!(solve_primal(&cost, &spec), Err(Error::Infeasible(_))));
}

#[test]
fn unbalanced_without_reserve() {
    let (spec, cost) = with_cost(line_spec(
        0.0,
        2.0,
        5,
        RateProfile::Linear,
        vec![0.0, 2.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0, 0.0],
        TariffSpec::closed(5),
    ));
    match solve_primal(&cost, &spec) {
        Err(Error::Infeasible(m)) => assert_eq!(m, "unbalanced problem without reserve"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn arbitrage_is_rejected() {
    let mut t = TariffSpec::closed(5);
    t.set_import(0, 0.0);
    t.set_export(4, 5.0);
    let (spec, cost) =
        with_cost(line_spec(0.0, 2.0, 5, RateProfile::Linear, vec![0.0, 1.0, 0.0, 0.0, 0.0], vec![0.0; 5], t));
    assert!(matches!(solve_primal(&cost, &spec), Err(Error::NoArbitrage { import: 0, export: 4, .. })));
}

#[test]
fn swapped_plan_breaks_slackness() {
    let mu_p = vec![0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0];
    let mu_m = vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0];
    let (spec, cost) =
        with_cost(line_spec(0.0, 3.0, 7, RateProfile::Quadratic, mu_p, mu_m, TariffSpec::closed(7)));
    let (plan, duals) = solve_general_reserve(&cost, &spec).unwrap();
    assert!(check_complementary_slackness(&plan, &duals, &cost, &spec).holds(1e-8));
    // quadratic cost is strictly convex in distance: monotone is optimal, crossing is not
    assert_eq!(plan.pi, vec![(1, 4, 1.0), (2, 5, 1.0)]);
    let swapped = TransportPlan::from_couplings(vec![(1, 5, 1.0), (2, 4, 1.0)], &cost, &spec);
    assert!(swapped.objective > plan.objective);
    let r = check_complementary_slackness(&swapped, &duals, &cost, &spec);
    assert!(r.support > 1e-3, "{r:?}");
}

#[test]
fn symmetric_selectors_take_lowest_index() {
    let (spec, cost) = with_cost(line_spec(
        0.0,
        2.0,
        5,
        RateProfile::Linear,
        vec![0.0; 5],
        vec![0.0; 5],
        TariffSpec::uniform(&Grid::interval(0.0, 2.0, 5).unwrap(), 0.5, -0.5),
    ));
    let s = boundary_selectors(&cost, &spec).unwrap();
    assert_eq!(s.t_ib[2], Some(0));
    assert_eq!(s.t_bi[2], Some(0));
    assert_eq!(s.t_ib[3], Some(4));
    assert!(boundary_selectors(&cost, &ProblemSpec { tariffs: TariffSpec::closed(5), ..spec }).is_err());
}

#[test]
fn bb_mass_is_a_contract_violation() {
    let (spec, cost) = export_only();
    let plan = TransportPlan::from_couplings(vec![(0, 4, 1.0)], &cost, &spec);
    assert!(matches!(decompose_plan(&plan, &spec.grid), Err(Error::Invariant(_))));
}

#[test]
fn recover_dual_needs_a_solved_plan() {
    let (spec, cost) = export_only();
    let plan = TransportPlan::from_couplings(vec![(1, 0, 1.0)], &cost, &spec);
    assert!(recover_dual(&plan, &cost, &spec).is_err());
}

fn random_instance(
    n: usize,
    profile: RateProfile,
    mu_p: Vec<u8>,
    mu_m: Vec<u8>,
    tariffs: (u8, u8, u8, u8),
    open: bool,
) -> (ProblemSpec, CostMatrix) {
    let grid = Grid::interval(0.0, 1.0, n).unwrap();
    let quarter = |v: u8| v as f64 / 4.0;
    let mut plus = vec![0.0; n];
    let mut minus = vec![0.0; n];
    for i in 1..n - 1 {
        plus[i] = quarter(mu_p[i % mu_p.len()]);
        minus[i] = quarter(mu_m[(i * 7) % mu_m.len()]);
    }
    if !open {
        // balance by topping up the lighter side on the first interior node
        let d: f64 = plus.iter().sum::<f64>() - minus.iter().sum::<f64>();
        if d > 0.0 {
            minus[1] += d;
        } else {
            plus[1] -= d;
        }
    }
    let mut t = TariffSpec::closed(n);
    if open {
        // ψ⁻ ≤ 0 ≤ ψ⁺ rules out arbitrage
        t.set_import(0, quarter(tariffs.0) / 4.0);
        t.set_import(n - 1, quarter(tariffs.1) / 4.0);
        t.set_export(0, -quarter(tariffs.2) / 4.0);
        t.set_export(n - 1, -quarter(tariffs.3) / 4.0);
    }
    with_cost(line_spec_on(grid, profile, plus, minus, t))
}

fn profile_strategy() -> impl Strategy<Value = RateProfile> {
    prop_oneof![Just(RateProfile::Linear), Just(RateProfile::Quadratic), Just(RateProfile::ExpSaturating)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn duality_and_feasibility(
        n in 4usize..12,
        profile in profile_strategy(),
        mu_p in prop::collection::vec(0u8..5, 1..6),
        mu_m in prop::collection::vec(0u8..5, 1..6),
        tariffs in (0u8..5, 0u8..5, 0u8..5, 0u8..5),
        open in any::<bool>(),
    ) {
        let (spec, cost) = random_instance(n, profile, mu_p, mu_m, tariffs, open);
        let (plan, duals) = solve_general_reserve(&cost, &spec).unwrap();
        check_all(&spec, &cost, &plan, &duals);
        let d = decompose_plan(&plan, &spec.grid).unwrap();
        prop_assert!(verify_subproblems(&d, &cost, &spec).unwrap().max_excess() <= 1e-9 * (1.0 + plan.objective.abs()));
        for i in 0..n {
            prop_assert!(d.nu_plus[i] <= spec.mu_plus.weight(i) + 1e-12);
            prop_assert!(d.nu_minus[i] <= spec.mu_minus.weight(i) + 1e-12);
        }
        // pruning soundness and pivot-rule independence
        let full = solve_primal_with(&cost, &spec, LpOptions { include_reserve_pairs: true, ..Default::default() }).unwrap();
        prop_assert!((full.objective - plan.objective).abs() <= 1e-9 * (1.0 + plan.objective.abs()));
        let bland = solve_primal_with(&cost, &spec, LpOptions { pivot: PivotRule::Bland, ..Default::default() }).unwrap();
        prop_assert!((bland.objective - plan.objective).abs() <= 1e-9 * (1.0 + plan.objective.abs()));
    }

    #[test]
    fn matches_vertex_enumeration(
        profile in profile_strategy(),
        mu_p in prop::collection::vec(0u8..5, 3),
        mu_m in prop::collection::vec(0u8..5, 3),
        tariffs in (0u8..5, 0u8..5, 0u8..5, 0u8..5),
        open in any::<bool>(),
    ) {
        // 3 interior nodes and 2 reserve nodes
        let (spec, cost) = random_instance(5, profile, mu_p, mu_m, tariffs, open);
        let plan = solve_primal(&cost, &spec).unwrap();
        let oracle = vertex_oracle(&spec, &cost).unwrap_or(0.0);
        prop_assert!((plan.objective - oracle).abs() <= 1e-9, "{} vs {}", plan.objective, oracle);
    }

    #[test]
    fn scaling_covariance(
        n in 4usize..10,
        mu_p in prop::collection::vec(0u8..5, 1..6),
        mu_m in prop::collection::vec(0u8..5, 1..6),
        tariffs in (0u8..5, 0u8..5, 0u8..5, 0u8..5),
        lambda in 0.1f64..10.0,
    ) {
        let (spec, cost) = random_instance(n, RateProfile::Quadratic, mu_p, mu_m, tariffs, true);
        let scaled = spec.scaled(lambda).unwrap();
        let a = solve_primal(&cost, &spec).unwrap();
        let b = solve_primal(&cost, &scaled).unwrap();
        let tol = 1e-9 * (1.0 + a.objective.abs()) * lambda.max(1.0);
        prop_assert!((b.objective - lambda * a.objective).abs() <= tol);
    }
}

#[test]
fn scaling_keeps_potentials_on_nondegenerate_instance() {
    let mut t = TariffSpec::closed(6);
    t.set_import(5, 0.3);
    t.set_export(0, -0.1);
    let (spec, cost) = with_cost(line_spec(
        0.0,
        1.0,
        6,
        RateProfile::Quadratic,
        vec![0.0, 1.0, 0.5, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 0.25, 1.5, 0.0],
        t,
    ));
    let (a, da) = solve_general_reserve(&cost, &spec).unwrap();
    let scaled = spec.scaled(3.0).unwrap();
    let (b, db) = solve_general_reserve(&cost, &scaled).unwrap();
    assert!(close(b.objective, 3.0 * a.objective, 1e-12));
    for (&(x, y, m), &(x2, y2, m2)) in a.pi.iter().zip(&b.pi) {
        assert_eq!((x, y), (x2, y2));
        assert!(close(m2, 3.0 * m, 1e-12));
    }
    for i in 0..6 {
        assert!(close(da.phi_plus[i], db.phi_plus[i], 1e-12));
        assert!(close(da.phi_minus[i], db.phi_minus[i], 1e-12));
    }
}
