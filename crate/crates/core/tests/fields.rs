use search_alloc::baseline;
use search_alloc::bench::{collect_rows, run_budget_sweep, summarize, BenchOptions, SolverKind};
use search_alloc::certificate::{build_certificate, verify};
use search_alloc::flowsolver::solve;
use search_alloc::greedy::{check_matroid, check_submodular, greedy_solve};
use search_alloc::model::{objective, BudgetRule};
use search_alloc::scenario::{
    compile_instance, generate_field, AlphaModel, FieldConfig, PriorModel,
};
use std::time::Duration;

fn config(seed: u64) -> FieldConfig {
    FieldConfig {
        num_sensors: 15,
        num_locations: 80,
        radius: 25.0,
        seed,
        ..FieldConfig::default()
    }
}

#[test]
fn field_instances_solve_and_certify() {
    for seed in 0..5 {
        let field = generate_field(&config(seed)).unwrap();
        for budget in [1, 4, 12] {
            let inst = compile_instance(
                &field,
                budget,
                &PriorModel::default(),
                &AlphaModel::default(),
            )
            .unwrap();
            let (schedule, trace) = solve(&inst).unwrap();
            schedule.check_budgets(&inst, BudgetRule::Exact).unwrap();
            let cert = build_certificate(&trace, &inst).unwrap();
            assert!(verify(&schedule, &cert, &inst).pass);
            let flow = objective(&schedule, &inst).unwrap();
            let base = baseline::solve_instance(&inst, None).unwrap().objective;
            assert!(
                (flow - base).abs() <= 1e-9 * flow.max(base),
                "{flow} vs {base}"
            );
        }
    }
}

#[test]
fn heterogeneous_fields_use_the_greedy_path() {
    let hetero = AlphaModel {
        per_arc: true,
        ..AlphaModel::default()
    };
    let field = generate_field(&config(3)).unwrap();
    let inst = compile_instance(&field, 3, &PriorModel::Equal, &hetero).unwrap();
    assert!(!inst.is_homogeneous());
    assert!(solve(&inst).is_err());
    let schedule = greedy_solve(&inst);
    schedule.check_budgets(&inst, BudgetRule::AtMost).unwrap();
    assert!(objective(&schedule, &inst).unwrap() > 0.0);
    assert!(check_submodular(&inst, 200, 1).pass());
    assert!(check_matroid(&inst, 200, 2).pass());
}

#[test]
fn priors_and_alphas_do_not_depend_on_radius() {
    let field = generate_field(&config(9)).unwrap();
    let wider = field.with_radius(40.0).unwrap();
    let a = compile_instance(&field, 2, &PriorModel::default(), &AlphaModel::default()).unwrap();
    let b = compile_instance(&wider, 2, &PriorModel::default(), &AlphaModel::default()).unwrap();
    assert_eq!(a.priors(), b.priors());
    for k in 0..a.num_locations() {
        assert_eq!(a.alpha(k), b.alpha(k));
    }
    assert!(b.num_arcs() >= a.num_arcs());
}

#[test]
fn small_sweep_with_baseline() {
    let opts = BenchOptions {
        reps: 2,
        with_baseline: true,
        min_sample: Duration::ZERO,
        ..BenchOptions::default()
    };
    let rows = collect_rows(|sink| run_budget_sweep(&config(4), &[2, 4], &opts, sink)).unwrap();
    assert_eq!(rows.len(), 8);
    let points = summarize(&rows);
    assert_eq!(points.len(), 4);
    assert!(points.iter().all(|p| p.reps == 2));
    assert_eq!(
        points
            .iter()
            .filter(|p| p.solver == SolverKind::Baseline)
            .count(),
        2
    );
}
