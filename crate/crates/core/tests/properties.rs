mod common;

use common::{random_instance, relative_gap, Shape, MEDIUM, TINY};
use proptest::prelude::*;
use search_alloc::baseline::{self, brute_force};
use search_alloc::certificate::{build_certificate, verify, Violation};
use search_alloc::flowsolver::{solve, solve_instrumented, SolveTrace, TraceEvent};
use search_alloc::format::{
    instance_to_file, parse_instance, schedule_from_file, schedule_to_file, IdMap,
};
use search_alloc::greedy::{greedy_solve, naive_greedy};
use search_alloc::model::{objective, BudgetRule};

const HETERO_TINY: Shape = Shape {
    heterogeneous: true,
    ..TINY
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flow_matches_brute_force(seed in any::<u64>()) {
        let inst = random_instance(TINY, seed);
        let (schedule, _) = solve(&inst).unwrap();
        let (_, best) = brute_force(&inst).unwrap();
        let got = objective(&schedule, &inst).unwrap();
        prop_assert!(relative_gap(got, best) <= 1e-12, "{got} vs {best}");
    }

    #[test]
    fn flow_schedule_spends_every_budget(seed in any::<u64>()) {
        let inst = random_instance(MEDIUM, seed);
        let (schedule, _) = solve(&inst).unwrap();
        prop_assert!(schedule.check_budgets(&inst, BudgetRule::Exact).is_ok());
    }

    #[test]
    fn flow_matches_network_baseline(seed in any::<u64>()) {
        let inst = random_instance(MEDIUM, seed);
        let (schedule, _) = solve(&inst).unwrap();
        let flow = objective(&schedule, &inst).unwrap();
        let base = baseline::solve_instance(&inst, None).unwrap().objective;
        prop_assert!(relative_gap(flow, base) <= 1e-9, "{flow} vs {base}");
    }

    #[test]
    fn certificate_always_verifies(seed in any::<u64>()) {
        let inst = random_instance(MEDIUM, seed);
        let (schedule, trace) = solve(&inst).unwrap();
        let cert = build_certificate(&trace, &inst).unwrap();
        let verdict = verify(&schedule, &cert, &inst);
        prop_assert!(verdict.pass, "{:?}", verdict.violations);
    }

    #[test]
    fn moving_one_unit_breaks_the_certificate_or_keeps_the_value(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let inst = random_instance(TINY, seed);
        let (schedule, trace) = solve(&inst).unwrap();
        let cert = build_certificate(&trace, &inst).unwrap();
        let used: Vec<usize> = (0..inst.num_arcs()).filter(|&a| schedule.count(a) > 0).collect();
        let from = used[pick.index(used.len())];
        let agent = inst.arc(from).agent;
        for to in inst.agent_arcs(agent).filter(|&a| a != from) {
            let mut moved = schedule.clone();
            moved.set(from, moved.count(from) - 1);
            moved.add(to, 1);
            let verdict = verify(&moved, &cert, &inst);
            let value = objective(&moved, &inst).unwrap();
            let optimal = objective(&schedule, &inst).unwrap();
            // A moved unit either keeps an optimal value or is rejected.
            prop_assert!(!verdict.pass || relative_gap(value, optimal) <= 1e-12);
        }
    }

    #[test]
    fn extracted_values_never_increase_between_eliminations(seed in any::<u64>()) {
        let inst = random_instance(MEDIUM, seed);
        let (_, trace) = solve(&inst).unwrap();
        let values: Vec<f64> = trace.extracted_values().collect();
        prop_assert!(values.windows(2).all(|w| w[1] <= w[0]));
        let elims: Vec<f64> = trace.eliminations().map(|(_, _, v)| v).collect();
        prop_assert!(elims.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn lazy_greedy_equals_naive(seed in any::<u64>()) {
        let inst = random_instance(HETERO_TINY, seed);
        let lazy = greedy_solve(&inst);
        let naive = naive_greedy(&inst);
        let (a, b) = (objective(&lazy, &inst).unwrap(), objective(&naive, &inst).unwrap());
        prop_assert!(relative_gap(a, b) <= 1e-12, "{a} vs {b}");
    }

    #[test]
    fn greedy_is_within_half_of_optimum(seed in any::<u64>()) {
        let inst = random_instance(HETERO_TINY, seed);
        let g = objective(&greedy_solve(&inst), &inst).unwrap();
        let (_, opt) = brute_force(&inst).unwrap();
        prop_assert!(g >= 0.5 * opt - 1e-12 && g <= opt + 1e-12);
    }

    #[test]
    fn instance_and_schedule_files_round_trip(seed in any::<u64>(), hetero in any::<bool>()) {
        let shape = Shape { heterogeneous: hetero, ..TINY };
        let inst = random_instance(shape, seed);
        let ids = IdMap::sequential(&inst);
        let text = serde_json::to_string(&instance_to_file(&inst, &ids)).unwrap();
        let (back, back_ids) = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(&back_ids, &ids);

        let schedule = greedy_solve(&inst);
        let value = objective(&schedule, &inst).unwrap();
        let file = schedule_to_file(&schedule, &inst, &ids, value);
        prop_assert_eq!(schedule_from_file(&file, &back, &back_ids).unwrap(), schedule);
    }
}

#[test]
fn traces_round_trip_through_json() {
    for seed in 0..20 {
        let inst = random_instance(MEDIUM, seed);
        let (_, trace) = solve(&inst).unwrap();
        let text = serde_json::to_string(&trace).unwrap();
        let back: SolveTrace = serde_json::from_str(&text).unwrap();
        assert_eq!(back, trace);
        assert!(matches!(
            back.events.last(),
            Some(TraceEvent::Termination { .. })
        ));
    }
}

#[test]
fn tampered_trace_price_is_detected() {
    let mut caught = 0;
    for seed in 0..30 {
        let inst = random_instance(MEDIUM, seed);
        let (schedule, mut trace) = solve(&inst).unwrap();
        let Some(TraceEvent::Elimination { value, .. }) = trace
            .events
            .iter_mut()
            .find(|e| matches!(e, TraceEvent::Elimination { .. }))
        else {
            continue;
        };
        *value += 0.25;
        let cert = build_certificate(&trace, &inst).unwrap();
        let verdict = verify(&schedule, &cert, &inst);
        assert!(!verdict.pass, "seed {seed}");
        assert!(verdict
            .violations
            .iter()
            .any(|v| !matches!(v, Violation::Shape { .. } | Violation::Budget { .. })));
        caught += 1;
    }
    assert!(caught > 0);
}

#[test]
fn counters_are_consistent() {
    for seed in 0..20 {
        let inst = random_instance(MEDIUM, seed);
        let solved = solve_instrumented(&inst).unwrap();
        let c = solved.counters;
        assert_eq!(c.augmentations, inst.total_budget());
        assert_eq!(c.heap_pops, c.heap_pushes);
        assert!(c.multi_hop <= c.augmentations);
        assert_eq!(c.eliminations as usize, solved.trace.eliminations().count());
    }
}
