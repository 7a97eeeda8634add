mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{full_rows, optimum, random_spec, true_objective};
use ralloc::bounds::monotone_bounds;
use ralloc::instance::is_convex_row;
use ralloc::{
    export_ilp, generate, solve, solve_menu, BoundMode, BoundModel, EvaluationLedger, Family, Instance, Method,
    MethodOptions, PointMenu, SolveReport,
};

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::Convex), Just(Family::Monotone), Just(Family::NearConvex)]
}

fn instance(family: Family, seed: u64, additive: bool) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate(&random_spec(&mut rng, family, additive)).unwrap()
}

fn partial_ledger(inst: &Instance, mask: &[bool]) -> EvaluationLedger {
    let mut ledger = EvaluationLedger::new(inst);
    let mut bits = mask.iter().cycle();
    for i in 0..inst.n() {
        for k in 0..=inst.cap(i) {
            if *bits.next().unwrap() {
                ledger.evaluate(inst, i, k).unwrap();
            }
        }
    }
    ledger
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_rows_match_family(fam in family(), seed in any::<u64>(), additive in any::<bool>()) {
        let inst = instance(fam, seed, additive);
        for row in full_rows(&inst) {
            prop_assert!(row.windows(2).all(|w| w[1] <= w[0]));
            prop_assert!(row.iter().all(|&v| (0.0..=inst.max_cost()).contains(&v)));
            if fam == Family::Convex {
                prop_assert!(is_convex_row(&row));
            }
        }
        prop_assert_eq!(inst.prefers_additive(), additive);
    }

    #[test]
    fn instance_json_round_trip(fam in family(), seed in any::<u64>()) {
        let inst = instance(fam, seed, true);
        let back = Instance::from_json_str(&inst.to_json_string()).unwrap();
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn ledger_counts_distinct_points(seed in any::<u64>(), picks in prop::collection::vec((0usize..8, 0usize..13), 0..60)) {
        let inst = instance(Family::Monotone, seed, true);
        let mut ledger = EvaluationLedger::new(&inst);
        let mut seen = std::collections::BTreeSet::new();
        for (i, k) in picks {
            let ok = ledger.evaluate(&inst, i, k).is_ok();
            prop_assert_eq!(ok, i < inst.n() && k <= inst.cap(i));
            if ok {
                seen.insert((i, k));
            }
        }
        prop_assert_eq!(ledger.eval_count(), seen.len());
        prop_assert_eq!(ledger.per_player_count().iter().sum::<usize>(), seen.len());
    }

    #[test]
    fn bounds_enclose_costs(fam in family(), seed in any::<u64>(), mask in prop::collection::vec(any::<bool>(), 1..40)) {
        let inst = instance(fam, seed, seed % 2 == 0);
        let rows = full_rows(&inst);
        let ledger = partial_ledger(&inst, &mask);
        let mut models = vec![monotone_bounds(&inst, &ledger)];
        if inst.is_convex() {
            models.push(BoundModel::build(&inst, &ledger, BoundMode::Convex, false).unwrap());
        }
        for m in models {
            for (i, row) in rows.iter().enumerate() {
                for (k, &f) in row.iter().enumerate() {
                    prop_assert!(m.lower(i, k) <= f + 1e-9 && f <= m.upper(i, k) + 1e-9);
                    prop_assert!(m.lower(i, k) >= 0.0 && m.upper(i, k) <= inst.max_cost());
                }
            }
        }
    }

    #[test]
    fn forced_convex_bounds_stay_ordered(seed in any::<u64>(), mask in prop::collection::vec(any::<bool>(), 1..40)) {
        let inst = instance(Family::Monotone, seed, true);
        let ledger = partial_ledger(&inst, &mask);
        prop_assert!(BoundModel::build(&inst, &ledger, BoundMode::Convex, false).is_err());
        let m = BoundModel::build(&inst, &ledger, BoundMode::Convex, true).unwrap();
        prop_assert!(m.heuristic);
        for i in 0..inst.n() {
            for k in 0..=inst.cap(i) {
                prop_assert!(m.lower(i, k) <= m.upper(i, k));
            }
        }
    }

    #[test]
    fn dp_matches_brute_force(fam in family(), seed in any::<u64>(), additive in any::<bool>()) {
        let inst = instance(fam, seed, additive);
        let dp = solve_menu(&PointMenu::from_rows(&full_rows(&inst)), inst.budget());
        let bf = optimum(&inst);
        prop_assert_eq!(dp.value, bf.value);
        prop_assert_eq!(dp.allocation, bf.allocation);
    }

    #[test]
    fn every_method_is_feasible_and_within_budget(
        fam in family(),
        seed in any::<u64>(),
        additive in any::<bool>(),
        method in prop::sample::select(Method::ALL.to_vec()),
    ) {
        let inst = instance(fam, seed, additive);
        let rows = full_rows(&inst);
        let opts = MethodOptions { seed, ..MethodOptions::default() };
        let mut ledger = EvaluationLedger::new(&inst);
        let r = solve(&inst, &mut ledger, method, &opts).unwrap();
        prop_assert!(r.feasible && r.allocation.is_feasible(&inst));
        prop_assert_eq!(r.evals, ledger.eval_count());
        prop_assert!(r.evals <= inst.point_count());
        let z = true_objective(&rows, &r.allocation);
        prop_assert!(r.objective_lower <= z && z <= r.objective_upper);
        prop_assert!(z >= optimum(&inst).value);
        if let Some(t) = r.true_objective {
            prop_assert_eq!(t, z);
        }
        let back: SolveReport = serde_json::from_str(&r.to_json_string()).unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn ilp_export_lists_every_point(seed in any::<u64>()) {
        let inst = instance(Family::NearConvex, seed, false);
        let lp = export_ilp(&PointMenu::from_rows(&full_rows(&inst)), inst.budget());
        let binary = lp.split("Binary\n").nth(1).unwrap();
        prop_assert_eq!(binary.lines().filter(|l| l.trim_start().starts_with("y_")).count(), inst.point_count());
        prop_assert_eq!(lp.matches("choose_").count(), inst.n());
        let budget_line = format!("= {}\n", inst.budget());
        prop_assert!(lp.contains(&budget_line));
    }
}
