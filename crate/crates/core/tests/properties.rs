use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use alloc_hardness::allocation::{
    evaluate_welfare, Allocation, AllocationInstance, Good, InstanceDocument, Objective, Welfare,
};
use alloc_hardness::boolean_functions::{
    correlation, correlation_by_enumeration, influence_profile, EfronSteinDecomposition, FunctionTable,
};
use alloc_hardness::distributions::ProductDistribution;
use alloc_hardness::limits::Caps;
use alloc_hardness::point::Permutation;
use alloc_hardness::rational::Rational;
use alloc_hardness::reduction::{mean_identity, theorem_ratios, MetaInstance};
use alloc_hardness::report::{params, Report};
use alloc_hardness::solvers::solve_exact;
use alloc_hardness::unique_games::{UgDocument, UgInstance};

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn instance(seed: u64, n: usize, m: usize) -> AllocationInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let goods = (0..m)
        .map(|g| {
            let vals = (0..n)
                .filter_map(|a| {
                    let k = rng.gen_range(0..=6);
                    (k > 0).then(|| (a, r(k, 3)))
                })
                .collect();
            Good::new(g as u64, vals).with_size(r(rng.gen_range(1..=3), 3))
        })
        .collect();
    let budgets = (0..n).map(|_| r(rng.gen_range(1..=4), 2)).collect();
    let capacities = (0..n).map(|_| r(rng.gen_range(1..=4), 3)).collect();
    AllocationInstance::new(n, goods)
        .unwrap()
        .with_budgets(budgets)
        .unwrap()
        .with_capacities(capacities)
        .unwrap()
}

fn objective() -> impl Strategy<Value = Objective> {
    prop_oneof![Just(Objective::Nash), Just(Objective::Budgeted), Just(Objective::UswGap)]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn efron_stein_reconstructs_and_is_orthogonal(r_dim in 1usize..=3, seed in any::<u64>(), boolean in any::<bool>()) {
        let f = if boolean {
            FunctionTable::random_with_mean(r_dim, 2, &r(1, 3), seed).unwrap()
        } else {
            FunctionTable::random_grid(r_dim, 2, 7, seed).unwrap()
        };
        let es = EfronSteinDecomposition::new(&f, &Caps::default()).unwrap();
        prop_assert_eq!(es.reconstruct(), f.values().to_vec());
        for s in 0..1usize << r_dim {
            for t in s + 1..1usize << r_dim {
                prop_assert!(es.inner(s, t).is_zero());
            }
        }
    }

    #[test]
    fn relabelling_coordinates_permutes_influences(r_dim in 1usize..=3, seed in any::<u64>(), d in 1usize..=3) {
        let caps = Caps::default();
        let f = FunctionTable::random_grid(r_dim, 2, 5, seed).unwrap();
        let perm = Permutation::random(r_dim, &mut ChaCha8Rng::seed_from_u64(seed ^ 7));
        let g = f.compose(&perm).unwrap();
        let mut a = influence_profile(&f, d, &caps).unwrap().low_degree_influence;
        let mut b = influence_profile(&g, d, &caps).unwrap().low_degree_influence;
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn fast_correlation_matches_enumeration(r_dim in 1usize..=2, k in 0i64..=20, seeds in any::<[u64; 4]>()) {
        let caps = Caps::default();
        let p = ProductDistribution::noisy_eta(2, &r(k, 100), r_dim).unwrap();
        let fs: Vec<FunctionTable> = seeds.iter().map(|&s| FunctionTable::random_grid(r_dim, 2, 4, s).unwrap()).collect();
        let refs: Vec<&FunctionTable> = fs.iter().collect();
        prop_assert_eq!(
            correlation(&refs, &p, &caps).unwrap(),
            correlation_by_enumeration(&refs, &p, &caps).unwrap()
        );
    }

    #[test]
    fn solver_value_is_attained_and_maximal(seed in any::<u64>(), n in 1usize..=3, m in 0usize..=5, obj in objective(), probe in any::<u64>()) {
        let caps = Caps::default();
        let inst = instance(seed, n, m);
        let res = solve_exact(&inst, obj, &caps).unwrap();
        prop_assert_eq!(
            evaluate_welfare(&inst, &res.best_allocation, obj).unwrap(),
            Welfare::Value(res.best_value.clone())
        );
        let mut rng = ChaCha8Rng::seed_from_u64(probe);
        let other = Allocation {
            assignment: (0..m).map(|_| rng.gen_range(0..=n).checked_sub(1)).collect(),
        };
        if let Welfare::Value(v) = evaluate_welfare(&inst, &other, obj).unwrap() {
            prop_assert!(v <= res.best_value);
        }
    }

    #[test]
    fn nash_optimum_ignores_agent_names(seed in any::<u64>(), n in 1usize..=3, m in 0usize..=5, shuffle in any::<u64>()) {
        use rand::seq::SliceRandom;
        let caps = Caps::default();
        let inst = instance(seed, n, m);
        let mut rename: Vec<usize> = (0..n).collect();
        rename.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
        let renamed = inst.permute_agents(&rename).unwrap();
        prop_assert_eq!(
            solve_exact(&inst, Objective::Nash, &caps).unwrap().best_value,
            solve_exact(&renamed, Objective::Nash, &caps).unwrap().best_value
        );
    }

    #[test]
    fn worthless_good_changes_nothing(seed in any::<u64>(), n in 1usize..=3, m in 0usize..=4, obj in objective()) {
        let caps = Caps::default();
        let inst = instance(seed, n, m);
        let mut goods = inst.goods().to_vec();
        goods.push(Good::new(m as u64, vec![]).with_size(r(1, 3)));
        let padded = AllocationInstance::new(n, goods)
            .unwrap()
            .with_budgets(inst.budgets().unwrap().to_vec())
            .unwrap()
            .with_capacities(inst.capacities().unwrap().to_vec())
            .unwrap();
        prop_assert_eq!(
            solve_exact(&inst, obj, &caps).unwrap().best_value,
            solve_exact(&padded, obj, &caps).unwrap().best_value
        );
    }

    #[test]
    fn instance_json_round_trip(seed in any::<u64>(), n in 1usize..=4, m in 0usize..=6) {
        let inst = instance(seed, n, m);
        let text = serde_json::to_string(&inst.to_document()).unwrap();
        let doc: InstanceDocument = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(AllocationInstance::try_from(doc).unwrap(), inst);
    }

    #[test]
    fn ug_json_round_trip(seed in any::<u64>(), r_dim in 1usize..=4, delta_b in 1usize..=2) {
        let ug = UgInstance::random(2, 4, delta_b, r_dim, seed).unwrap();
        let text = serde_json::to_string(&ug.to_document()).unwrap();
        let doc: UgDocument = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(UgInstance::try_from(doc).unwrap(), ug);
    }

    #[test]
    fn report_csv_round_trip(values in prop::collection::vec((-1000i64..1000, 1i64..1000, any::<bool>()), 0..8)) {
        let mut report = Report::new();
        for (i, (n, d, ok)) in values.into_iter().enumerate() {
            let p = params(&[("i", i.to_string()), ("note", "a, \"quoted\" value".into())]);
            report.check("prop", &p, "value", &r(n, d), ok, "t");
        }
        prop_assert_eq!(Report::from_csv(&report.to_csv().unwrap()).unwrap(), report);
    }

    #[test]
    fn ratio_chains_hold(k in 1i64..=10_000) {
        let report = theorem_ratios(&r(k, 1_000_000)).unwrap();
        prop_assert!(report.checks_pass());
    }

    #[test]
    fn dummy_mass_is_small(seed in any::<u64>(), r_dim in 1usize..=3, eps_k in 1i64..=50, tau_k in 1i64..=10, d in 1usize..=3) {
        let (ug, _) = UgInstance::planted(2, 2, 2, r_dim, seed).unwrap();
        let eps = r(eps_k, 100);
        let meta = MetaInstance::new(ug, eps.clone(), d, r(tau_k, 20)).unwrap();
        prop_assert!(meta.dummy_total() <= *meta.delta());
        prop_assert!(*meta.delta() <= eps);
    }

    #[test]
    fn mean_identity_on_biregular_graphs(seed in any::<u64>(), r_dim in 1usize..=3, delta_b in 1usize..=2) {
        let ug = UgInstance::random(2, 4, delta_b, r_dim, seed).unwrap();
        let fs: Vec<FunctionTable> = (0..2)
            .map(|a| FunctionTable::random_grid(r_dim, 2, 6, seed.wrapping_add(a)).unwrap())
            .collect();
        let (b_side, a_side) = mean_identity(&ug, &fs).unwrap();
        prop_assert_eq!(b_side, a_side);
    }
}
