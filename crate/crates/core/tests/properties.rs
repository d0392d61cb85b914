use proptest::prelude::*;

use qldpc_bounds::analysis::{
    best_treewidth_upper, exact_separator, exact_treewidth, heuristic_separator, separability_profile,
    validate_separation, validate_tree_decomposition, ProfileConfig, SeparatorConfig, SeparatorStrategy,
};
use qldpc_bounds::bounds::{eval_s_d, recursive_separation, RecurrenceParams};
use qldpc_bounds::code::{brute_distance, is_correctable_oracle, make_family, Family};
use qldpc_bounds::correctability::dz_correctable;
use qldpc_bounds::generators::make_grid;
use qldpc_bounds::graph::{are_decoupled, build_connectivity, Graph};
use qldpc_bounds::region::Region;
use qldpc_bounds::report::{analyze, AnalysisConfig};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let len = pairs.len();
        proptest::collection::vec(any::<bool>(), len).prop_map(move |keep| {
            let edges = pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e);
            Graph::from_edges(n, edges).unwrap()
        })
    })
}

fn strategy_choice() -> impl Strategy<Value = SeparatorStrategy> {
    prop_oneof![Just(SeparatorStrategy::BfsLayering), Just(SeparatorStrategy::SpectralBisection)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn heuristic_separators_are_valid_and_deterministic(
        g in graph_strategy(30),
        alpha in 0.5f64..0.9,
        strategy in strategy_choice(),
        seed in any::<u64>(),
    ) {
        let sep = heuristic_separator(&g, alpha, strategy, seed).unwrap();
        prop_assert!(validate_separation(&g, &sep).is_ok());
        prop_assert_eq!(sep, heuristic_separator(&g, alpha, strategy, seed).unwrap());
    }

    #[test]
    fn balanced_separator_no_larger_than_a_bag(g in graph_strategy(11)) {
        let (tw, _) = exact_treewidth(&g, 20, u64::MAX).unwrap();
        let sep = exact_separator(&g, 2.0 / 3.0, 24, u64::MAX).unwrap();
        prop_assert!(sep.size() <= tw + 1, "separator {} vs treewidth {}", sep.size(), tw);
    }

    #[test]
    fn treewidth_decompositions_are_valid(g in graph_strategy(14)) {
        let (ub, td) = best_treewidth_upper(&g);
        prop_assert!(validate_tree_decomposition(&g, &td).is_ok());
        prop_assert_eq!(td.width(), ub);
        let (exact, etd) = exact_treewidth(&g, 20, u64::MAX).unwrap();
        prop_assert!(validate_tree_decomposition(&g, &etd).is_ok());
        prop_assert!(exact <= ub);
    }

    #[test]
    fn recursive_partition_invariants(
        g in graph_strategy(30),
        d in 2usize..8,
        strategy in strategy_choice(),
        seed in any::<u64>(),
    ) {
        let cfg = SeparatorConfig { alpha: 0.5, strategy, seed, exact_max: 0 };
        let part = recursive_separation(&g, d, &cfg).unwrap();
        prop_assert!(part.blocks.iter().all(|b| !b.is_empty() && b.len() < d));
        prop_assert!(are_decoupled(&g, &part.blocks).unwrap());
        let union = part.blocks_union();
        prop_assert!(union.is_disjoint(&part.complement));
        prop_assert_eq!(union.len() + part.complement.len(), g.n());
    }

    #[test]
    fn profile_samples_bounded_and_sorted(seed in any::<u64>(), side in 3usize..9) {
        let g = make_grid(2, side).unwrap().graph;
        let sizes = [1, 4, 9, side * side];
        let cfg = ProfileConfig { seed, ..ProfileConfig::default() };
        let profile = separability_profile(&g, &sizes, &cfg).unwrap();
        prop_assert!(profile.samples.iter().all(|s| s.s_observed <= s.r));
        prop_assert!(profile.samples.windows(2).all(|w| w[0].r <= w[1].r));
    }

    #[test]
    fn recurrence_monotone(n in 1usize..5000, d in 1usize..64, c in 0.1f64..1.0) {
        let p = RecurrenceParams::power_law(1.0, c);
        prop_assert!(eval_s_d(&p, d, n) <= eval_s_d(&p, d, n + 1));
        prop_assert!(eval_s_d(&p, d + 1, n) <= eval_s_d(&p, d, n));
    }

    #[test]
    fn correctability_is_monotone_and_matches_oracle(mask in 0u64..(1 << 13), drop in 0usize..13) {
        let code = make_family(Family::Surface, 3).unwrap();
        let region = Region::from_mask(mask);
        let ok = dz_correctable(&code, &region).unwrap();
        prop_assert_eq!(ok, is_correctable_oracle(&code, &region).unwrap());
        let smaller: Region = region.iter().filter(|&q| q != drop).collect();
        if ok {
            prop_assert!(dz_correctable(&code, &smaller).unwrap());
        }
    }
}

#[test]
fn validity_chain_on_small_families() {
    let codes = [
        (Family::Repetition, 5),
        (Family::FiveQubit, 0),
        (Family::Steane, 0),
        (Family::Surface, 2),
        (Family::Surface, 3),
        (Family::Toric, 2),
        (Family::Toric, 3),
    ];
    for (family, size) in codes {
        let code = make_family(family, size).unwrap();
        assert!(code.n() <= 30);
        let g = build_connectivity(&code);
        let d = brute_distance(&code, code.n()).exact().unwrap();
        let (tw, _) = best_treewidth_upper(&g);
        assert!(d <= g.max_degree() * (tw + 1), "{family:?}");
        let report = analyze(&code, &AnalysisConfig { brute_distance_cap: code.n(), ..AnalysisConfig::default() })
            .unwrap_or_else(|e| panic!("{family:?}: {e}"));
        assert!(report.k_actual.value <= report.k_upper_partition.value);
    }
}
