mod common;

use cliffcut::adapt::{run_from, run_from_recompute};
use cliffcut::baselines::exact_maxcut;
use cliffcut::experiments::{read_results, write_results, InstanceResult};
use cliffcut::graph::{format_edge_list, parse_edge_list};
use cliffcut::stab::verify_solution;
use cliffcut::{cut_value, ising_energy, CutAssignment, Graph, TiePolicy};
use proptest::prelude::*;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let m = pairs.len();
        proptest::collection::vec(proptest::option::weighted(0.6, -2.0f64..2.0), m).prop_map(move |ws| {
            let edges = pairs.iter().zip(ws).filter_map(|(&(a, b), w)| w.map(|w| (a, b, w)));
            Graph::from_edges(n, edges).unwrap()
        })
    })
}

fn graph_and_bits(max_n: usize) -> impl Strategy<Value = (Graph, Vec<bool>)> {
    graph_strategy(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), proptest::collection::vec(any::<bool>(), n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cut_plus_energy_is_half_the_weight((g, bits) in graph_and_bits(14)) {
        let z = CutAssignment::new(bits);
        let w = g.total_weight();
        prop_assert!((cut_value(&g, &z) - (w / 2.0 - ising_energy(&g, &z))).abs() < 1e-9);
        prop_assert!((cut_value(&g, &z) - common::naive_cut(&g, z.bits())).abs() < 1e-9);
    }

    #[test]
    fn complement_keeps_the_cut((g, bits) in graph_and_bits(14)) {
        let z = CutAssignment::new(bits);
        prop_assert_eq!(cut_value(&g, &z), cut_value(&g, &z.complement()));
        prop_assert_eq!(ising_energy(&g, &z), ising_energy(&g, &z.complement()));
    }

    #[test]
    fn cache_and_recompute_agree(g in graph_strategy(12), k in 0usize..12) {
        let k = k % g.n();
        let a = run_from(&g, k, &TiePolicy::LowestIndex).unwrap();
        let b = run_from_recompute(&g, k, &TiePolicy::LowestIndex).unwrap();
        prop_assert_eq!(&a.gate_trace, &b.gate_trace);
        prop_assert_eq!(a.assignment, b.assignment);
    }

    #[test]
    fn runs_replay_on_the_tableau(g in graph_strategy(12), k in 0usize..12) {
        let s = run_from(&g, k % g.n(), &TiePolicy::LowestIndex).unwrap();
        let v = verify_solution(&g, &s);
        prop_assert!(v.passed, "{:?}", v.diagnostic);
    }

    #[test]
    fn gradients_are_maximal_and_never_below_zero_on_positive_graphs(g in graph_strategy(10)) {
        let g = Graph::from_edges(g.n(), g.edges().iter().map(|e| (e.i, e.j, e.w.abs()))).unwrap();
        let s = run_from(&g, 0, &TiePolicy::LowestIndex).unwrap();
        // Each step picks max |score| over two opposite-signed moves.
        prop_assert!(s.gradient_trace.iter().all(|&x| x >= 0.0));
        prop_assert!(s.cut_value <= exact_maxcut(&g, 26).unwrap().optimum_cut + 1e-9);
    }

    #[test]
    fn edge_list_roundtrip(g in graph_strategy(10)) {
        let back = parse_edge_list(&format_edge_list(&g)).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn results_file_roundtrip(cut in -1e6f64..1e6, e in -1e6f64..1e6, opt in proptest::option::of(0.1f64..1e6), t in 0.0f64..10.0) {
        let row = InstanceResult {
            family: "complete-u01".into(),
            n: 12,
            k_or_p: String::new(),
            instance_seed: u64::MAX - 3,
            solver: "gw".into(),
            params: "rounds=10".into(),
            cut_value: cut,
            ising_energy: e,
            exact_optimum: opt,
            ratio: opt.map(|o| cut / o),
            wall_time_s: t,
            per_start: Vec::new(),
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_results(&path, std::slice::from_ref(&row)).unwrap();
        prop_assert_eq!(read_results(&path).unwrap(), vec![row]);
    }
}
