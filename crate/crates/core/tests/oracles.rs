mod common;

use cliffcut::adapt::{run_from, Side};
use cliffcut::baselines::exact_maxcut;
use cliffcut::stab::{gradient_full, replay, replay_prefix, rotation_axis, verify_solution, PauliString};
use cliffcut::{RngSeed, TiePolicy};
use common::*;

#[test]
fn circuit_matches_rotation_up_to_phase() {
    let n = 3;
    for y in 0..n {
        for z in 0..n {
            if y == z {
                continue;
            }
            // A non-trivial input: grow a small entangled state first.
            let mut a = StateVector::flipped_plus(n, 0);
            a.apply_rotation_exact(&PauliString::yz(n, 0, 1));
            a.apply_rotation_exact(&PauliString::yz(n, 2, 1));
            let mut b = a.clone();
            a.apply_yz_circuit(y, z);
            b.apply_rotation_exact(&PauliString::yz(n, y, z));
            assert!((a.overlap(&b) - 1.0).abs() < 1e-12, "Y{y} Z{z}");
        }
    }
}

#[test]
fn tableau_expectations_match_statevector() {
    for (gi, g) in mixed_corpus(60, 2, 6, 11).iter().enumerate() {
        let n = g.n();
        let k = gi % n;
        let s = run_from(g, k, &TiePolicy::LowestIndex).unwrap();
        for r in 0..=s.gate_trace.len() {
            let t = replay_prefix(n, k, &s.gate_trace[..r]).unwrap();
            let sv = statevector_run(n, k, &s.gate_trace[..r]);
            let mut probes = Vec::new();
            for a in 0..n {
                probes.push(pauli(&[(a, 'X')], n));
                probes.push(pauli(&[(a, 'Z')], n));
                for b in 0..n {
                    if a != b {
                        probes.push(pauli(&[(a, 'Z'), (b, 'Z')], n));
                        probes.push(pauli(&[(a, 'Y'), (b, 'Z')], n));
                        for l in 0..n {
                            if l != b {
                                probes.push(gradient_operator(n, a, b, l));
                            }
                        }
                    }
                }
            }
            for p in &probes {
                let want = sv.expectation(p);
                let got = t.expectation(p) as f64;
                assert!((want - got).abs() < 1e-9, "graph {gi} prefix {r} {p}: sv {want} tableau {got}");
            }
        }
    }
}

#[test]
fn gate_axes_follow_the_trace() {
    let g = example_n5();
    let s = run_from(&g, 1, &TiePolicy::LowestIndex).unwrap();
    let j = s.gate_trace[0].node;
    assert_eq!(rotation_axis(5, 1, j, true, s.gate_trace[0]), PauliString::yz(5, 1, j));
    for gate in &s.gate_trace[1..] {
        let anchor = if gate.side == Side::K { 1 } else { j };
        assert_eq!(rotation_axis(5, 1, j, false, *gate), PauliString::yz(5, gate.node, anchor));
    }
}

#[test]
fn cache_agrees_with_tableau_gradients() {
    for g in mixed_corpus(80, 3, 8, 5) {
        let n = g.n();
        walk_run(&g, 0, |state, cache, gates| {
            let t = replay_prefix(n, 0, gates).unwrap();
            for &b in state.inactive() {
                let want_k = gradient_full(&t, &g, state.k(), b);
                let want_j = gradient_full(&t, &g, state.j(), b);
                assert!((cache.value(b, Side::K) - want_k).abs() < 1e-9);
                assert!((cache.value(b, Side::J) - want_j).abs() < 1e-9);
            }
        });
    }
}

#[test]
fn replayed_cut_matches_solution() {
    for (i, g) in mixed_corpus(100, 2, 12, 9).iter().enumerate() {
        let s = run_from(g, i % g.n(), &TiePolicy::LowestIndex).unwrap();
        let v = verify_solution(g, &s);
        assert!(v.passed, "{:?}", v.diagnostic);
        let t = replay(g.n(), s.start_node.unwrap(), &s.gate_trace).unwrap();
        assert_eq!(t.rank(), g.n());
    }
}

#[test]
fn exact_enumeration_matches_brute_force() {
    for g in mixed_corpus(40, 2, 12, 21) {
        let e = exact_maxcut(&g, 26).unwrap();
        assert!((e.optimum_cut - brute_force_maxcut(&g)).abs() < 1e-9);
        assert!((naive_cut(&g, e.witness.bits()) - e.optimum_cut).abs() < 1e-9);
    }
    let s = random_signed_graph(5, RngSeed(1));
    assert!(exact_maxcut(&s, 26).unwrap().optimum_cut >= 0.0);
}
