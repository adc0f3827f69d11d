//! Randomized invariant checks over generated channel machines.

mod common;

use std::collections::HashSet;

use common::{exhaustive_max_cycle_ratio, perron_oracle};
use num::rational::Ratio;
use num::BigUint;
use proptest::prelude::*;

use fschan::{
    bounds_additive, bounds_erasure, build_sliding_window_erasure, c0f_erasure_dp, c0f_exact,
    confusability, max_zero_error_code, maximal_ratio, output_set, perron_eigenvalue, rate_scan,
    verify_zero_error, ChannelKind, ChannelMachine, Edge, MachineError, SearchMode,
    SlidingWindowSpec,
};

/// Strongly connected machines: a backbone cycle over all states plus
/// random extra edges, deduplicated on (state, noise).
fn arb_machine(kind: ChannelKind, q: u8) -> impl Strategy<Value = ChannelMachine> {
    let noise_range = match kind {
        ChannelKind::Erasure => 2u8,
        ChannelKind::AdditiveNoise => q,
    };
    (
        2usize..=6,
        proptest::collection::vec(0u8..noise_range, 6),
        proptest::collection::vec((0usize..6, 0usize..6, 0u8..noise_range), 0..14),
    )
        .prop_map(move |(k, backbone_noise, extra)| {
            let mut edges = Vec::new();
            let mut used = HashSet::new();
            for (i, &noise) in backbone_noise.iter().take(k).enumerate() {
                edges.push(Edge { from: i, to: (i + 1) % k, noise });
                used.insert((i, noise));
            }
            for (f, t, v) in extra {
                let (f, t) = (f % k, t % k);
                if used.insert((f, v)) {
                    edges.push(Edge { from: f, to: t, noise: v });
                }
            }
            let names = (0..k).map(|i| format!("s{i}")).collect();
            ChannelMachine::new(kind, q, names, edges).expect("construction is valid")
        })
}

fn arb_any_machine() -> impl Strategy<Value = ChannelMachine> {
    prop_oneof![
        arb_machine(ChannelKind::Erasure, 2),
        arb_machine(ChannelKind::AdditiveNoise, 2),
        arb_machine(ChannelKind::AdditiveNoise, 3),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn noise_sequence_count_equals_walk_count(
        m in arb_any_machine(),
        n in 0usize..=10,
    ) {
        // parallel edges (same endpoints, different noise) collapse to a
        // single adjacency entry, so the equivalence needs them absent
        let endpoints: HashSet<(usize, usize)> =
            m.edges().iter().map(|e| (e.from, e.to)).collect();
        prop_assume!(endpoints.len() == m.edges().len());
        let adj = m.adjacency();
        for s0 in 0..m.num_states() {
            let seqs = m.noise_sequences(s0, n).unwrap().len();
            prop_assert_eq!(BigUint::from(seqs), adj.count_walks(s0, n));
        }
    }

    #[test]
    fn cycle_ratio_matches_exhaustive_enumeration(m in arb_any_machine()) {
        let stats = maximal_ratio(&m);
        prop_assert_eq!(stats.tau, exhaustive_max_cycle_ratio(&m));
        // the witness itself attains the ratio
        let errors: i64 = stats.witness_cycle.iter().map(|e| i64::from(e.is_error())).sum();
        prop_assert_eq!(Ratio::new(errors, stats.witness_cycle.len() as i64), stats.tau);
    }

    #[test]
    fn power_iteration_matches_polynomial_root(m in arb_any_machine()) {
        let adj = m.adjacency();
        let lambda = perron_eigenvalue(&adj, 1e-12).unwrap();
        let oracle = perron_oracle(adj.rows());
        prop_assert!((lambda - oracle).abs() < 1e-6, "{} vs {}", lambda, oracle);
    }

    #[test]
    fn walk_count_growth_approaches_the_entropy(m in arb_machine(ChannelKind::Erasure, 2)) {
        let adj = m.adjacency();
        let lambda = perron_eigenvalue(&adj, 1e-12).unwrap();
        let n = 64usize;
        let total: BigUint = (0..m.num_states()).map(|s| adj.count_walks(s, n)).sum();
        let digits = total.to_string();
        let approx: f64 = digits[..digits.len().min(15)].parse::<f64>().unwrap()
            * 10f64.powi(digits.len().saturating_sub(15) as i32);
        let rate = approx.ln() / n as f64;
        prop_assert!((rate - lambda.ln()).abs() < 0.05 * 2f64.ln(),
            "growth {} vs log lambda {}", rate, lambda.ln());
    }

    #[test]
    fn duplicate_noise_edges_are_rejected(m in arb_any_machine()) {
        let first = m.edges()[0];
        let mut edges = m.edges().to_vec();
        edges.push(Edge { from: first.from, to: (first.to + 1) % m.num_states(), noise: first.noise });
        let result = ChannelMachine::new(m.kind(), m.q(), m.state_names().to_vec(), edges);
        let duplicate = matches!(result, Err(MachineError::DuplicateNoiseEdge { .. }));
        prop_assert!(duplicate);
    }

    #[test]
    fn removing_a_states_outgoing_edges_is_rejected(m in arb_any_machine()) {
        let edges: Vec<Edge> = m.edges().iter().copied().filter(|e| e.from != 0).collect();
        let result = ChannelMachine::new(m.kind(), m.q(), m.state_names().to_vec(), edges);
        prop_assert!(result.is_err());
    }

    #[test]
    fn iterative_feedback_capacity_stays_in_the_convergence_envelope(
        m in arb_machine(ChannelKind::Erasure, 2),
        k in 50usize..=400,
    ) {
        let stats = maximal_ratio(&m);
        let exact = c0f_exact(&m).unwrap();
        let target = *exact.numer() as f64 / *exact.denom() as f64;
        let dp = c0f_erasure_dp(&m, k).unwrap();
        let envelope = (stats.witness_cycle.len() + 2 * m.num_states()) as f64 / k as f64;
        prop_assert!((dp - target).abs() <= envelope,
            "dp {} vs exact {} beyond {}", dp, target, envelope);
    }

    #[test]
    fn capacity_bounds_are_ordered_and_within_unit_range(m in arb_any_machine()) {
        let (lower, upper) = match m.kind() {
            ChannelKind::Erasure => bounds_erasure(&m).unwrap(),
            ChannelKind::AdditiveNoise => bounds_additive(&m).unwrap(),
        };
        prop_assert!(lower >= 0.0);
        prop_assert!(lower <= upper + 1e-12);
        prop_assert!(upper <= 1.0 + 1e-12);
    }

    #[test]
    fn output_set_size_is_input_independent(
        m in arb_any_machine(),
        seed_word in proptest::collection::vec(0u8..3, 5),
    ) {
        let n = seed_word.len();
        let word: Vec<u8> = seed_word.iter().map(|&d| d % m.q()).collect();
        let zero = vec![0u8; n];
        for s0 in 0..m.num_states() {
            let expected = m.noise_sequences(s0, n).unwrap().len();
            prop_assert_eq!(output_set(&m, s0, &word).unwrap().len(), expected);
            prop_assert_eq!(output_set(&m, s0, &zero).unwrap().len(), expected);
        }
    }

    #[test]
    fn found_codebooks_are_certified_zero_error(
        m in arb_any_machine(),
        n in 1usize..=4,
    ) {
        let graph = confusability(&m, n).unwrap();
        let mode = if graph.num_words() <= 64 { SearchMode::Exact } else { SearchMode::Greedy };
        let code = max_zero_error_code(&graph, mode).unwrap();
        prop_assert!(!code.words.is_empty());
        prop_assert!(verify_zero_error(&m, &code.words));
    }
}

#[test]
fn code_rate_is_superadditive_for_the_window_channel() {
    let m = build_sliding_window_erasure(SlidingWindowSpec::new(3, 1, 2).unwrap());
    let rows = rate_scan(&m, 6).unwrap();
    let rate_at = |n: usize| rows.iter().find(|r| r.n == n).unwrap().rate;
    assert!(rate_at(6) >= rate_at(3) - 1e-12);
}
