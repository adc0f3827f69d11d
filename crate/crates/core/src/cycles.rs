//! Maximal cycle ratio: the worst-case long-run density of error edges.

use num::rational::Ratio;

use crate::machine::{ChannelMachine, Edge};

/// Result of the cycle-ratio maximization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleStats {
    /// Maximum over directed cycles of (# error edges) / (cycle length).
    pub tau: Ratio<i64>,
    /// A simple cycle attaining `tau`. Shortest such cycle, ties broken by
    /// smallest start state and then edge order.
    pub witness_cycle: Vec<Edge>,
}

fn weight(e: &Edge) -> i64 {
    i64::from(e.is_error())
}

/// Maximum cycle mean with weight 1 on error edges, by Karp's dynamic
/// program in exact integer arithmetic, plus a witness cycle recovered
/// from the subgraph of tight edges.
pub fn maximal_ratio(machine: &ChannelMachine) -> CycleStats {
    let n = machine.num_states();
    let edges = machine.edges();

    // F[k][v] = max weight of a k-edge walk ending at v, any start state.
    let mut f = vec![vec![0i64; n]; n + 1];
    for k in 1..=n {
        for v in 0..n {
            f[k][v] = i64::MIN;
        }
        for e in edges {
            let cand = f[k - 1][e.from] + weight(e);
            if cand > f[k][e.to] {
                f[k][e.to] = cand;
            }
        }
    }
    let mut tau = Ratio::new(0, 1);
    let mut first = true;
    for v in 0..n {
        let mut best_k = None::<Ratio<i64>>;
        for k in 0..n {
            let r = Ratio::new(f[n][v] - f[k][v], (n - k) as i64);
            if best_k.map_or(true, |b| r < b) {
                best_k = Some(r);
            }
        }
        let r = best_k.expect("at least one walk length");
        if first || r > tau {
            tau = r;
            first = false;
        }
    }

    let witness_cycle = witness(machine, tau);
    debug_assert_eq!(
        witness_cycle.iter().map(weight).sum::<i64>(),
        (tau * Ratio::from_integer(witness_cycle.len() as i64)).to_integer()
    );
    CycleStats { tau, witness_cycle }
}

/// Recovers a shortest simple cycle with mean exactly `tau`.
///
/// With reduced weights c(e) = den·w(e) − num every cycle has c-weight ≤ 0
/// and optimal cycles have c-weight 0. Longest-path potentials make every
/// edge nonpositive; the edges of reduced weight exactly 0 then form a
/// subgraph whose cycles all have mean `tau`, and which contains every
/// optimal cycle. A reverse breadth-first search picks the shortest one.
fn witness(machine: &ChannelMachine, tau: Ratio<i64>) -> Vec<Edge> {
    let n = machine.num_states();
    let edges = machine.edges();
    let num = *tau.numer();
    let den = *tau.denom();
    let c = |e: &Edge| den * weight(e) - num;

    // longest-path potentials from a virtual source into every state
    let mut h = vec![0i64; n];
    for _ in 0..n {
        let mut changed = false;
        for e in edges {
            let cand = h[e.from] + c(e);
            if cand > h[e.to] {
                h[e.to] = cand;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let tight: Vec<&Edge> = edges
        .iter()
        .filter(|e| h[e.from] + c(e) == h[e.to])
        .collect();

    let mut best: Option<Vec<Edge>> = None;
    for start in 0..n {
        if let Some(cycle) = shortest_cycle_through(&tight, n, start) {
            if best.as_ref().map_or(true, |b| cycle.len() < b.len()) {
                best = Some(cycle);
            }
        }
    }
    best.expect("tight subgraph contains an optimal cycle")
}

/// Shortest cycle through `start` in the tight subgraph, found by a
/// breadth-first search back toward `start`. Edge order in the machine's
/// edge list breaks ties.
fn shortest_cycle_through(tight: &[&Edge], n: usize, start: usize) -> Option<Vec<Edge>> {
    // BFS on reversed tight edges from `start`: dist[v] = shortest tight
    // path length v -> start, with the first BFS tree edge recorded.
    let mut dist = vec![usize::MAX; n];
    let mut via = vec![None::<Edge>; n];
    let mut queue = std::collections::VecDeque::new();
    dist[start] = 0;
    queue.push_back(start);
    while let Some(v) = queue.pop_front() {
        for e in tight {
            if e.to == v && dist[e.from] == usize::MAX {
                dist[e.from] = dist[v] + 1;
                via[e.from] = Some(**e);
                queue.push_back(e.from);
            }
        }
    }
    // close the cycle with a tight edge out of `start`
    let mut best: Option<(usize, Edge)> = None;
    for e in tight {
        if e.from == start && dist[e.to] != usize::MAX {
            let len = dist[e.to] + 1;
            if best.map_or(true, |(l, _)| len < l) {
                best = Some((len, **e));
            }
        }
    }
    let (_, first) = best?;
    let mut cycle = vec![first];
    let mut v = first.to;
    while v != start {
        let e = via[v].expect("BFS tree reaches start");
        cycle.push(e);
        v = e.to;
    }
    Some(cycle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{no_consecutive_ones, noiseless, ChannelKind, ChannelMachine};

    #[test]
    fn two_state_machine_has_tau_one_half() {
        let m = no_consecutive_ones(ChannelKind::Erasure, 2);
        let stats = maximal_ratio(&m);
        assert_eq!(stats.tau, Ratio::new(1, 2));
        assert_eq!(stats.witness_cycle.len(), 2);
        let errors: i64 = stats.witness_cycle.iter().map(weight).sum();
        assert_eq!(errors, 1);
    }

    #[test]
    fn noiseless_machine_has_tau_zero() {
        let m = noiseless(ChannelKind::Erasure, 2);
        let stats = maximal_ratio(&m);
        assert_eq!(stats.tau, Ratio::new(0, 1));
        assert_eq!(stats.witness_cycle, vec![Edge { from: 0, to: 0, noise: 0 }]);
    }

    #[test]
    fn witness_is_a_cycle_of_the_machine() {
        let m = no_consecutive_ones(ChannelKind::Erasure, 2);
        let stats = maximal_ratio(&m);
        for pair in stats.witness_cycle.windows(2) {
            assert_eq!(pair[0].to, pair[1].from);
        }
        let first = stats.witness_cycle.first().unwrap();
        let last = stats.witness_cycle.last().unwrap();
        assert_eq!(last.to, first.from);
        for e in &stats.witness_cycle {
            assert!(m.edges().contains(e));
        }
    }

    #[test]
    fn three_state_chain_with_one_error() {
        // cycle of length 3 with one error edge, plus a clear self-loop
        let m = ChannelMachine::new(
            ChannelKind::Erasure,
            2,
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                Edge { from: 0, to: 0, noise: 0 },
                Edge { from: 0, to: 1, noise: 1 },
                Edge { from: 1, to: 2, noise: 0 },
                Edge { from: 2, to: 0, noise: 0 },
            ],
        )
        .unwrap();
        let stats = maximal_ratio(&m);
        assert_eq!(stats.tau, Ratio::new(1, 3));
        assert_eq!(stats.witness_cycle.len(), 3);
    }

    #[test]
    fn prefers_shorter_witness_among_equal_ratios() {
        // two disjoint optimal cycles of ratio 1/2: lengths 2 and 4
        let m = ChannelMachine::new(
            ChannelKind::Erasure,
            2,
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![
                Edge { from: 0, to: 1, noise: 1 },
                Edge { from: 1, to: 0, noise: 0 },
                Edge { from: 1, to: 2, noise: 1 },
                Edge { from: 2, to: 3, noise: 0 },
                Edge { from: 3, to: 0, noise: 0 },
            ],
        )
        .unwrap();
        let stats = maximal_ratio(&m);
        assert_eq!(stats.tau, Ratio::new(1, 2));
        assert_eq!(stats.witness_cycle.len(), 2);
    }
}
