//! Brute-force zero-error code search at small blocklength.
//!
//! Two input words are confusable when some admissible channel realization,
//! over any pair of initial states, maps both to the same output word.
//! Zero-error codebooks are independent sets of the confusability graph.

use std::collections::HashMap;

use thiserror::Error;

use crate::families::{output_set_capped, OutputSymbol};
use crate::machine::ChannelMachine;

/// Default cap on the number of input words (q^n).
pub const DEFAULT_WORD_CAP: usize = 4096;
/// Default cap on enumerated (word, output) pairs.
pub const DEFAULT_PAIR_CAP: usize = 8_000_000;
/// Exact search is limited to this many words.
pub const EXACT_WORD_LIMIT: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("q^n = {words} input words exceeds the cap of {cap}")]
    TooManyWords { words: usize, cap: usize },
    #[error("output enumeration of {pairs} (word, output) pairs exceeds the cap of {cap}")]
    TooManyOutputs { pairs: usize, cap: usize },
    #[error("exact search supports at most {limit} words, got {words}")]
    ExactTooLarge { words: usize, limit: usize },
}

/// Graph on all q-ary words of length n; edges join confusable words.
#[derive(Debug, Clone)]
pub struct ConfusabilityGraph {
    q: u8,
    n: usize,
    /// adjacency bitset: row i, bit j set iff words i and j are confusable
    rows: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Exact,
    Greedy,
}

/// A certified zero-error codebook of one blocklength.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    pub blocklength: usize,
    pub words: Vec<Vec<u8>>,
    /// true when produced by the exact maximum independent set search
    pub exact: bool,
}

impl Codebook {
    /// log_q |words| per channel use.
    pub fn rate(&self, q: u8) -> f64 {
        if self.words.is_empty() || self.blocklength == 0 {
            return 0.0;
        }
        (self.words.len() as f64).ln() / f64::from(q).ln() / self.blocklength as f64
    }
}

/// One row of a blocklength scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub n: usize,
    pub size: usize,
    pub rate: f64,
    pub exact: bool,
}

fn word_of_index(mut idx: usize, q: u8, n: usize) -> Vec<u8> {
    let mut word = vec![0u8; n];
    for slot in word.iter_mut().rev() {
        *slot = (idx % usize::from(q)) as u8;
        idx /= usize::from(q);
    }
    word
}

/// Encodes an output word in base q+1, with the erasure mark as digit q.
fn encode_output(word: &[OutputSymbol], q: u8) -> u64 {
    let base = u64::from(q) + 1;
    let mut code = 0u64;
    for y in word {
        let digit = match y {
            OutputSymbol::Symbol(v) => u64::from(*v),
            OutputSymbol::Erasure => u64::from(q),
        };
        code = code * base + digit;
    }
    code
}

impl ConfusabilityGraph {
    pub fn num_words(&self) -> usize {
        self.rows.len()
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn blocklength(&self) -> usize {
        self.n
    }

    pub fn word(&self, i: usize) -> Vec<u8> {
        word_of_index(i, self.q, self.n)
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.rows[i][j / 64] >> (j % 64) & 1 == 1
    }

    pub fn degree(&self, i: usize) -> usize {
        self.rows[i].iter().map(|b| b.count_ones() as usize).sum()
    }
}

/// Builds the confusability graph over all q-ary words of length n.
///
/// Erasure outputs participate with the erasure mark as a literal symbol:
/// two outputs collide only when both the symbols and the erasure positions
/// coincide.
pub fn confusability(machine: &ChannelMachine, n: usize) -> Result<ConfusabilityGraph, SearchError> {
    confusability_capped(machine, n, DEFAULT_WORD_CAP, DEFAULT_PAIR_CAP)
}

pub fn confusability_capped(
    machine: &ChannelMachine,
    n: usize,
    word_cap: usize,
    pair_cap: usize,
) -> Result<ConfusabilityGraph, SearchError> {
    let q = machine.q();
    let num_words = match usize::from(q).checked_pow(n as u32) {
        Some(m) if m <= word_cap => m,
        _ => {
            return Err(SearchError::TooManyWords {
                words: usize::from(q).saturating_pow(n as u32),
                cap: word_cap,
            })
        }
    };
    // cheap size estimate before enumerating anything
    let adj = machine.adjacency();
    let mut outputs_per_word = 0usize;
    for s0 in 0..machine.num_states() {
        let walks = adj.count_walks(s0, n);
        let walks = usize::try_from(&walks).unwrap_or(usize::MAX);
        outputs_per_word = outputs_per_word.saturating_add(walks);
    }
    let pairs = outputs_per_word.saturating_mul(num_words);
    if pairs > pair_cap {
        return Err(SearchError::TooManyOutputs { pairs, cap: pair_cap });
    }

    let blocks = num_words.div_ceil(64);
    let mut rows = vec![vec![0u64; blocks]; num_words];
    // bucket words by reachable output code
    let mut buckets: HashMap<u64, Vec<u32>> = HashMap::new();
    for i in 0..num_words {
        let word = word_of_index(i, q, n);
        let mut seen = std::collections::BTreeSet::new();
        for s0 in 0..machine.num_states() {
            let outs = output_set_capped(machine, s0, &word, pair_cap)
                .expect("pair budget already checked");
            for y in outs {
                seen.insert(encode_output(&y, q));
            }
        }
        for code in seen {
            buckets.entry(code).or_default().push(i as u32);
        }
    }
    for members in buckets.values() {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                let (i, j) = (i as usize, j as usize);
                rows[i][j / 64] |= 1 << (j % 64);
                rows[j][i / 64] |= 1 << (i % 64);
            }
        }
    }
    Ok(ConfusabilityGraph { q, n, rows })
}

/// Largest (exact mode) or maximal (greedy mode) set of pairwise
/// non-confusable words.
pub fn max_zero_error_code(
    graph: &ConfusabilityGraph,
    mode: SearchMode,
) -> Result<Codebook, SearchError> {
    let m = graph.num_words();
    let indices = match mode {
        SearchMode::Exact => {
            if m > EXACT_WORD_LIMIT {
                return Err(SearchError::ExactTooLarge {
                    words: m,
                    limit: EXACT_WORD_LIMIT,
                });
            }
            exact_mis(graph)
        }
        SearchMode::Greedy => greedy_mis(graph),
    };
    // certify independence before returning
    for (a, &i) in indices.iter().enumerate() {
        for &j in &indices[a + 1..] {
            assert!(!graph.adjacent(i, j), "search returned adjacent words");
        }
    }
    Ok(Codebook {
        blocklength: graph.n,
        words: indices.iter().map(|&i| graph.word(i)).collect(),
        exact: mode == SearchMode::Exact,
    })
}

/// Branch and bound maximum independent set on at most 64 words, with a
/// greedy clique-cover upper bound. Deterministic: branches explore the
/// lowest set bit first.
fn exact_mis(graph: &ConfusabilityGraph) -> Vec<usize> {
    let m = graph.num_words();
    let adj: Vec<u64> = (0..m).map(|i| graph.rows[i][0]).collect();
    let full: u64 = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let mut best: u64 = 0;

    fn clique_cover_bound(adj: &[u64], mut cand: u64) -> u32 {
        // one independent word per clique at most; greedy cover
        let mut cliques = 0u32;
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            let mut clique = 1u64 << v;
            let mut pool = cand & adj[v];
            while pool != 0 {
                let u = pool.trailing_zeros() as usize;
                clique |= 1 << u;
                pool &= adj[u];
            }
            cand &= !clique;
            cliques += 1;
        }
        cliques
    }

    fn branch(adj: &[u64], chosen: u64, cand: u64, best: &mut u64) {
        if cand == 0 {
            if chosen.count_ones() > best.count_ones() {
                *best = chosen;
            }
            return;
        }
        if chosen.count_ones() + clique_cover_bound(adj, cand) <= best.count_ones() {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        // include v
        branch(adj, chosen | (1 << v), cand & !(1 << v) & !adj[v], best);
        // exclude v
        branch(adj, chosen, cand & !(1 << v), best);
    }

    branch(&adj, 0, full, &mut best);
    (0..m).filter(|&i| best >> i & 1 == 1).collect()
}

/// Greedy maximal independent set: repeatedly take the word of lowest
/// remaining degree (smallest index on ties) and discard its neighbors.
fn greedy_mis(graph: &ConfusabilityGraph) -> Vec<usize> {
    let m = graph.num_words();
    let blocks = m.div_ceil(64);
    let mut alive = vec![u64::MAX; blocks];
    if m % 64 != 0 {
        alive[blocks - 1] = (1u64 << (m % 64)) - 1;
    }
    let live_degree = |i: usize, alive: &[u64]| -> usize {
        graph.rows[i]
            .iter()
            .zip(alive)
            .map(|(r, a)| (r & a).count_ones() as usize)
            .sum()
    };
    let mut chosen = Vec::new();
    loop {
        let mut pick = None::<(usize, usize)>;
        for i in 0..m {
            if alive[i / 64] >> (i % 64) & 1 == 0 {
                continue;
            }
            let deg = live_degree(i, &alive);
            if pick.map_or(true, |(_, d)| deg < d) {
                pick = Some((i, deg));
            }
        }
        let Some((i, _)) = pick else { break };
        chosen.push(i);
        alive[i / 64] &= !(1 << (i % 64));
        for (a, r) in alive.iter_mut().zip(&graph.rows[i]) {
            *a &= !r;
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Independent certification of a codebook: pairwise output-set
/// intersections across all initial-state unions, without trusting the
/// confusability graph.
pub fn verify_zero_error(machine: &ChannelMachine, words: &[Vec<u8>]) -> bool {
    let q = machine.q();
    let union_outputs = |x: &[u8]| -> std::collections::BTreeSet<u64> {
        let mut all = std::collections::BTreeSet::new();
        for s0 in 0..machine.num_states() {
            for y in output_set_capped(machine, s0, x, DEFAULT_PAIR_CAP).expect("within cap") {
                all.insert(encode_output(&y, q));
            }
        }
        all
    };
    let sets: Vec<_> = words.iter().map(|w| union_outputs(w)).collect();
    for (a, s1) in sets.iter().enumerate() {
        for s2 in &sets[a + 1..] {
            if s1.intersection(s2).next().is_some() {
                return false;
            }
        }
    }
    true
}

/// Exact (or greedy where exact is infeasible) code sizes per blocklength.
pub fn rate_scan(machine: &ChannelMachine, n_max: usize) -> Result<Vec<ScanRow>, SearchError> {
    rate_scan_capped(machine, n_max, DEFAULT_WORD_CAP, DEFAULT_PAIR_CAP)
}

pub fn rate_scan_capped(
    machine: &ChannelMachine,
    n_max: usize,
    word_cap: usize,
    pair_cap: usize,
) -> Result<Vec<ScanRow>, SearchError> {
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let graph = match confusability_capped(machine, n, word_cap, pair_cap) {
            Ok(g) => g,
            Err(SearchError::TooManyWords { .. }) | Err(SearchError::TooManyOutputs { .. }) => {
                break;
            }
            Err(e) => return Err(e),
        };
        let mode = if graph.num_words() <= EXACT_WORD_LIMIT {
            SearchMode::Exact
        } else {
            SearchMode::Greedy
        };
        let code = max_zero_error_code(&graph, mode)?;
        rows.push(ScanRow {
            n,
            size: code.words.len(),
            rate: code.rate(machine.q()),
            exact: code.exact,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{
        build_noiseless, build_sliding_window_erasure, build_sliding_window_symmetric,
        SlidingWindowSpec,
    };
    use crate::machine::ChannelKind;

    fn sw31() -> ChannelMachine {
        build_sliding_window_erasure(SlidingWindowSpec::new(3, 1, 2).unwrap())
    }

    #[test]
    fn known_adjacency_pairs_at_blocklength_three() {
        let g = confusability(&sw31(), 3).unwrap();
        let idx = |bits: [u8; 3]| -> usize {
            bits.iter().fold(0usize, |acc, &b| acc * 2 + b as usize)
        };
        assert!(!g.adjacent(idx([0, 0, 0]), idx([0, 1, 1])));
        assert!(g.adjacent(idx([0, 0, 0]), idx([0, 0, 1])));
    }

    #[test]
    fn noiseless_machine_has_empty_confusability() {
        let m = build_noiseless(ChannelKind::Erasure, 2);
        let g = confusability(&m, 3).unwrap();
        for i in 0..g.num_words() {
            assert_eq!(g.degree(i), 0);
        }
    }

    #[test]
    fn parity_code_is_optimal_at_blocklength_three() {
        let g = confusability(&sw31(), 3).unwrap();
        let code = max_zero_error_code(&g, SearchMode::Exact).unwrap();
        assert_eq!(code.words.len(), 4);
        assert!((code.rate(2) - 2.0 / 3.0).abs() < 1e-12);
        assert!(verify_zero_error(&sw31(), &code.words));
    }

    #[test]
    fn symmetric_2_1_is_fully_confusable() {
        let m = build_sliding_window_symmetric(SlidingWindowSpec::new(2, 1, 2).unwrap());
        for n in 2..=4 {
            let g = confusability(&m, n).unwrap();
            let code = max_zero_error_code(&g, SearchMode::Exact).unwrap();
            assert_eq!(code.words.len(), 1, "n={n}");
        }
    }

    #[test]
    fn empty_adjacency_returns_all_words() {
        let m = build_noiseless(ChannelKind::Erasure, 2);
        let g = confusability(&m, 4).unwrap();
        let code = max_zero_error_code(&g, SearchMode::Exact).unwrap();
        assert_eq!(code.words.len(), 16);
    }

    #[test]
    fn greedy_never_beats_exact() {
        for n in 1..=4 {
            let g = confusability(&sw31(), n).unwrap();
            let exact = max_zero_error_code(&g, SearchMode::Exact).unwrap();
            let greedy = max_zero_error_code(&g, SearchMode::Greedy).unwrap();
            assert!(greedy.words.len() <= exact.words.len(), "n={n}");
            assert!(verify_zero_error(&sw31(), &greedy.words));
        }
    }

    #[test]
    fn rate_scan_improves_at_blocklength_three() {
        let rows = rate_scan(&sw31(), 3).unwrap();
        assert_eq!(rows.len(), 3);
        let best = rows.iter().map(|r| r.rate).fold(0.0f64, f64::max);
        assert!((best - 2.0 / 3.0).abs() < 1e-12);
        assert!(rows.iter().all(|r| r.exact));
    }

    #[test]
    fn word_cap_stops_the_scan() {
        let rows = rate_scan_capped(&sw31(), 20, 64, DEFAULT_PAIR_CAP).unwrap();
        assert_eq!(rows.last().unwrap().n, 6);
    }

    #[test]
    fn verify_rejects_confusable_pairs() {
        let m = sw31();
        assert!(!verify_zero_error(&m, &[vec![0, 0, 0], vec![0, 0, 1]]));
    }
}
