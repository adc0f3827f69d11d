//! Maximin information on finite joint ranges.
//!
//! A joint range lists the feasible (input word, output word) pairs of a
//! channel. Inputs sharing a conditional range given some output are
//! overlap connected; the block count of the resulting partition measures
//! how many inputs a decoder can always tell apart.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codesearch::{confusability_capped, max_zero_error_code, SearchError, SearchMode};
use crate::families::{output_set_capped, OutputSymbol};
use crate::machine::{ChannelMachine, SizeCapError, DEFAULT_SEQUENCE_CAP};

/// Feasible (input, output) pairs for a fixed input set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointRange {
    q: u8,
    pairs: BTreeSet<(Vec<u8>, Vec<OutputSymbol>)>,
}

impl JointRange {
    pub fn new(q: u8, pairs: BTreeSet<(Vec<u8>, Vec<OutputSymbol>)>) -> Self {
        assert!(!pairs.is_empty(), "joint range must be nonempty");
        Self { q, pairs }
    }

    pub fn pairs(&self) -> &BTreeSet<(Vec<u8>, Vec<OutputSymbol>)> {
        &self.pairs
    }

    /// The marginal input range.
    pub fn inputs(&self) -> Vec<Vec<u8>> {
        let set: BTreeSet<&Vec<u8>> = self.pairs.iter().map(|(x, _)| x).collect();
        set.into_iter().cloned().collect()
    }
}

/// Partition of the input range into overlap-connected blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapPartition {
    pub blocks: Vec<BTreeSet<Vec<u8>>>,
}

/// Joint range of a channel over `input_set`, with the initial state free:
/// every output reachable from any initial state counts as feasible.
pub fn joint_range(
    machine: &ChannelMachine,
    input_set: &[Vec<u8>],
) -> Result<JointRange, SizeCapError> {
    assert!(!input_set.is_empty(), "input set must be nonempty");
    let mut pairs = BTreeSet::new();
    for x in input_set {
        for s0 in 0..machine.num_states() {
            for y in output_set_capped(machine, s0, x, DEFAULT_SEQUENCE_CAP)? {
                pairs.insert((x.clone(), y));
            }
        }
    }
    Ok(JointRange::new(machine.q(), pairs))
}

/// Connected components of the graph linking two inputs whenever some
/// conditional range given an output contains both, via union-find.
pub fn overlap_partition(jr: &JointRange) -> OverlapPartition {
    let inputs = jr.inputs();
    let index: BTreeMap<&Vec<u8>, usize> =
        inputs.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let mut uf = UnionFind::new(inputs.len());
    let mut by_output: BTreeMap<&Vec<OutputSymbol>, Vec<usize>> = BTreeMap::new();
    for (x, y) in jr.pairs() {
        by_output.entry(y).or_default().push(index[x]);
    }
    for members in by_output.values() {
        for w in members.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let mut blocks: BTreeMap<usize, BTreeSet<Vec<u8>>> = BTreeMap::new();
    for (i, x) in inputs.iter().enumerate() {
        blocks.entry(uf.find(i)).or_default().insert(x.clone());
    }
    OverlapPartition {
        blocks: blocks.into_values().collect(),
    }
}

/// log_q of the overlap-partition block count.
pub fn maximin_info(jr: &JointRange) -> f64 {
    let blocks = overlap_partition(jr).blocks.len();
    (blocks as f64).ln() / f64::from(jr.q).ln()
}

/// How the subset search of [`verify_capacity_oracle`] was performed.
#[derive(Debug, Clone, PartialEq)]
pub enum SubsetSearch {
    /// every nonempty input subset was evaluated
    Full { subsets: usize, max_info: f64 },
    /// the optimal-code witness plus random subsets
    Sampled { samples: usize, max_info: f64 },
}

/// Comparison of the maximin-information supremum against the exact
/// zero-error code size at one blocklength.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub blocklength: usize,
    pub max_code_size: usize,
    /// maximin information with the input range set to the optimal code
    pub code_info: f64,
    pub search: SubsetSearch,
    /// code_info equals log_q(max_code_size) and no subset beat it
    pub consistent: bool,
}

/// Cross-checks that the best maximin information over input subsets of
/// length n+1 words equals the log of the exact zero-error code size.
/// Enumerates all subsets when there are at most 2^16, otherwise samples
/// `samples` random subsets alongside the optimal-code witness.
pub fn verify_capacity_oracle(
    machine: &ChannelMachine,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<OracleReport, SearchError> {
    let len = n + 1;
    let q = machine.q();
    let graph = confusability_capped(machine, len, 64, crate::codesearch::DEFAULT_PAIR_CAP)?;
    let code = max_zero_error_code(&graph, SearchMode::Exact)?;
    let m_star = code.words.len();
    let target = (m_star as f64).ln() / f64::from(q).ln();

    let code_jr = joint_range(machine, &code.words).expect("within cap");
    let code_info = maximin_info(&code_jr);

    let num_words = graph.num_words();
    let all_words: Vec<Vec<u8>> = (0..num_words).map(|i| graph.word(i)).collect();
    let tol = 1e-9;
    let search = if num_words <= 16 {
        let mut max_info = f64::NEG_INFINITY;
        let subsets = (1usize << num_words) - 1;
        for mask in 1..=subsets {
            let subset: Vec<Vec<u8>> = (0..num_words)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| all_words[i].clone())
                .collect();
            let jr = joint_range(machine, &subset).expect("within cap");
            max_info = max_info.max(maximin_info(&jr));
        }
        SubsetSearch::Full { subsets, max_info }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut max_info = code_info;
        for _ in 0..samples {
            let subset: Vec<Vec<u8>> = all_words
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .cloned()
                .collect();
            if subset.is_empty() {
                continue;
            }
            let jr = joint_range(machine, &subset).expect("within cap");
            max_info = max_info.max(maximin_info(&jr));
        }
        SubsetSearch::Sampled { samples, max_info }
    };
    let max_info = match &search {
        SubsetSearch::Full { max_info, .. } | SubsetSearch::Sampled { max_info, .. } => *max_info,
    };
    let consistent = (code_info - target).abs() < tol && (max_info - target).abs() < tol;
    Ok(OracleReport {
        blocklength: len,
        max_code_size: m_star,
        code_info,
        search,
        consistent,
    })
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}
