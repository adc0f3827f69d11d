//! Directed-graph representation of channel state machines.
//!
//! A channel machine is a strongly connected directed graph whose edges are
//! labelled with noise symbols. A walk on the graph is exactly an admissible
//! noise sequence; the graph carries no probabilities.

use std::collections::BTreeSet;

use num::BigUint;
use thiserror::Error;

/// Error semantics of a channel: erase the symbol, or add noise mod q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    Erasure,
    AdditiveNoise,
}

/// One labelled transition of the noise process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub noise: u8,
}

impl Edge {
    /// An edge is an error edge when its noise symbol is nonzero,
    /// for both channel kinds.
    pub fn is_error(&self) -> bool {
        self.noise != 0
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("state transition graph is not strongly connected")]
    NotStronglyConnected,
    #[error("state {state} has two outgoing edges with noise symbol {noise}")]
    DuplicateNoiseEdge { state: usize, noise: u8 },
    #[error("state {state} has no outgoing edge")]
    DanglingState { state: usize },
    #[error("noise symbol {noise} on an edge from state {state} is out of range")]
    NoiseOutOfRange { state: usize, noise: u8 },
    #[error("edge endpoint {state} is not a valid state index")]
    BadStateIndex { state: usize },
    #[error("input alphabet size must be at least 2, got {q}")]
    AlphabetTooSmall { q: u8 },
    #[error("machine must have at least one state")]
    NoStates,
}

/// Cap on enumerated noise/output sequences.
pub const DEFAULT_SEQUENCE_CAP: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("enumeration exceeds the size cap of {cap} sequences")]
pub struct SizeCapError {
    pub cap: usize,
}

/// Finite-state machine governing a channel's noise process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelMachine {
    kind: ChannelKind,
    q: u8,
    state_names: Vec<String>,
    edges: Vec<Edge>,
}

impl ChannelMachine {
    /// Builds a machine and checks every structural invariant.
    pub fn new(
        kind: ChannelKind,
        q: u8,
        state_names: Vec<String>,
        edges: Vec<Edge>,
    ) -> Result<Self, MachineError> {
        let machine = Self::new_unchecked(kind, q, state_names, edges);
        machine.validate()?;
        Ok(machine)
    }

    /// Builds without validation. Useful for constructing deliberately
    /// broken machines in mutation tests.
    pub fn new_unchecked(
        kind: ChannelKind,
        q: u8,
        state_names: Vec<String>,
        edges: Vec<Edge>,
    ) -> Self {
        Self {
            kind,
            q,
            state_names,
            edges,
        }
    }

    /// Checks all invariants: alphabet size, noise ranges, one edge per
    /// noise symbol per state, no dangling state, strong connectivity.
    pub fn validate(&self) -> Result<(), MachineError> {
        let n = self.state_names.len();
        if n == 0 {
            return Err(MachineError::NoStates);
        }
        if self.q < 2 {
            return Err(MachineError::AlphabetTooSmall { q: self.q });
        }
        for e in &self.edges {
            if e.from >= n {
                return Err(MachineError::BadStateIndex { state: e.from });
            }
            if e.to >= n {
                return Err(MachineError::BadStateIndex { state: e.to });
            }
            let in_range = match self.kind {
                ChannelKind::Erasure => e.noise <= 1,
                ChannelKind::AdditiveNoise => e.noise < self.q,
            };
            if !in_range {
                return Err(MachineError::NoiseOutOfRange {
                    state: e.from,
                    noise: e.noise,
                });
            }
        }
        let mut seen = BTreeSet::new();
        for e in &self.edges {
            if !seen.insert((e.from, e.noise)) {
                return Err(MachineError::DuplicateNoiseEdge {
                    state: e.from,
                    noise: e.noise,
                });
            }
        }
        let mut has_out = vec![false; n];
        for e in &self.edges {
            has_out[e.from] = true;
        }
        if let Some(s) = has_out.iter().position(|&b| !b) {
            return Err(MachineError::DanglingState { state: s });
        }
        // strong connectivity: forward traversal plus traversal on the transpose
        if !self.reaches_all(false) || !self.reaches_all(true) {
            return Err(MachineError::NotStronglyConnected);
        }
        Ok(())
    }

    fn reaches_all(&self, transpose: bool) -> bool {
        let n = self.state_names.len();
        let mut visited = vec![false; n];
        let mut stack = vec![0usize];
        visited[0] = true;
        while let Some(s) = stack.pop() {
            for e in &self.edges {
                let (u, v) = if transpose {
                    (e.to, e.from)
                } else {
                    (e.from, e.to)
                };
                if u == s && !visited[v] {
                    visited[v] = true;
                    stack.push(v);
                }
            }
        }
        visited.into_iter().all(|b| b)
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.state_names[s]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn outgoing(&self, s: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.from == s)
    }

    pub fn edge_with_noise(&self, s: usize, noise: u8) -> Option<&Edge> {
        self.edges.iter().find(|e| e.from == s && e.noise == noise)
    }

    /// 0/1 adjacency matrix. Parallel edges between the same state pair
    /// collapse to a single 1; counting that needs edge multiplicity goes
    /// through noise-sequence enumeration.
    pub fn adjacency(&self) -> AdjacencyMatrix {
        let n = self.num_states();
        let mut entries = vec![vec![0u8; n]; n];
        for e in &self.edges {
            entries[e.from][e.to] = 1;
        }
        AdjacencyMatrix { entries }
    }

    /// All admissible noise sequences of length `n` starting from `s0`.
    pub fn noise_sequences(
        &self,
        s0: usize,
        n: usize,
    ) -> Result<BTreeSet<Vec<u8>>, SizeCapError> {
        self.noise_sequences_capped(s0, n, DEFAULT_SEQUENCE_CAP)
    }

    /// Depth-first enumeration of admissible noise sequences, erroring out
    /// once more than `cap` sequences would be produced.
    pub fn noise_sequences_capped(
        &self,
        s0: usize,
        n: usize,
        cap: usize,
    ) -> Result<BTreeSet<Vec<u8>>, SizeCapError> {
        let mut out = BTreeSet::new();
        let mut prefix = Vec::with_capacity(n);
        self.dfs_noise(s0, n, cap, &mut prefix, &mut out)?;
        Ok(out)
    }

    fn dfs_noise(
        &self,
        s: usize,
        remaining: usize,
        cap: usize,
        prefix: &mut Vec<u8>,
        out: &mut BTreeSet<Vec<u8>>,
    ) -> Result<(), SizeCapError> {
        if remaining == 0 {
            if out.len() >= cap {
                return Err(SizeCapError { cap });
            }
            out.insert(prefix.clone());
            return Ok(());
        }
        // clone the outgoing edges to keep the borrow checker out of the recursion
        let outs: Vec<Edge> = self.outgoing(s).copied().collect();
        for e in outs {
            prefix.push(e.noise);
            self.dfs_noise(e.to, remaining - 1, cap, prefix, out)?;
            prefix.pop();
        }
        Ok(())
    }
}

/// 0/1 adjacency matrix of a channel machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    entries: Vec<Vec<u8>>,
}

impl AdjacencyMatrix {
    pub fn from_rows(entries: Vec<Vec<u8>>) -> Self {
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> u8 {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.entries
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.entries
            .iter()
            .map(|r| r.iter().map(|&x| x as usize).sum())
            .collect()
    }

    /// Strong connectivity of the digraph the matrix describes.
    pub fn is_irreducible(&self) -> bool {
        let n = self.dim();
        if n == 0 {
            return false;
        }
        let reach = |transpose: bool| {
            let mut visited = vec![false; n];
            let mut stack = vec![0usize];
            visited[0] = true;
            while let Some(s) = stack.pop() {
                for v in 0..n {
                    let hit = if transpose {
                        self.entries[v][s] != 0
                    } else {
                        self.entries[s][v] != 0
                    };
                    if hit && !visited[v] {
                        visited[v] = true;
                        stack.push(v);
                    }
                }
            }
            visited.into_iter().all(|b| b)
        };
        reach(false) && reach(true)
    }

    /// Number of n-step walks starting at `s0`, i.e. the `s0` row sum of the
    /// n-th matrix power, in exact arbitrary-precision arithmetic.
    pub fn count_walks(&self, s0: usize, n: usize) -> BigUint {
        let pow = self.big_pow(n);
        pow[s0].iter().sum()
    }

    /// Matrix power by repeated squaring over `BigUint`.
    fn big_pow(&self, mut n: usize) -> Vec<Vec<BigUint>> {
        let dim = self.dim();
        let mut result = identity(dim);
        let mut base: Vec<Vec<BigUint>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(|&x| BigUint::from(x)).collect())
            .collect();
        while n > 0 {
            if n & 1 == 1 {
                result = big_mul(&result, &base);
            }
            n >>= 1;
            if n > 0 {
                base = big_mul(&base, &base);
            }
        }
        result
    }
}

fn identity(n: usize) -> Vec<Vec<BigUint>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigUint::from(u8::from(i == j)))
                .collect()
        })
        .collect()
}

fn big_mul(a: &[Vec<BigUint>], b: &[Vec<BigUint>]) -> Vec<Vec<BigUint>> {
    let n = a.len();
    let mut c = vec![vec![BigUint::default(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == BigUint::default() {
                continue;
            }
            for j in 0..n {
                let term = &a[i][k] * &b[k][j];
                c[i][j] += term;
            }
        }
    }
    c
}

/// The two-state machine with a self-loop on the clear state: noise
/// sequences are exactly the binary words without consecutive ones.
pub fn no_consecutive_ones(kind: ChannelKind, q: u8) -> ChannelMachine {
    ChannelMachine::new(
        kind,
        q,
        vec!["s1".into(), "s2".into()],
        vec![
            Edge { from: 0, to: 0, noise: 0 },
            Edge { from: 0, to: 1, noise: 1 },
            Edge { from: 1, to: 0, noise: 0 },
        ],
    )
    .expect("two-state machine is valid")
}

/// Single state, single error-free self-loop.
pub fn noiseless(kind: ChannelKind, q: u8) -> ChannelMachine {
    ChannelMachine::new(
        kind,
        q,
        vec!["s1".into()],
        vec![Edge { from: 0, to: 0, noise: 0 }],
    )
    .expect("noiseless machine is valid")
}
