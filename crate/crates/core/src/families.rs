//! Constructors for the studied channel families and the channel
//! transfer semantics (input + noise -> output).
//!
//! Window-based families represent the channel state as the last `w` noise
//! symbols, most recent on the right; a transition shifts the window left
//! and appends the new symbol. Builders seed from the all-clear window and
//! keep the strongly connected component of the seed.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::{ChannelKind, ChannelMachine, Edge, SizeCapError, DEFAULT_SEQUENCE_CAP};

/// Parameters of a sliding-window channel: at most `d` errors in every
/// window of `w` consecutive uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlidingWindowSpec {
    pub w: usize,
    pub d: usize,
    pub q: u8,
}

impl SlidingWindowSpec {
    pub fn new(w: usize, d: usize, q: u8) -> Result<Self, FamilyError> {
        if w == 0 {
            return Err(FamilyError::BadParameter("w must be at least 1".into()));
        }
        if d > w {
            return Err(FamilyError::BadParameter("d must not exceed w".into()));
        }
        if q < 2 {
            return Err(FamilyError::BadParameter("q must be at least 2".into()));
        }
        Ok(Self { w, d, q })
    }
}

/// Parameters of the Gilbert-Elliot-like channel: every window of `w` uses
/// carries either at most `n_scattered` isolated erasures or one burst of
/// length at most `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GilbertElliotSpec {
    pub n_scattered: usize,
    pub b: usize,
    pub w: usize,
    pub q: u8,
}

impl GilbertElliotSpec {
    pub fn new(n_scattered: usize, b: usize, w: usize, q: u8) -> Result<Self, FamilyError> {
        if !(n_scattered <= b && b <= w) {
            return Err(FamilyError::BadParameter("need N <= B <= W".into()));
        }
        if q < 2 {
            return Err(FamilyError::BadParameter("q must be at least 2".into()));
        }
        Ok(Self { n_scattered, b, w, q })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("invalid channel parameter: {0}")]
    BadParameter(String),
    #[error("unknown channel family {0:?}")]
    UnknownFamily(String),
    #[error("malformed family spec {0:?}, expected name:key=value,...")]
    Malformed(String),
    #[error("state {state} has no outgoing edge with noise symbol {noise}")]
    NoSuchNoiseEdge { state: usize, noise: u8 },
}

fn digit(v: u8) -> char {
    char::from_digit(u32::from(v), 36).expect("noise symbol fits one digit")
}

/// Generic window-machine builder: states are the windows satisfying
/// `valid`, reachable from the all-clear window, restricted to the seed's
/// strongly connected component.
fn build_window_machine(
    kind: ChannelKind,
    q: u8,
    w: usize,
    noise_symbols: u8,
    valid: impl Fn(&[u8]) -> bool,
) -> ChannelMachine {
    build_window_machine_gated(kind, q, w, noise_symbols, valid, |_, _| true)
}

/// Like [`build_window_machine`] but with an extra transition gate that may
/// inspect the departing window, for families whose admissible transitions
/// depend on more than the arriving window.
fn build_window_machine_gated(
    kind: ChannelKind,
    q: u8,
    w: usize,
    noise_symbols: u8,
    valid: impl Fn(&[u8]) -> bool,
    allowed: impl Fn(&[u8], u8) -> bool,
) -> ChannelMachine {
    let seed = vec![0u8; w];
    assert!(valid(&seed), "the all-clear window must be a valid state");
    let mut index: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    let mut windows: Vec<Vec<u8>> = Vec::new();
    let mut queue = VecDeque::new();
    index.insert(seed.clone(), 0);
    windows.push(seed.clone());
    queue.push_back(seed);
    let mut raw_edges: Vec<Edge> = Vec::new();
    while let Some(win) = queue.pop_front() {
        let from = index[&win];
        for v in 0..noise_symbols {
            if !allowed(&win, v) {
                continue;
            }
            let mut next = win[1..].to_vec();
            next.push(v);
            if !valid(&next) {
                continue;
            }
            let to = *index.entry(next.clone()).or_insert_with(|| {
                windows.push(next.clone());
                queue.push_back(next);
                windows.len() - 1
            });
            raw_edges.push(Edge { from, to, noise: v });
        }
    }
    restrict_to_seed_component(kind, q, windows, raw_edges)
}

/// Keeps only the states mutually reachable with state 0 and reindexes.
fn restrict_to_seed_component(
    kind: ChannelKind,
    q: u8,
    windows: Vec<Vec<u8>>,
    edges: Vec<Edge>,
) -> ChannelMachine {
    let n = windows.len();
    let reach = |transpose: bool| {
        let mut visited = vec![false; n];
        let mut stack = vec![0usize];
        visited[0] = true;
        while let Some(s) = stack.pop() {
            for e in &edges {
                let (u, v) = if transpose { (e.to, e.from) } else { (e.from, e.to) };
                if u == s && !visited[v] {
                    visited[v] = true;
                    stack.push(v);
                }
            }
        }
        visited
    };
    let fwd = reach(false);
    let bwd = reach(true);
    let keep: Vec<usize> = (0..n).filter(|&s| fwd[s] && bwd[s]).collect();
    let mut remap = vec![usize::MAX; n];
    for (new, &old) in keep.iter().enumerate() {
        remap[old] = new;
    }
    let names: Vec<String> = keep
        .iter()
        .map(|&s| windows[s].iter().map(|&v| digit(v)).collect())
        .collect();
    let kept_edges: Vec<Edge> = edges
        .iter()
        .filter(|e| remap[e.from] != usize::MAX && remap[e.to] != usize::MAX)
        .map(|e| Edge {
            from: remap[e.from],
            to: remap[e.to],
            noise: e.noise,
        })
        .collect();
    ChannelMachine::new(kind, q, names, kept_edges).expect("built machine is valid")
}

/// Erasure channel with at most `d` erasures per window of `w` uses.
pub fn build_sliding_window_erasure(spec: SlidingWindowSpec) -> ChannelMachine {
    let d = spec.d;
    build_window_machine(ChannelKind::Erasure, spec.q, spec.w, 2, |win| {
        win.iter().filter(|&&v| v != 0).count() <= d
    })
}

/// Additive-noise channel with at most `d` symbol swaps per window.
pub fn build_sliding_window_symmetric(spec: SlidingWindowSpec) -> ChannelMachine {
    let d = spec.d;
    build_window_machine(ChannelKind::AdditiveNoise, spec.q, spec.w, spec.q, |win| {
        win.iter().filter(|&&v| v != 0).count() <= d
    })
}

/// Erasure channel whose errors come in bursts of at most `d` consecutive
/// symbols; once a burst ends, no further error until the window of `w`
/// past uses has cleared.
pub fn build_bursty(w: usize, d: usize, q: u8) -> ChannelMachine {
    assert!(d < w, "burst bound must be shorter than the window");
    build_window_machine_gated(
        ChannelKind::Erasure,
        q,
        w,
        2,
        |win| {
            let marks = win.iter().filter(|&&v| v != 0).count();
            if marks > d {
                return false;
            }
            let first = win.iter().position(|&v| v != 0);
            match first {
                None => true,
                Some(i) => win[i..i + marks].iter().all(|&v| v != 0),
            }
        },
        // a new error may extend an ongoing burst (all marks at the recent
        // end of the window) but not start until the old burst clears
        |win, v| {
            if v == 0 {
                return true;
            }
            let marks = win.iter().filter(|&&b| b != 0).count();
            marks < d && win[w - marks..].iter().all(|&b| b != 0)
        },
    )
}

/// Erasure channel that permits bursts of up to `max_burst` errors,
/// each followed by at least `guard` error-free uses.
pub fn build_guard_space(max_burst: usize, guard: usize, q: u8) -> ChannelMachine {
    assert!(max_burst >= 1 && guard >= 1);
    // states: idle, b_1..b_max_burst (inside a burst), g_1..g_guard (guard run)
    let mut names = vec!["idle".to_string()];
    for i in 1..=max_burst {
        names.push(format!("b{i}"));
    }
    for j in 1..=guard {
        names.push(format!("g{j}"));
    }
    let idle = 0usize;
    let b = |i: usize| i; // b_i at index i, 1-based
    let g = |j: usize| max_burst + j;
    let mut edges = vec![
        Edge { from: idle, to: idle, noise: 0 },
        Edge { from: idle, to: b(1), noise: 1 },
    ];
    for i in 1..=max_burst {
        edges.push(Edge { from: b(i), to: g(1), noise: 0 });
        if i < max_burst {
            edges.push(Edge { from: b(i), to: b(i + 1), noise: 1 });
        }
    }
    for j in 1..guard {
        edges.push(Edge { from: g(j), to: g(j + 1), noise: 0 });
    }
    edges.push(Edge { from: g(guard), to: idle, noise: 0 });
    edges.push(Edge { from: g(guard), to: b(1), noise: 1 });
    ChannelMachine::new(ChannelKind::Erasure, q, names, edges).expect("guard machine is valid")
}

/// Gilbert-Elliot-like erasure channel: each window of `w` uses carries
/// at most `n_scattered` isolated erasures or a single burst of length
/// at most `b`.
pub fn build_gilbert_elliot(spec: GilbertElliotSpec) -> ChannelMachine {
    let (ns, b) = (spec.n_scattered, spec.b);
    build_window_machine(ChannelKind::Erasure, spec.q, spec.w, 2, |win| {
        let marks = win.iter().filter(|&&v| v != 0).count();
        if marks <= ns {
            return true;
        }
        if marks > b {
            return false;
        }
        let first = win.iter().position(|&v| v != 0).unwrap();
        win[first..first + marks].iter().all(|&v| v != 0)
    })
}

/// Single noiseless state.
pub fn build_noiseless(kind: ChannelKind, q: u8) -> ChannelMachine {
    crate::machine::noiseless(kind, q)
}

/// One channel output: a q-ary symbol, or the erasure mark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OutputSymbol {
    Symbol(u8),
    Erasure,
}

impl fmt::Display for OutputSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputSymbol::Symbol(v) => write!(f, "{}", digit(*v)),
            OutputSymbol::Erasure => write!(f, "*"),
        }
    }
}

/// Applies one channel step at `state` with the given noise symbol.
pub fn transfer(
    machine: &ChannelMachine,
    state: usize,
    input: u8,
    noise: u8,
) -> Result<(OutputSymbol, usize), FamilyError> {
    let edge = machine
        .edge_with_noise(state, noise)
        .ok_or(FamilyError::NoSuchNoiseEdge { state, noise })?;
    let out = match machine.kind() {
        ChannelKind::Erasure => {
            if noise == 0 {
                OutputSymbol::Symbol(input)
            } else {
                OutputSymbol::Erasure
            }
        }
        ChannelKind::AdditiveNoise => {
            OutputSymbol::Symbol((input + noise) % machine.q())
        }
    };
    Ok((out, edge.to))
}

/// All output words the channel can produce for `input_word` from `s0`.
pub fn output_set(
    machine: &ChannelMachine,
    s0: usize,
    input_word: &[u8],
) -> Result<BTreeSet<Vec<OutputSymbol>>, SizeCapError> {
    output_set_capped(machine, s0, input_word, DEFAULT_SEQUENCE_CAP)
}

pub fn output_set_capped(
    machine: &ChannelMachine,
    s0: usize,
    input_word: &[u8],
    cap: usize,
) -> Result<BTreeSet<Vec<OutputSymbol>>, SizeCapError> {
    let noise_seqs = machine.noise_sequences_capped(s0, input_word.len(), cap)?;
    let mut out = BTreeSet::new();
    for v in noise_seqs {
        let mut s = s0;
        let mut word = Vec::with_capacity(input_word.len());
        for (t, &noise) in v.iter().enumerate() {
            let (y, next) = transfer(machine, s, input_word[t], noise)
                .expect("noise sequence admissible by construction");
            word.push(y);
            s = next;
        }
        out.insert(word);
    }
    Ok(out)
}

/// Parses a CLI-facing family spec string such as "sw-erasure:w=3,d=1,q=2".
pub fn parse_family(spec: &str) -> Result<ChannelMachine, FamilyError> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n, r),
        None => return Err(FamilyError::Malformed(spec.to_string())),
    };
    let mut params: BTreeMap<String, usize> = BTreeMap::new();
    for part in rest.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| FamilyError::Malformed(spec.to_string()))?;
        let value: usize = v
            .parse()
            .map_err(|_| FamilyError::Malformed(spec.to_string()))?;
        params.insert(k.trim().to_string(), value);
    }
    let get = |key: &str| -> Result<usize, FamilyError> {
        params
            .get(key)
            .copied()
            .ok_or_else(|| FamilyError::BadParameter(format!("missing parameter {key}")))
    };
    let q = |key: &str| -> Result<u8, FamilyError> {
        let v = get(key)?;
        u8::try_from(v).map_err(|_| FamilyError::BadParameter(format!("{key} too large")))
    };
    match name {
        "sw-erasure" => {
            let spec = SlidingWindowSpec::new(get("w")?, get("d")?, q("q")?)?;
            Ok(build_sliding_window_erasure(spec))
        }
        "sw-symmetric" => {
            let spec = SlidingWindowSpec::new(get("w")?, get("d")?, q("q")?)?;
            Ok(build_sliding_window_symmetric(spec))
        }
        "bursty" => {
            let (w, d) = (get("w")?, get("d")?);
            if d >= w {
                return Err(FamilyError::BadParameter("need d < w".into()));
            }
            Ok(build_bursty(w, d, q("q")?))
        }
        "guard" => {
            let (b, g) = (get("b")?, get("g")?);
            if b < 1 || g < 1 {
                return Err(FamilyError::BadParameter("need b >= 1 and g >= 1".into()));
            }
            Ok(build_guard_space(b, g, q("q")?))
        }
        "ge" => {
            let spec = GilbertElliotSpec::new(get("N")?, get("B")?, get("W")?, q("q")?)?;
            Ok(build_gilbert_elliot(spec))
        }
        "noiseless" => Ok(build_noiseless(ChannelKind::Erasure, q("q")?)),
        other => Err(FamilyError::UnknownFamily(other.to_string())),
    }
}
