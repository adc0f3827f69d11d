//! Zero-error and zero-error-feedback capacity computations.
//!
//! All rates are logarithms base q per channel use, so 1 means one input
//! symbol of information per use.

use num::rational::Ratio;
use num::{BigUint, ToPrimitive};
use thiserror::Error;

use crate::codesearch::{rate_scan_capped, SearchError};
use crate::cycles::{maximal_ratio, CycleStats};
use crate::families::SlidingWindowSpec;
use crate::machine::{ChannelKind, ChannelMachine};
use crate::spectral::{topological_entropy, SpectralError, DEFAULT_TOL};

pub const DEFAULT_DP_ITERATIONS: usize = 3000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CapacityError {
    #[error("operation requires an {expected:?} channel")]
    KindMismatch { expected: ChannelKind },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("confusability matrix must be symmetric")]
    AsymmetricMatrix,
    #[error("confusability matrix must have ones on the diagonal")]
    ZeroDiagonal,
}

/// One reported quantity: decimal value, exact rational when available,
/// and a short tag naming how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportValue {
    pub value: f64,
    pub exact: Option<Ratio<i64>>,
    pub method: &'static str,
}

impl ReportValue {
    fn exact_rational(r: Ratio<i64>, method: &'static str) -> Self {
        Self {
            value: *r.numer() as f64 / *r.denom() as f64,
            exact: Some(r),
            method,
        }
    }

    fn approx(value: f64, method: &'static str) -> Self {
        Self {
            value,
            exact: None,
            method,
        }
    }
}

/// Capacity summary for one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityReport {
    pub kind: ChannelKind,
    pub q: u8,
    pub tau: Ratio<i64>,
    pub h_ch: f64,
    pub c0f: ReportValue,
    pub c0_lower: ReportValue,
    pub c0_upper: ReportValue,
    pub bruteforce_rate: Option<ReportValue>,
    pub cycle: CycleStats,
}

fn require_kind(machine: &ChannelMachine, expected: ChannelKind) -> Result<(), CapacityError> {
    if machine.kind() != expected {
        return Err(CapacityError::KindMismatch { expected });
    }
    Ok(())
}

/// Feedback capacity of an erasure channel, exactly: 1 minus the maximal
/// cycle ratio.
pub fn c0f_exact(machine: &ChannelMachine) -> Result<Ratio<i64>, CapacityError> {
    require_kind(machine, ChannelKind::Erasure)?;
    Ok(Ratio::from_integer(1) - maximal_ratio(machine).tau)
}

/// Feedback capacity of an erasure channel by the iterative gain recursion,
/// run in the log domain: each error-free edge contributes one symbol,
/// each erasure edge contributes nothing, and the adversary minimizes.
/// Converges to `c0f_exact` at rate O(1/k).
pub fn c0f_erasure_dp(machine: &ChannelMachine, k_max: usize) -> Result<f64, CapacityError> {
    require_kind(machine, ChannelKind::Erasure)?;
    assert!(k_max > 0);
    let n = machine.num_states();
    let mut g = vec![0i64; n];
    for _ in 0..k_max {
        let mut next = vec![i64::MAX; n];
        for e in machine.edges() {
            let gain = i64::from(!e.is_error());
            let cand = g[e.to] + gain;
            if cand < next[e.from] {
                next[e.from] = cand;
            }
        }
        g = next;
    }
    let min = g.iter().copied().min().expect("at least one state");
    Ok(min as f64 / k_max as f64)
}

/// Entropy-based capacity bounds for an erasure channel:
/// max(0, 1 - tau - h_ch) <= C0 <= 1 - tau.
pub fn bounds_erasure(machine: &ChannelMachine) -> Result<(f64, f64), CapacityError> {
    require_kind(machine, ChannelKind::Erasure)?;
    let tau = maximal_ratio(machine).tau;
    let tau = *tau.numer() as f64 / *tau.denom() as f64;
    let h = topological_entropy(machine, DEFAULT_TOL)?;
    Ok(((1.0 - tau - h).max(0.0), 1.0 - tau))
}

/// Entropy-based capacity bounds for an additive-noise channel:
/// max(0, 1 - 2 h_ch) <= C0 <= 1 - h_ch, the upper bound being the exact
/// feedback capacity of such channels.
pub fn bounds_additive(machine: &ChannelMachine) -> Result<(f64, f64), CapacityError> {
    require_kind(machine, ChannelKind::AdditiveNoise)?;
    let h = topological_entropy(machine, DEFAULT_TOL)?;
    Ok(((1.0 - 2.0 * h).max(0.0), (1.0 - h).max(0.0)))
}

/// Size of a q-ary Hamming ball of radius r in dimension n, exactly.
pub fn hamming_ball_volume(r: usize, n: usize, q: u8) -> BigUint {
    let mut total = BigUint::from(0u8);
    for i in 0..=r.min(n) {
        total += binomial(n, i) * BigUint::from(u32::from(q) - 1).pow(i as u32);
    }
    total
}

fn binomial(n: usize, k: usize) -> BigUint {
    let mut acc = BigUint::from(1u8);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn log_base_q(x: &BigUint, q: u8) -> f64 {
    // exact enough for the dimensions in play; volumes stay far below 2^53
    let v = x.to_f64().expect("volume fits in f64");
    v.ln() / f64::from(q).ln()
}

/// Hamming-ball lower bound for sliding-window erasure channels:
/// 1 - (1/w) log_q V_d^w(q), clipped at zero.
pub fn sw_erasure_lower(spec: SlidingWindowSpec) -> f64 {
    let v = hamming_ball_volume(spec.d, spec.w, spec.q);
    (1.0 - log_base_q(&v, spec.q) / spec.w as f64).max(0.0)
}

/// Combinatorial bounds for sliding-window symmetric channels:
/// zero capacity when 2d >= w, otherwise
/// 1 - (1/w) log_q V_{2d}^w(q) <= C0 <= 1 - (d/w) log_q(q - 1).
pub fn sw_symmetric_bounds(spec: SlidingWindowSpec) -> (f64, f64) {
    if 2 * spec.d >= spec.w {
        return (0.0, 0.0);
    }
    let v = hamming_ball_volume(2 * spec.d, spec.w, spec.q);
    let lower = (1.0 - log_base_q(&v, spec.q) / spec.w as f64).max(0.0);
    let upper = 1.0
        - (spec.d as f64 / spec.w as f64) * (f64::from(spec.q) - 1.0).ln()
            / f64::from(spec.q).ln();
    (lower, upper)
}

/// Uniform-input lower bound on the independence number exponent of a
/// confusability matrix: -log_{q_block} (sum of entries / m^2).
pub fn shannon_uniform_lower(rows: &[Vec<u8>], q_block: f64) -> Result<f64, CapacityError> {
    let m = rows.len();
    for (i, row) in rows.iter().enumerate() {
        if row[i] == 0 {
            return Err(CapacityError::ZeroDiagonal);
        }
        for (j, &x) in row.iter().enumerate() {
            if x != rows[j][i] {
                return Err(CapacityError::AsymmetricMatrix);
            }
        }
    }
    let total: usize = rows
        .iter()
        .map(|r| r.iter().map(|&x| usize::from(x)).sum::<usize>())
        .sum();
    let fraction = total as f64 / (m * m) as f64;
    Ok(-(fraction.ln() / q_block.ln()))
}

/// Exact maximum number of error edges over all length-n walks from s0,
/// by a longest-path dynamic program over walk length.
pub fn max_erasures(machine: &ChannelMachine, s0: usize, n: usize) -> i64 {
    let states = machine.num_states();
    let mut best = vec![i64::MIN; states];
    best[s0] = 0;
    for _ in 0..n {
        let mut next = vec![i64::MIN; states];
        for e in machine.edges() {
            if best[e.from] == i64::MIN {
                continue;
            }
            let cand = best[e.from] + i64::from(e.is_error());
            if cand > next[e.to] {
                next[e.to] = cand;
            }
        }
        best = next;
    }
    best.into_iter().max().expect("at least one state")
}

/// Options for [`report`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ReportOptions {
    /// run a brute-force code search up to this blocklength
    pub bruteforce_n_max: Option<usize>,
}

/// Assembles the capacity summary for one channel.
pub fn report(machine: &ChannelMachine, options: ReportOptions) -> Result<CapacityReport, CapacityError> {
    let cycle = maximal_ratio(machine);
    let tau = cycle.tau;
    let h_ch = topological_entropy(machine, DEFAULT_TOL)?;
    let one = Ratio::from_integer(1);
    let (c0f, c0_lower, c0_upper) = match machine.kind() {
        ChannelKind::Erasure => {
            let (lower, _) = bounds_erasure(machine)?;
            (
                ReportValue::exact_rational(one - tau, "exact: 1 - tau"),
                ReportValue::approx(lower, "entropy lower bound: 1 - tau - h_ch"),
                ReportValue::exact_rational(one - tau, "upper bound: 1 - tau"),
            )
        }
        ChannelKind::AdditiveNoise => {
            let (lower, upper) = bounds_additive(machine)?;
            (
                ReportValue::approx(upper, "exact: 1 - h_ch"),
                ReportValue::approx(lower, "entropy lower bound: 1 - 2 h_ch"),
                ReportValue::approx(upper, "upper bound: 1 - h_ch"),
            )
        }
    };
    let bruteforce_rate = match options.bruteforce_n_max {
        None => None,
        Some(n_max) => {
            let rows = rate_scan_capped(
                machine,
                n_max,
                crate::codesearch::DEFAULT_WORD_CAP,
                crate::codesearch::DEFAULT_PAIR_CAP,
            )?;
            rows.iter()
                .map(|r| r.rate)
                .fold(None, |acc: Option<f64>, r| {
                    Some(acc.map_or(r, |a| a.max(r)))
                })
                .map(|best| ReportValue::approx(best, "brute-force code search"))
        }
    };
    Ok(CapacityReport {
        kind: machine.kind(),
        q: machine.q(),
        tau,
        h_ch,
        c0f,
        c0_lower,
        c0_upper,
        bruteforce_rate,
        cycle,
    })
}
