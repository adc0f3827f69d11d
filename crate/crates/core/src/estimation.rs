//! Bounded-error state estimation of an unstable scalar plant over a
//! finite-state erasure channel.
//!
//! The coder quantizes the scaled estimation error once per epoch, protects
//! the bits with a parity code matched to the channel's window constraint,
//! and both sides run the same expansion/contraction recursion for the
//! error bound delta. Whether delta converges or diverges depends on the
//! plant's expansion rate against the code rate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::capacity::CapacityReport;
use crate::families::{transfer, OutputSymbol};
use crate::machine::{ChannelKind, ChannelMachine};

/// Scalar plant X(t+1) = a X(t) + V(t) with |V(t)| < process_noise_bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantSpec {
    pub a: f64,
    pub process_noise_bound: f64,
    pub initial_state: f64,
}

impl PlantSpec {
    pub fn new(a: f64) -> Self {
        assert!(a > 1.0, "plant must be unstable");
        Self {
            a,
            process_noise_bound: 1.0,
            initial_state: 0.9,
        }
    }

    /// Rate at which the plant generates uncertainty, in base-q symbols.
    pub fn h_lin(&self, q: u8) -> f64 {
        self.a.ln() / f64::from(q).ln()
    }
}

/// Epoch length, code rate, and quantizer/bound parameters of the coder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoderConfig {
    pub epoch_length: usize,
    pub code_rate: f64,
    pub info_bits: usize,
    pub delta_star: f64,
}

impl CoderConfig {
    /// Default configuration: info_bits = floor(code_rate * n), and
    /// delta_star = a^n + noise_bound (a^n - 1)/(a - 1), which exceeds the
    /// plant's per-epoch expansion a^n by the worst accumulated disturbance
    /// and therefore keeps the quantizer from saturating.
    pub fn new(epoch_length: usize, code_rate: f64, plant: &PlantSpec) -> Self {
        let n = epoch_length as f64;
        let a = plant.a;
        let expansion = a.powf(n);
        let disturbance = plant.process_noise_bound * 0.99 * (expansion - 1.0) / (a - 1.0);
        Self {
            epoch_length,
            code_rate,
            info_bits: (code_rate * n + 1e-9).floor() as usize,
            delta_star: expansion + disturbance,
        }
    }

    pub fn quantizer_levels(&self) -> u64 {
        1u64 << self.info_bits
    }
}

/// How the channel adversary picks noise edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoisePolicy {
    /// take an error edge whenever one exists
    MaxErasure,
    /// take the clear edge whenever one exists
    Zero,
    /// try the error edge on even steps, the clear edge on odd steps
    Alternating,
    /// uniform choice among outgoing edges, reproducible from the seed
    Seeded(u64),
}

/// How the plant disturbance is picked each step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DisturbancePolicy {
    /// 0.99 * sign(current estimation error), with sign(0) = +1
    Worst,
    Zero,
    /// +0.99 on even steps, -0.99 on odd steps
    Alternating,
    /// uniform in (-0.99, 0.99), reproducible from the seed
    Seeded(u64),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EstimationError {
    #[error("parity coding requires a binary erasure channel")]
    ChannelMismatch,
    #[error("epoch length must be a positive multiple of 3, got {0}")]
    BadEpochLength(usize),
    #[error("info word length must be even, got {0}")]
    BadInfoLength(usize),
    #[error("received word of length {0} is not a multiple of 3")]
    BadReceivedLength(usize),
    #[error("a parity triple carries more than one erasure")]
    TooManyErasures,
}

/// One epoch-boundary record of the simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub t: usize,
    pub x: f64,
    pub xhat: f64,
    pub error: f64,
    pub delta: f64,
    /// erasures during the transmission that started at this epoch
    pub erasures: usize,
    /// the quantizer saw |error| > delta at this epoch
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationTrace {
    pub records: Vec<EpochRecord>,
}

impl EstimationTrace {
    pub fn max_abs_error(&self) -> f64 {
        self.records.iter().map(|r| r.error.abs()).fold(0.0, f64::max)
    }

    pub fn max_delta(&self) -> f64 {
        self.records.iter().map(|r| r.delta).fold(0.0, f64::max)
    }

    pub fn any_saturation(&self) -> bool {
        self.records.iter().any(|r| r.saturated)
    }
}

/// Packs pairs of information bits into triples whose third bit is the
/// XOR of the first two.
pub fn parity_encode(info: &[u8]) -> Result<Vec<u8>, EstimationError> {
    if info.len() % 2 != 0 {
        return Err(EstimationError::BadInfoLength(info.len()));
    }
    let mut word = Vec::with_capacity(info.len() / 2 * 3);
    for pair in info.chunks(2) {
        word.push(pair[0]);
        word.push(pair[1]);
        word.push(pair[0] ^ pair[1]);
    }
    Ok(word)
}

/// Recovers the information bits from a received word with at most one
/// erasure per disjoint triple.
pub fn parity_decode(received: &[OutputSymbol]) -> Result<Vec<u8>, EstimationError> {
    if received.len() % 3 != 0 {
        return Err(EstimationError::BadReceivedLength(received.len()));
    }
    let mut info = Vec::with_capacity(received.len() / 3 * 2);
    for triple in received.chunks(3) {
        let mut bits = [0u8; 3];
        let mut erased = None;
        for (pos, y) in triple.iter().enumerate() {
            match y {
                OutputSymbol::Symbol(v) => bits[pos] = *v,
                OutputSymbol::Erasure => {
                    if erased.replace(pos).is_some() {
                        return Err(EstimationError::TooManyErasures);
                    }
                }
            }
        }
        if let Some(pos) = erased {
            let (a, b) = match pos {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            bits[pos] = bits[a] ^ bits[b];
        }
        info.push(bits[0]);
        info.push(bits[1]);
    }
    Ok(info)
}

/// Mid-rise uniform quantizer on [-1, 1] with `levels` cells: returns the
/// cell index and its midpoint. Inputs outside the range clamp to the
/// outermost cells.
fn quantize(eps: f64, levels: u64) -> (u64, f64) {
    let width = 2.0 / levels as f64;
    let raw = ((eps + 1.0) / width).floor();
    let index = raw.clamp(0.0, (levels - 1) as f64) as u64;
    let midpoint = -1.0 + width * (index as f64 + 0.5);
    (index, midpoint)
}

fn index_to_bits(index: u64, bits: usize) -> Vec<u8> {
    (0..bits)
        .rev()
        .map(|i| ((index >> i) & 1) as u8)
        .collect()
}

fn bits_to_index(bits: &[u8]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| acc << 1 | u64::from(b))
}

struct NoiseDriver {
    policy: NoisePolicy,
    rng: Option<ChaCha8Rng>,
}

impl NoiseDriver {
    fn new(policy: NoisePolicy) -> Self {
        let rng = match policy {
            NoisePolicy::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Self { policy, rng }
    }

    fn pick(&mut self, machine: &ChannelMachine, state: usize, t: usize) -> u8 {
        let noises: Vec<u8> = machine.outgoing(state).map(|e| e.noise).collect();
        let has = |v: u8| noises.contains(&v);
        match self.policy {
            NoisePolicy::MaxErasure => {
                if has(1) {
                    1
                } else {
                    0
                }
            }
            NoisePolicy::Zero => {
                if has(0) {
                    0
                } else {
                    noises[0]
                }
            }
            NoisePolicy::Alternating => {
                let want = u8::from(t % 2 == 0);
                if has(want) {
                    want
                } else {
                    1 - want
                }
            }
            NoisePolicy::Seeded(_) => {
                let rng = self.rng.as_mut().expect("seeded driver has an rng");
                noises[rng.gen_range(0..noises.len())]
            }
        }
    }
}

struct DisturbanceDriver {
    policy: DisturbancePolicy,
    rng: Option<ChaCha8Rng>,
}

impl DisturbanceDriver {
    fn new(policy: DisturbancePolicy) -> Self {
        let rng = match policy {
            DisturbancePolicy::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Self { policy, rng }
    }

    fn pick(&mut self, error: f64, t: usize) -> f64 {
        match self.policy {
            DisturbancePolicy::Worst => {
                if error >= 0.0 {
                    0.99
                } else {
                    -0.99
                }
            }
            DisturbancePolicy::Zero => 0.0,
            DisturbancePolicy::Alternating => {
                if t % 2 == 0 {
                    0.99
                } else {
                    -0.99
                }
            }
            DisturbancePolicy::Seeded(_) => {
                let rng = self.rng.as_mut().expect("seeded driver has an rng");
                rng.gen_range(-0.99..0.99)
            }
        }
    }
}

/// Runs the coder-estimator for `epochs` epochs and records every epoch
/// boundary, including the final one.
///
/// Per epoch: the encoder quantizes the scaled error (X - Xhat)/delta,
/// parity-encodes the cell index, and sends it during the next epoch while
/// the plant keeps running under the disturbance policy; the decoder then
/// applies Xhat <- a^n (Xhat + delta q) and delta <- delta a^n/levels +
/// delta_star. Saturation of the quantizer is recorded, not fatal.
pub fn run_estimation(
    plant: &PlantSpec,
    machine: &ChannelMachine,
    coder: &CoderConfig,
    noise_policy: NoisePolicy,
    disturbance_policy: DisturbancePolicy,
    epochs: usize,
) -> Result<EstimationTrace, EstimationError> {
    if machine.kind() != ChannelKind::Erasure || machine.q() != 2 {
        return Err(EstimationError::ChannelMismatch);
    }
    let n = coder.epoch_length;
    if n == 0 || n % 3 != 0 {
        return Err(EstimationError::BadEpochLength(n));
    }
    if coder.info_bits != n / 3 * 2 {
        return Err(EstimationError::BadEpochLength(n));
    }
    let levels = coder.quantizer_levels();
    let a = plant.a;
    let expansion = a.powi(n as i32);
    let contraction = expansion / levels as f64;

    let mut noise = NoiseDriver::new(noise_policy);
    let mut disturbance = DisturbanceDriver::new(disturbance_policy);

    // The error E = X - Xhat is propagated directly: both X and Xhat grow
    // like a^n per epoch, so forming their difference late in a run would
    // drown E in floating-point cancellation.
    let mut error = plant.initial_state; // E(0) = X(0) - 0
    let mut xhat = 0.0f64;
    let mut delta = 1.0f64;
    let mut channel_state = 0usize;
    let mut records = Vec::with_capacity(epochs + 1);

    for epoch in 0..epochs {
        let eps = error / delta;
        let saturated = eps.abs() > 1.0;
        let (index, q_mid) = quantize(eps, levels);
        let info = index_to_bits(index, coder.info_bits);
        let word = parity_encode(&info)?;

        // transmit during the next n steps while the plant keeps running;
        // e_run = X(t) - a^(t - tau_i) (Xhat + delta q), the error against
        // the receiver's running extrapolation, obeys e <- a e + v
        let mut e_run = error - delta * q_mid;
        let mut received = Vec::with_capacity(n);
        let mut erasures = 0usize;
        for (t, &bit) in word.iter().enumerate() {
            let v = noise.pick(machine, channel_state, epoch * n + t);
            let (y, next) =
                transfer(machine, channel_state, bit, v).expect("policy picked a real edge");
            if y == OutputSymbol::Erasure {
                erasures += 1;
            }
            received.push(y);
            channel_state = next;

            let v_t = disturbance.pick(e_run, epoch * n + t);
            e_run = a * e_run + v_t;
        }
        records.push(EpochRecord {
            epoch,
            t: epoch * n,
            x: xhat + error,
            xhat,
            error,
            delta,
            erasures,
            saturated,
        });

        let decoded = parity_decode(&received)?;
        let decoded_index = bits_to_index(&decoded);
        debug_assert_eq!(decoded_index, index, "parity code is lossless");
        let q_dec = -1.0 + 2.0 / levels as f64 * (decoded_index as f64 + 0.5);
        xhat = expansion * (xhat + delta * q_dec);
        error = e_run;
        delta = delta * contraction + coder.delta_star;
    }
    records.push(EpochRecord {
        epoch: epochs,
        t: epochs * n,
        x: xhat + error,
        xhat,
        error,
        delta,
        erasures: 0,
        saturated: error.abs() / delta > 1.0,
    });
    Ok(EstimationTrace { records })
}

/// Three-valued outcome of a bounded-estimation condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// the achievability inequality holds strictly
    Sufficient,
    /// the converse inequality is violated
    NecessityViolated,
    /// in the gap between the two
    Indeterminate,
}

/// Condition checks for one plant against one channel report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionsReport {
    pub h_lin: f64,
    /// capacity test: h_lin against the certified zero-error capacity range
    pub rate: Verdict,
    /// structural test from tau and h_ch (erasure: h_lin + h_ch + tau vs 1;
    /// additive: h_lin + 2 h_ch vs 1 and h_lin + h_ch vs 1)
    pub structural: Verdict,
}

/// Evaluates the bounded-estimation conditions from a capacity report.
pub fn check_conditions(plant: &PlantSpec, report: &CapacityReport) -> ConditionsReport {
    let h_lin = plant.h_lin(report.q);
    let tau = *report.tau.numer() as f64 / *report.tau.denom() as f64;
    let h_ch = report.h_ch;

    // certified capacity range, tightened by a brute-force code when present
    let upper = report.c0_upper.value;
    let mut lower = report.c0_lower.value;
    if let Some(brute) = &report.bruteforce_rate {
        lower = lower.max(brute.value);
    }
    let rate = if h_lin < lower {
        Verdict::Sufficient
    } else if h_lin > upper {
        Verdict::NecessityViolated
    } else {
        Verdict::Indeterminate
    };

    let structural = match report.kind {
        ChannelKind::Erasure => {
            if h_lin + h_ch + tau < 1.0 {
                Verdict::Sufficient
            } else if h_lin + tau > 1.0 {
                Verdict::NecessityViolated
            } else {
                Verdict::Indeterminate
            }
        }
        ChannelKind::AdditiveNoise => {
            if h_lin + 2.0 * h_ch < 1.0 {
                Verdict::Sufficient
            } else if h_lin + h_ch > 1.0 {
                Verdict::NecessityViolated
            } else {
                Verdict::Indeterminate
            }
        }
    };
    ConditionsReport {
        h_lin,
        rate,
        structural,
    }
}
