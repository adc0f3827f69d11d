//! Finite-state channel models without probabilities: channels whose noise
//! is any walk on a strongly connected labeled graph.
//!
//! The crate builds the standard channel families (sliding-window erasure
//! and symmetric, bursty, guard-space, Gilbert-Elliot-like), computes their
//! topological entropy and maximal cycle ratio, derives zero-error and
//! zero-error-feedback capacity values and bounds, searches for zero-error
//! codes by brute force over confusability graphs, evaluates maximin
//! information on finite joint ranges, and simulates bounded-error state
//! estimation of an unstable scalar plant over such channels.

pub mod capacity;
pub mod codesearch;
pub mod cycles;
pub mod estimation;
pub mod families;
pub mod format;
pub mod machine;
pub mod nonstoch;
pub mod spectral;

pub use capacity::{
    bounds_additive, bounds_erasure, c0f_erasure_dp, c0f_exact, hamming_ball_volume,
    max_erasures, report, shannon_uniform_lower, sw_erasure_lower, sw_symmetric_bounds,
    CapacityError, CapacityReport, ReportOptions, ReportValue,
};
pub use codesearch::{
    confusability, max_zero_error_code, rate_scan, verify_zero_error, Codebook,
    ConfusabilityGraph, ScanRow, SearchError, SearchMode,
};
pub use cycles::{maximal_ratio, CycleStats};
pub use estimation::{
    check_conditions, parity_decode, parity_encode, run_estimation, CoderConfig,
    ConditionsReport, DisturbancePolicy, EpochRecord, EstimationError, EstimationTrace,
    NoisePolicy, PlantSpec, Verdict,
};
pub use families::{
    build_bursty, build_gilbert_elliot, build_guard_space, build_noiseless,
    build_sliding_window_erasure, build_sliding_window_symmetric, output_set, parse_family,
    transfer, FamilyError, GilbertElliotSpec, OutputSymbol, SlidingWindowSpec,
};
pub use format::{from_json, to_json, FormatError};
pub use machine::{
    no_consecutive_ones, noiseless, AdjacencyMatrix, ChannelKind, ChannelMachine, Edge,
    MachineError, SizeCapError,
};
pub use nonstoch::{
    joint_range, maximin_info, overlap_partition, verify_capacity_oracle, JointRange,
    OracleReport, OverlapPartition, SubsetSearch,
};
pub use spectral::{perron_eigenvalue, topological_entropy, SpectralError};
