use std::path::PathBuf;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mode index {j} does not fit a {modes}-mode mesh (need j + 1 < modes)")]
    ModeIndex { j: usize, modes: usize },

    #[error("internal phase theta = {0} outside [0, pi/2]")]
    ThetaRange(f64),

    #[error("expected {expected} phase pairs, got {got}")]
    PhaseCount { expected: usize, got: usize },

    #[error("{what}: expected dimension {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("matrix is not unitary: max |U^H U - I| = {defect:.3e} exceeds {tolerance:.1e}")]
    NotUnitary { defect: f64, tolerance: f64 },

    #[error("cannot embed a {inner}-mode mesh into {outer} modes")]
    Embedding { inner: usize, outer: usize },

    #[error("N = {n} is not a valid instance: {reason}")]
    InvalidInstance { n: u64, reason: &'static str },

    #[error("successive-prime rule does not apply to N = {n}: F^2 - N = {residue} is not a perfect square")]
    NotPerfectSquare { n: u64, residue: u64 },

    #[error("{free_bits} free bits exceed the cap of {cap}")]
    FreeBitCap { free_bits: u32, cap: u32 },

    #[error("energy (N - x*y)^2 overflows 64 bits for N = {n}")]
    EnergyOverflow { n: u64 },

    #[error("probabilities must be non-negative with a positive sum")]
    BadDistribution,

    #[error("every repetition was excluded; nothing to aggregate")]
    AllRunsExcluded,

    #[error("landscape sweeps need a dimension-4 Hamiltonian, got dimension {0}")]
    LandscapeDimension(usize),

    #[error("failed to write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
