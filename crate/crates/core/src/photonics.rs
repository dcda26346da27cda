//! Single-photon evolution and measurement statistics.
//!
//! A single photon entering mode k of an M-mode unitary exits with the
//! amplitudes of column k. Detection in the computational basis only sees
//! |amplitude|^2 per mode, which is all a diagonal Hamiltonian needs:
//! energies and fidelities here are functions of the output distribution
//! alone.

use ndarray::Array1;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factoring::DiagonalHamiltonian;
use crate::linalg::UnitaryMatrix;

/// Single-photon input: one occupied mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockInput {
    pub mode: usize,
}

impl Default for FockInput {
    fn default() -> Self {
        Self { mode: 0 }
    }
}

/// Output amplitudes: column `input.mode` of the unitary.
pub fn evolve_single_photon(u: &UnitaryMatrix, input: FockInput) -> Result<Array1<Complex64>> {
    if input.mode >= u.modes() {
        return Err(Error::Dimension {
            what: "input mode",
            expected: u.modes(),
            got: input.mode,
        });
    }
    Ok(u.column(input.mode))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistributionKind {
    Exact,
    Sampled,
}

/// Probabilities of detecting the photon in each monitored mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDistribution {
    probs: Vec<f64>,
    pub total_counts: Option<u64>,
    pub kind: DistributionKind,
}

impl OutputDistribution {
    /// Normalizes on construction; rejects negative entries or a zero sum.
    pub fn new(probs: Vec<f64>, total_counts: Option<u64>, kind: DistributionKind) -> Result<Self> {
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::BadDistribution);
        }
        let sum: f64 = probs.iter().sum();
        if sum <= 0.0 {
            return Err(Error::BadDistribution);
        }
        let probs = probs.into_iter().map(|p| p / sum).collect();
        Ok(Self {
            probs,
            total_counts,
            kind,
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Index of the most likely mode; ties break toward the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }
}

/// |amplitude|^2 per mode.
pub fn exact_probabilities(amps: &Array1<Complex64>) -> Result<OutputDistribution> {
    OutputDistribution::new(
        amps.iter().map(|a| a.norm_sqr()).collect(),
        None,
        DistributionKind::Exact,
    )
}

/// How finite-shot counts are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShotModel {
    /// Counts jointly multinomial; they sum to the requested shots.
    Multinomial,
    /// Independent Poisson counts with mean shots * p_i.
    Poisson,
}

/// Detector counts for one measurement round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub counts: Vec<u64>,
    pub seed: u64,
}

impl ShotRecord {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Empirical frequencies as a sampled distribution.
    pub fn to_distribution(&self) -> Result<OutputDistribution> {
        OutputDistribution::new(
            self.counts.iter().map(|&c| c as f64).collect(),
            Some(self.total()),
            DistributionKind::Sampled,
        )
    }
}

/// Draw counts from the distribution, deterministically per seed.
pub fn sample_counts(
    dist: &OutputDistribution,
    shots: u64,
    seed: u64,
    model: ShotModel,
) -> ShotRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probs = dist.probs();
    let counts = match model {
        ShotModel::Multinomial => {
            // condition category by category on the remaining shots
            let mut counts = vec![0u64; probs.len()];
            let mut remaining = shots;
            let mut mass_left = 1.0f64;
            for (i, &p) in probs.iter().enumerate() {
                if i + 1 == probs.len() {
                    counts[i] = remaining;
                    break;
                }
                if remaining == 0 {
                    break;
                }
                let cond = (p / mass_left).clamp(0.0, 1.0);
                let draw = if cond >= 1.0 {
                    remaining
                } else if cond <= 0.0 {
                    0
                } else {
                    Binomial::new(remaining, cond)
                        .expect("conditional probability in [0, 1]")
                        .sample(&mut rng)
                };
                counts[i] = draw;
                remaining -= draw;
                mass_left = (mass_left - p).max(0.0);
            }
            counts
        }
        ShotModel::Poisson => probs
            .iter()
            .map(|&p| {
                let lambda = shots as f64 * p;
                if lambda <= 0.0 {
                    0
                } else {
                    Poisson::new(lambda).expect("positive mean").sample(&mut rng) as u64
                }
            })
            .collect(),
    };
    ShotRecord { counts, seed }
}

/// E = sum_i p_i * E_i, optionally re-centered by the trace shift.
pub fn energy_expectation(
    dist: &OutputDistribution,
    h: &DiagonalHamiltonian,
    shifted: bool,
) -> Result<f64> {
    if dist.len() != h.dim() {
        return Err(Error::Dimension {
            what: "distribution over basis states",
            expected: h.dim(),
            got: dist.len(),
        });
    }
    let raw: f64 = dist
        .probs()
        .iter()
        .zip(h.energies())
        .map(|(&p, &e)| p * e as f64)
        .sum();
    Ok(if shifted { raw - h.shift() } else { raw })
}

/// Overlap sum_i sqrt(p_i) |t_i| between a measured distribution,
/// read as a root-probability state vector, and a target pure state.
pub fn state_fidelity(dist: &OutputDistribution, target: &[Complex64]) -> f64 {
    dist.probs()
        .iter()
        .zip(target)
        .map(|(&p, t)| p.sqrt() * t.norm())
        .sum()
}
