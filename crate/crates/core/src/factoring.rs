//! Classical preprocessing: turn an odd semiprime N into bit-string lengths
//! and a diagonal problem Hamiltonian whose ground states encode the
//! factors x * y = N, and decode ground states back to integers.
//!
//! Both factors are odd, so their first and last bits are fixed to 1 and
//! only the middle bits enter the search space. A basis index packs the
//! free x bits (most significant first) above the free y bits, so for
//! N = 35 the state |x1 y1> = |01> sits at index 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cap on free_x + free_y when materializing energies.
pub const FREE_BIT_CAP: u32 = 20;

/// A factorization instance: odd N >= 9, with a choice of bit-length rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SemiprimeInstance {
    pub n: u64,
    /// Prefer the tighter rule that assumes the factors straddle sqrt(N).
    pub successive_prime_hint: bool,
}

impl SemiprimeInstance {
    pub fn new(n: u64, successive_prime_hint: bool) -> Result<Self> {
        if n % 2 == 0 {
            return Err(Error::InvalidInstance {
                n,
                reason: "N must be odd",
            });
        }
        if n < 9 {
            return Err(Error::InvalidInstance {
                n,
                reason: "N must be at least 9",
            });
        }
        Ok(Self {
            n,
            successive_prime_hint,
        })
    }
}

/// Which preprocessing produced a [`BitLayout`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BitLengthRule {
    /// n_x from the largest odd integer <= sqrt(N), n_y from N/3.
    General,
    /// n_x, n_y from F -+ deltaN with F = ceil(sqrt(N)).
    SuccessivePrime,
}

/// Bit-string lengths and the derived free-bit counts of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitLayout {
    pub n_x: u32,
    pub n_y: u32,
    /// Unknown bits of x: n_x - 2, floored at 0.
    pub free_x: u32,
    /// Unknown bits of y: n_y - 2, floored at 0.
    pub free_y: u32,
    /// ceil(sqrt(N)).
    pub f: u64,
    /// sqrt(F^2 - N) under the successive-prime rule, 0 otherwise.
    pub delta_n: u64,
    pub rule: BitLengthRule,
}

impl BitLayout {
    pub fn dim(&self) -> usize {
        1usize << (self.free_x + self.free_y)
    }
}

/// Smallest number of bits representing b (b >= 1).
pub fn bit_length(b: u64) -> u32 {
    debug_assert!(b >= 1);
    u64::BITS - b.leading_zeros()
}

fn ceil_sqrt(n: u64) -> u64 {
    let s = n.isqrt();
    if s * s == n {
        s
    } else {
        s + 1
    }
}

/// Bit lengths from the full factor ranges 3 <= x <= sqrt(N) <= y <= N/3.
pub fn bit_lengths_general(n: u64) -> Result<BitLayout> {
    let inst = SemiprimeInstance::new(n, false)?;
    let floor_sqrt = inst.n.isqrt();
    let odd_floor_sqrt = if floor_sqrt % 2 == 0 {
        floor_sqrt - 1
    } else {
        floor_sqrt
    };
    let n_x = bit_length(odd_floor_sqrt);
    let n_y = bit_length(inst.n / 3);
    Ok(BitLayout {
        n_x,
        n_y,
        free_x: n_x.saturating_sub(2),
        free_y: n_y.saturating_sub(2),
        f: ceil_sqrt(inst.n),
        delta_n: 0,
        rule: BitLengthRule::General,
    })
}

/// Bit lengths for N a product of two successive odd primes: with
/// F = ceil(sqrt(N)) and deltaN = sqrt(F^2 - N), the factors fit in
/// m(F - deltaN) and m(F + deltaN) bits. Rejects N for which F^2 - N is
/// not a perfect square.
pub fn bit_lengths_successive(n: u64) -> Result<BitLayout> {
    let inst = SemiprimeInstance::new(n, true)?;
    let f = ceil_sqrt(inst.n);
    let residue = f * f - inst.n;
    let delta_n = residue.isqrt();
    if delta_n * delta_n != residue {
        return Err(Error::NotPerfectSquare { n, residue });
    }
    let n_x = bit_length(f - delta_n);
    let n_y = bit_length(f + delta_n);
    Ok(BitLayout {
        n_x,
        n_y,
        free_x: n_x.saturating_sub(2),
        free_y: n_y.saturating_sub(2),
        f,
        delta_n,
        rule: BitLengthRule::SuccessivePrime,
    })
}

/// Preprocessing an instance honors its rule hint; the successive-prime
/// rule falls back to the general one when it does not apply.
pub fn bit_lengths(inst: &SemiprimeInstance) -> Result<BitLayout> {
    if inst.successive_prime_hint {
        match bit_lengths_successive(inst.n) {
            Ok(layout) => Ok(layout),
            Err(Error::NotPerfectSquare { .. }) => bit_lengths_general(inst.n),
            Err(e) => Err(e),
        }
    } else {
        bit_lengths_general(inst.n)
    }
}

/// Diagonal of the problem Hamiltonian over the computational basis,
/// with exact integer energies (N - x*y)^2.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalHamiltonian {
    pub n: u64,
    pub layout: BitLayout,
    energies: Vec<u64>,
    /// Tr(H)/dim; subtracting it re-centers the spectrum to zero mean.
    shift: f64,
}

impl DiagonalHamiltonian {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[u64] {
        &self.energies
    }

    pub fn energy(&self, index: usize) -> u64 {
        self.energies[index]
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn min_energy(&self) -> u64 {
        *self.energies.iter().min().expect("dim >= 1")
    }

    /// Lowest diagonal entry after the traceless re-centering.
    pub fn ground_energy_shifted(&self) -> f64 {
        self.min_energy() as f64 - self.shift
    }
}

/// Reconstruct (x, y) from the free bits packed in a basis index.
fn factors_of_index(index: usize, layout: &BitLayout) -> (u64, u64) {
    let x_bits = (index >> layout.free_y) as u64;
    let y_bits = index as u64 & ((1u64 << layout.free_y) - 1);
    let x = (1u64 << (layout.n_x - 1)) + (x_bits << 1) + 1;
    let y = (1u64 << (layout.n_y - 1)) + (y_bits << 1) + 1;
    (x, y)
}

/// Materialize the diagonal: energy (N - x*y)^2 for every assignment of
/// the free bits. x bits occupy the high part of the index, y bits the
/// low part, each group most-significant-first.
pub fn build_hamiltonian(layout: &BitLayout, n: u64) -> Result<DiagonalHamiltonian> {
    let free_bits = layout.free_x + layout.free_y;
    if free_bits > FREE_BIT_CAP {
        return Err(Error::FreeBitCap {
            free_bits,
            cap: FREE_BIT_CAP,
        });
    }
    let dim = 1usize << free_bits;
    let mut energies = Vec::with_capacity(dim);
    let mut total: u128 = 0;
    for index in 0..dim {
        let (x, y) = factors_of_index(index, layout);
        let diff = n as i128 - (x as i128) * (y as i128);
        let e2 = (diff * diff) as u128;
        let e = u64::try_from(e2).map_err(|_| Error::EnergyOverflow { n })?;
        total += e2;
        energies.push(e);
    }
    // dim is a power of two, so the mean is exact in an f64 for any total
    // below 2^53
    let shift = total as f64 / dim as f64;
    Ok(DiagonalHamiltonian {
        n,
        layout: *layout,
        energies,
        shift,
    })
}

/// Indices attaining the minimum energy, ascending.
pub fn ground_states_bruteforce(h: &DiagonalHamiltonian) -> Vec<usize> {
    let min = h.min_energy();
    h.energies
        .iter()
        .enumerate()
        .filter(|(_, &e)| e == min)
        .map(|(i, _)| i)
        .collect()
}

/// A decoded candidate factorization; `valid` records whether x * y = N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorPair {
    pub x: u64,
    pub y: u64,
    pub valid: bool,
}

/// Rebuild (x, y) from a basis index and flag whether they factor N.
pub fn decode_solution(index: usize, layout: &BitLayout, n: u64) -> FactorPair {
    let (x, y) = factors_of_index(index, layout);
    FactorPair {
        x,
        y,
        valid: x * y == n,
    }
}

/// Hamiltonian export schema shared by the CLI and the run logs.
#[derive(Serialize, Deserialize)]
pub struct HamiltonianJson {
    pub n: u64,
    pub nx: u32,
    pub ny: u32,
    pub energies: Vec<u64>,
    pub shift: f64,
}

impl HamiltonianJson {
    pub fn from_hamiltonian(h: &DiagonalHamiltonian) -> Self {
        Self {
            n: h.n,
            nx: h.layout.n_x,
            ny: h.layout.n_y,
            energies: h.energies.clone(),
            shift: h.shift,
        }
    }
}
