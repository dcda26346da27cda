//! Single-photon linear-optics simulation of a variational ground-state
//! search that factors small odd semiprimes.
//!
//! The pipeline: [`factoring`] turns N into bit-string lengths and a
//! diagonal Hamiltonian whose zero-energy states encode the factors;
//! [`mesh`] builds the programmable interferometer whose output modes are
//! the computational basis; [`photonics`] evolves a single photon and
//! turns detection statistics into energies and fidelities; [`optimizer`]
//! descends the energy with forward finite differences; [`experiment`]
//! repeats runs, aggregates statistics, sweeps energy landscapes, and
//! writes CSV/JSON exports.

pub mod error;
pub mod experiment;
pub mod factoring;
pub mod linalg;
pub mod mesh;
pub mod optimizer;
pub mod photonics;

pub use error::{Error, Result};
pub use experiment::{
    aggregate, export, landscape_sweep, run_repetitions, steps_to_threshold, AggregateStats,
    ExperimentConfig, LandscapeFamily, LandscapeGrid,
};
pub use factoring::{
    bit_lengths, bit_lengths_general, bit_lengths_successive, build_hamiltonian, decode_solution,
    ground_states_bruteforce, BitLayout, BitLengthRule, DiagonalHamiltonian, FactorPair,
    SemiprimeInstance,
};
pub use linalg::{trace_fidelity, unitarity_defect, MatrixJson, UnitaryMatrix, UNITARITY_TOL};
pub use mesh::{
    compose_mesh, decompose_unitary, embed_isolated, evolve_mesh_column, mzi_matrix,
    random_phases, Decomposition, EmbeddedMesh, MZISpec, MeshLayout, PhaseConfig,
};
pub use optimizer::{
    forward_gradient, run_optimization, run_optimization_seeded, step, IterationRecord,
    OptimizerConfig, RunResult, ShotMode,
};
pub use photonics::{
    energy_expectation, evolve_single_photon, exact_probabilities, sample_counts, state_fidelity,
    DistributionKind, FockInput, OutputDistribution, ShotModel, ShotRecord,
};
