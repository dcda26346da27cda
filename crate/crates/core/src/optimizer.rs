//! Forward-finite-difference gradient descent over the 2L mesh phases.
//!
//! The cost handed to the gradient is the energy expectation scaled to
//! order one (raw energy divided by the spectrum's trace mean), which
//! keeps the fixed learning rate in its stable regime across instances;
//! the convergence test compares successive raw energies, so reported
//! traces and the stopping rule are in plain energy units.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factoring::{decode_solution, DiagonalHamiltonian, FactorPair};
use crate::mesh::{evolve_mesh_column, random_phases, MeshLayout, PhaseConfig};
use crate::photonics::{
    energy_expectation, exact_probabilities, sample_counts, FockInput, OutputDistribution,
    ShotModel,
};

/// Whether a cost evaluation uses exact mode probabilities or finite
/// counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ShotMode {
    Exact,
    Sampled { shots: u64, model: ShotModel },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Finite-difference spacing.
    pub h: f64,
    /// Learning rate.
    pub eta: f64,
    /// Stop once successive energies differ by less than this.
    pub epsilon: f64,
    pub max_iters: usize,
    pub shots: ShotMode,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            h: 0.01,
            eta: 0.03,
            epsilon: 1e-4,
            max_iters: 500,
            shots: ShotMode::Exact,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.h <= 0.0 || self.eta <= 0.0 || self.epsilon <= 0.0 || self.max_iters == 0 {
            return Err(Error::InvalidInstance {
                n: 0,
                reason: "optimizer parameters must be positive",
            });
        }
        Ok(())
    }

    /// Evaluations per iteration: one baseline plus one per parameter.
    pub fn evals_per_iteration(&self, l: usize) -> usize {
        2 * l + 1
    }
}

/// One row of an optimization trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    /// Cost evaluations spent up to and including this record's baseline:
    /// iter * (2L + 1) + 1.
    pub n_evals_cumulative: usize,
    pub energy_raw: f64,
    pub energy_shifted: f64,
    pub phases: PhaseConfig,
}

/// Outcome of one optimization run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub trace: Vec<IterationRecord>,
    pub converged: bool,
    pub final_distribution: OutputDistribution,
    pub decoded: FactorPair,
}

impl RunResult {
    pub fn final_energy_raw(&self) -> f64 {
        self.trace.last().expect("trace is never empty").energy_raw
    }

    pub fn final_energy_shifted(&self) -> f64 {
        self.trace
            .last()
            .expect("trace is never empty")
            .energy_shifted
    }

    /// Steps taken; one fewer than the number of trace records.
    pub fn iterations(&self) -> usize {
        self.trace.len() - 1
    }
}

fn probe_theta(value: f64, h: f64) -> (f64, f64) {
    let clamped = (value + h).min(FRAC_PI_2);
    let eff = clamped - value;
    if eff > 1e-12 {
        (clamped, eff)
    } else {
        // at the upper clamp the forward probe has no room; flip direction
        (value - h, -h)
    }
}

/// Forward differences for all 2L parameters (thetas then phis) from one
/// shared baseline: gradient_k = (cost(p_k + h) - cost(p)) / h_eff. Theta
/// probes past pi/2 evaluate at the clamped value with the shortened step.
pub fn forward_gradient<F>(
    cfg: &OptimizerConfig,
    phases: &PhaseConfig,
    mut cost: F,
) -> (f64, Vec<f64>)
where
    F: FnMut(&PhaseConfig) -> f64,
{
    let baseline = cost(phases);
    let gradient = forward_gradient_from_baseline(cfg, phases, baseline, &mut cost);
    (baseline, gradient)
}

fn forward_gradient_from_baseline<F>(
    cfg: &OptimizerConfig,
    phases: &PhaseConfig,
    baseline: f64,
    cost: &mut F,
) -> Vec<f64>
where
    F: FnMut(&PhaseConfig) -> f64,
{
    let l = phases.len();
    let mut gradient = Vec::with_capacity(2 * l);
    for k in 0..l {
        let (probe, eff) = probe_theta(phases.thetas()[k], cfg.h);
        let mut thetas = phases.thetas().to_vec();
        thetas[k] = probe;
        let p = PhaseConfig::new(thetas, phases.phis().to_vec()).expect("probe stays in range");
        gradient.push((cost(&p) - baseline) / eff);
    }
    for k in 0..l {
        let mut phis = phases.phis().to_vec();
        phis[k] += cfg.h;
        let p = PhaseConfig::new(phases.thetas().to_vec(), phis).expect("phi wraps");
        gradient.push((cost(&p) - baseline) / cfg.h);
    }
    gradient
}

/// Descend: new = old - eta * gradient, then clamp thetas to [0, pi/2]
/// and wrap phis mod 2pi.
pub fn step(phases: &PhaseConfig, gradient: &[f64], cfg: &OptimizerConfig) -> Result<PhaseConfig> {
    let l = phases.len();
    if gradient.len() != 2 * l {
        return Err(Error::PhaseCount {
            expected: 2 * l,
            got: gradient.len(),
        });
    }
    let thetas = phases
        .thetas()
        .iter()
        .zip(&gradient[..l])
        .map(|(t, g)| (t - cfg.eta * g).clamp(0.0, FRAC_PI_2))
        .collect();
    let phis = phases
        .phis()
        .iter()
        .zip(&gradient[l..])
        .map(|(p, g)| (p - cfg.eta * g).rem_euclid(TAU))
        .collect();
    PhaseConfig::new(thetas, phis)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Output distribution of the photon after the mesh at the given phases.
fn measure(
    layout: &MeshLayout,
    phases: &PhaseConfig,
    shots: ShotMode,
    seed: u64,
) -> Result<OutputDistribution> {
    let amps = evolve_mesh_column(layout, phases, FockInput::default().mode)?;
    let exact = exact_probabilities(&amps)?;
    match shots {
        ShotMode::Exact => Ok(exact),
        ShotMode::Sampled { shots, model } => {
            sample_counts(&exact, shots, seed, model).to_distribution()
        }
    }
}

/// Run gradient descent from `init` until successive energies differ by
/// less than epsilon or the iteration cap is reached. In sampled mode all
/// 2L + 1 evaluations of an iteration reuse one seed, so the finite-shot
/// noise cancels inside each difference quotient.
pub fn run_optimization(
    h: &DiagonalHamiltonian,
    layout: &MeshLayout,
    init: PhaseConfig,
    cfg: &OptimizerConfig,
    noise_seed: u64,
) -> Result<RunResult> {
    cfg.validate()?;
    if layout.modes() != h.dim() {
        return Err(Error::Dimension {
            what: "mesh modes vs Hamiltonian dimension",
            expected: h.dim(),
            got: layout.modes(),
        });
    }
    let l = layout.mzi_count();
    let per_iter = cfg.evals_per_iteration(l);
    let scale = h.shift().max(1.0);

    let mut phases = init;
    let mut trace: Vec<IterationRecord> = Vec::new();
    let mut prev_raw: Option<f64> = None;
    let mut converged = false;

    for iter in 0.. {
        let iter_seed = splitmix64(noise_seed ^ (iter as u64).wrapping_mul(0x9E37));
        let eval = |p: &PhaseConfig| -> Result<f64> {
            let dist = measure(layout, p, cfg.shots, iter_seed)?;
            energy_expectation(&dist, h, false)
        };

        let raw = eval(&phases)?;
        trace.push(IterationRecord {
            iter,
            n_evals_cumulative: iter * per_iter + 1,
            energy_raw: raw,
            energy_shifted: raw - h.shift(),
            phases: phases.clone(),
        });

        if let Some(prev) = prev_raw {
            if (raw - prev).abs() < cfg.epsilon {
                converged = true;
                break;
            }
        }
        if iter == cfg.max_iters {
            break;
        }
        prev_raw = Some(raw);

        let mut scaled = |p: &PhaseConfig| -> f64 {
            eval(p).expect("probe evaluation") / scale
        };
        let gradient = forward_gradient_from_baseline(cfg, &phases, raw / scale, &mut scaled);
        phases = step(&phases, &gradient, cfg)?;
    }

    let last = trace.last().expect("at least one record");
    let final_distribution = measure(
        layout,
        &last.phases,
        cfg.shots,
        splitmix64(noise_seed ^ 0xF1DE),
    )?;
    let decoded = decode_solution(final_distribution.argmax(), &h.layout, h.n);

    Ok(RunResult {
        trace,
        converged,
        final_distribution,
        decoded,
    })
}

/// Convenience: random initialization drawn from the seed.
pub fn run_optimization_seeded(
    h: &DiagonalHamiltonian,
    layout: &MeshLayout,
    run_seed: u64,
    cfg: &OptimizerConfig,
) -> Result<RunResult> {
    let init = random_phases(layout, run_seed);
    run_optimization(h, layout, init, cfg, splitmix64(run_seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factoring::{bit_lengths_successive, build_hamiltonian};

    fn h35() -> DiagonalHamiltonian {
        let layout = bit_lengths_successive(35).unwrap();
        build_hamiltonian(&layout, 35).unwrap()
    }

    #[test]
    fn constant_cost_has_zero_gradient() {
        let layout = MeshLayout::new(4);
        let phases = random_phases(&layout, 1);
        let cfg = OptimizerConfig::default();
        let (base, grad) = forward_gradient(&cfg, &phases, |_| 2.5);
        assert_eq!(base, 2.5);
        assert!(grad.iter().all(|&g| g == 0.0));
        assert_eq!(grad.len(), 12);
    }

    #[test]
    fn quadratic_cost_has_small_gradient_at_its_minimum() {
        let layout = MeshLayout::new(4);
        let center = random_phases(&layout, 2);
        let cfg = OptimizerConfig::default();
        let target: Vec<f64> = center
            .thetas()
            .iter()
            .chain(center.phis())
            .copied()
            .collect();
        let (_, grad) = forward_gradient(&cfg, &center, |p| {
            p.thetas()
                .iter()
                .chain(p.phis())
                .zip(&target)
                .map(|(v, t)| (v - t).powi(2))
                .sum()
        });
        // forward differences at a quadratic minimum are biased by h
        for &g in &grad {
            assert!(g.abs() <= 2.0 * cfg.h, "component {g}");
        }
    }

    #[test]
    fn gradient_matches_central_difference_oracle() {
        let h = h35();
        let layout = MeshLayout::new(4);
        let cfg = OptimizerConfig::default();
        let scale = h.shift();
        let cost = |p: &PhaseConfig| -> f64 {
            let dist = measure(&layout, p, ShotMode::Exact, 0).unwrap();
            energy_expectation(&dist, &h, false).unwrap() / scale
        };
        for seed in 0..5 {
            let phases = random_phases(&layout, seed);
            let (_, grad) = forward_gradient(&cfg, &phases, cost);
            let hc = 1e-6;
            for k in 0..12 {
                let mut up: Vec<f64> = phases.thetas().iter().chain(phases.phis()).copied().collect();
                let mut dn = up.clone();
                up[k] += hc;
                dn[k] -= hc;
                let build = |v: &[f64]| {
                    PhaseConfig::new(v[..6].to_vec(), v[6..].to_vec()).unwrap()
                };
                // skip central probes that would leave the theta range
                if k < 6 && (up[k] > FRAC_PI_2 || dn[k] < 0.0) {
                    continue;
                }
                let central = (cost(&build(&up)) - cost(&build(&dn))) / (2.0 * hc);
                assert!(
                    (grad[k] - central).abs() <= 5.0 * cfg.h,
                    "seed {seed} k {k}: fwd {} vs central {central}",
                    grad[k]
                );
            }
        }
    }

    #[test]
    fn step_with_zero_gradient_keeps_phases() {
        let layout = MeshLayout::new(4);
        let phases = random_phases(&layout, 3);
        let cfg = OptimizerConfig::default();
        let out = step(&phases, &vec![0.0; 12], &cfg).unwrap();
        assert_eq!(out, phases);
    }

    #[test]
    fn step_descends_a_one_dimensional_quadratic() {
        let cfg = OptimizerConfig::default();
        let cost = |p: &PhaseConfig| (p.thetas()[0] - 0.6f64).powi(2);
        let mut phases = PhaseConfig::new(vec![1.0], vec![0.0]).unwrap();
        for _ in 0..200 {
            let (_, grad) = forward_gradient(&cfg, &phases, cost);
            let next = step(&phases, &grad, &cfg).unwrap();
            // strict descent holds outside the forward-difference bias zone
            if (phases.thetas()[0] - 0.6).abs() > cfg.h {
                assert!(cost(&next) < cost(&phases));
            }
            phases = next;
        }
        assert!((phases.thetas()[0] - 0.6).abs() < 0.02);
    }

    #[test]
    fn descent_on_the_ground_excited_family_is_monotone() {
        // E(theta) = 100 sin^2(theta): the one-parameter slice through
        // sqrt(beta)|00> + sqrt(1-beta)|01> with beta = sin^2(theta)
        let cfg = OptimizerConfig::default();
        let scale = 74.0;
        let cost = |p: &PhaseConfig| 100.0 * p.thetas()[0].sin().powi(2) / scale;
        let mut phases = PhaseConfig::new(vec![1.3], vec![0.0]).unwrap();
        let mut energy = cost(&phases) * scale;
        for _ in 0..400 {
            let (_, grad) = forward_gradient(&cfg, &phases, cost);
            phases = step(&phases, &grad, &cfg).unwrap();
            let next = cost(&phases) * scale;
            assert!(next <= energy + 1e-12, "{next} > {energy}");
            energy = next;
        }
        assert!(energy < 1e-6, "stalled at {energy}");
    }

    #[test]
    fn step_clamps_theta_proposals() {
        let cfg = OptimizerConfig {
            eta: 1.0,
            ..OptimizerConfig::default()
        };
        let phases = PhaseConfig::new(vec![0.05], vec![0.1]).unwrap();
        // gradient pushes theta to -0.1 and phi past 2 pi
        let out = step(&phases, &[0.15, -(TAU + 0.2 - 0.1)], &cfg).unwrap();
        assert_eq!(out.thetas()[0], 0.0);
        assert!((out.phis()[0] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn ground_state_init_is_a_fixed_point() {
        // slot 1 fully transmits (photon to mode 1), the rest reflect
        let h = h35();
        let layout = MeshLayout::new(4);
        let mut thetas = vec![FRAC_PI_2; 6];
        thetas[0] = 0.0;
        let init = PhaseConfig::new(thetas, vec![0.0; 6]).unwrap();
        let cfg = OptimizerConfig::default();
        let result = run_optimization(&h, &layout, init, &cfg, 0).unwrap();
        assert!(result.converged);
        assert!(result.iterations() <= 2, "took {}", result.iterations());
        assert!(result.final_energy_raw() <= 1e-9);
        assert!(result.decoded.valid);
    }

    #[test]
    fn eval_accounting_steps_by_2l_plus_1() {
        let h = h35();
        let layout = MeshLayout::new(4);
        let cfg = OptimizerConfig::default();
        let result = run_optimization_seeded(&h, &layout, 5, &cfg).unwrap();
        let per = cfg.evals_per_iteration(layout.mzi_count());
        for (i, rec) in result.trace.iter().enumerate() {
            assert_eq!(rec.iter, i);
            assert_eq!(rec.n_evals_cumulative, i * per + 1);
        }
        if result.converged {
            let n = result.trace.len();
            let d = (result.trace[n - 1].energy_raw - result.trace[n - 2].energy_raw).abs();
            assert!(d < cfg.epsilon);
        }
    }

    #[test]
    fn convergence_is_shift_invariant() {
        let h = h35();
        let layout = MeshLayout::new(4);
        let cfg = OptimizerConfig::default();
        let result = run_optimization_seeded(&h, &layout, 11, &cfg).unwrap();
        // raw and shifted energy differences are identical by construction
        for w in result.trace.windows(2) {
            let raw = (w[1].energy_raw - w[0].energy_raw).abs();
            let shifted = (w[1].energy_shifted - w[0].energy_shifted).abs();
            assert!((raw - shifted).abs() < 1e-9);
        }
    }

    #[test]
    fn exact_mode_steps_rarely_increase_energy() {
        let h = h35();
        let layout = MeshLayout::new(4);
        let cfg = OptimizerConfig::default();
        let mut total = 0usize;
        let mut increases = 0usize;
        for seed in 0..20 {
            let result = run_optimization_seeded(&h, &layout, seed, &cfg).unwrap();
            for w in result.trace.windows(2) {
                total += 1;
                if w[1].energy_raw > w[0].energy_raw + 1e-12 {
                    increases += 1;
                }
            }
        }
        assert!(
            increases * 20 <= total,
            "{increases}/{total} steps increased the energy"
        );
    }

    #[test]
    fn small_instance_finds_its_factors() {
        let layout_bits = bit_lengths_successive(15).unwrap();
        let h = build_hamiltonian(&layout_bits, 15).unwrap();
        let mesh = MeshLayout::new(2);
        let cfg = OptimizerConfig::default();
        let mut hits = 0;
        for seed in 0..50 {
            let result = run_optimization_seeded(&h, &mesh, seed, &cfg).unwrap();
            let pair = result.decoded;
            if pair.valid && pair.x == 3 && pair.y == 5 {
                hits += 1;
            }
        }
        assert!(hits >= 48, "only {hits}/50 runs decoded (3, 5)");
    }

    #[test]
    fn sampled_mode_is_reproducible() {
        let h = h35();
        let layout = MeshLayout::new(4);
        let cfg = OptimizerConfig {
            max_iters: 20,
            shots: ShotMode::Sampled {
                shots: 10_000,
                model: ShotModel::Multinomial,
            },
            ..OptimizerConfig::default()
        };
        let a = run_optimization_seeded(&h, &layout, 5, &cfg).unwrap();
        let b = run_optimization_seeded(&h, &layout, 5, &cfg).unwrap();
        assert_eq!(a.trace.len(), b.trace.len());
        for (ra, rb) in a.trace.iter().zip(&b.trace) {
            assert_eq!(ra.energy_raw, rb.energy_raw);
        }
    }
}
