//! Repeated optimization runs, their aggregate statistics, energy
//! landscapes over parametrized trial states, and file exports.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::factoring::{ground_states_bruteforce, DiagonalHamiltonian};
use crate::mesh::MeshLayout;
use crate::optimizer::{run_optimization_seeded, OptimizerConfig, RunResult};
use crate::photonics::{
    energy_expectation, exact_probabilities, state_fidelity, DistributionKind, OutputDistribution,
};

/// Configuration of one full experiment; the CLI config file mirrors this
/// struct field for field.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub n: u64,
    pub repetitions: usize,
    pub optimizer: OptimizerConfig,
    pub master_seed: u64,
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 35,
            repetitions: 117,
            optimizer: OptimizerConfig::default(),
            master_seed: 7,
            out_dir: None,
        }
    }
}

/// Run every repetition sequentially; run r uses seed master_seed + r, so
/// the result list is independent of any execution schedule.
pub fn run_repetitions(
    cfg: &ExperimentConfig,
    h: &DiagonalHamiltonian,
    layout: &MeshLayout,
) -> Result<Vec<RunResult>> {
    if cfg.repetitions == 0 {
        return Err(Error::InvalidInstance {
            n: cfg.n,
            reason: "repetitions must be at least 1",
        });
    }
    (0..cfg.repetitions)
        .map(|r| {
            run_optimization_seeded(
                h,
                layout,
                cfg.master_seed.wrapping_add(r as u64),
                &cfg.optimizer,
            )
        })
        .collect()
}

/// The relative gaps reported alongside the mean trace.
pub const GAPS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Statistics over one batch of runs.
#[derive(Debug, Clone)]
pub struct AggregateStats {
    /// Mean shifted energy per iteration over included runs; finished runs
    /// are padded with their final energy.
    pub mean_energy_shifted: Vec<f64>,
    /// Runs whose final shifted energy was >= 0 (dropped from the mean
    /// trace, kept in the averaged distribution).
    pub excluded: usize,
    /// Final distribution averaged over all runs.
    pub averaged_distribution: OutputDistribution,
    /// First mean-trace iteration within each of [`GAPS`] of the ground
    /// energy.
    pub steps_to_gap: [Option<usize>; 3],
    /// Same thresholds computed per run.
    pub per_run_steps_to_gap: Vec<[Option<usize>; 3]>,
    /// Fidelity of the averaged distribution to the equal superposition of
    /// the ground states.
    pub fidelity_equal_superposition: f64,
    /// Fidelity to the first/second ground basis state, where present.
    pub fidelity_ground: [Option<f64>; 2],
    /// Averaged probability of the first/second ground basis state.
    pub mean_prob_ground: [Option<f64>; 2],
    pub ground_energy_shifted: f64,
    pub ground_states: Vec<usize>,
}

/// First index at which a shifted-energy trace comes within `gap * |e_g|`
/// of the ground energy `e_g`; `None` when it never does or `e_g` is zero.
pub fn steps_to_threshold(trace_shifted: &[f64], e_g: f64, gap: f64) -> Option<usize> {
    if e_g == 0.0 {
        return None;
    }
    trace_shifted
        .iter()
        .position(|&e| (e - e_g).abs() <= gap * e_g.abs())
}

pub fn aggregate(results: &[RunResult], h: &DiagonalHamiltonian) -> Result<AggregateStats> {
    // a run that ended exactly on a raw-zero ground state is always kept,
    // which matters for trivial instances whose spectrum is all zero
    let included: Vec<&RunResult> = results
        .iter()
        .filter(|r| r.final_energy_shifted() < 0.0 || r.final_energy_raw() == 0.0)
        .collect();
    if included.is_empty() {
        return Err(Error::AllRunsExcluded);
    }
    let excluded = results.len() - included.len();

    let longest = included.iter().map(|r| r.trace.len()).max().unwrap_or(0);
    let mut mean_energy_shifted = vec![0.0f64; longest];
    for r in &included {
        for (i, slot) in mean_energy_shifted.iter_mut().enumerate() {
            let e = if i < r.trace.len() {
                r.trace[i].energy_shifted
            } else {
                r.final_energy_shifted()
            };
            *slot += e;
        }
    }
    for slot in &mut mean_energy_shifted {
        *slot /= included.len() as f64;
    }

    let dim = h.dim();
    let mut avg = vec![0.0f64; dim];
    for r in results {
        for (a, &p) in avg.iter_mut().zip(r.final_distribution.probs()) {
            *a += p;
        }
    }
    for a in &mut avg {
        *a /= results.len() as f64;
    }
    let averaged_distribution = OutputDistribution::new(avg, None, DistributionKind::Exact)?;

    let e_g = h.ground_energy_shifted();
    let steps_to_gap = GAPS.map(|gap| steps_to_threshold(&mean_energy_shifted, e_g, gap));
    let per_run_steps_to_gap = results
        .iter()
        .map(|r| {
            let trace: Vec<f64> = r.trace.iter().map(|rec| rec.energy_shifted).collect();
            GAPS.map(|gap| steps_to_threshold(&trace, e_g, gap))
        })
        .collect();

    let grounds = ground_states_bruteforce(h);
    let mut equal_target = vec![Complex64::new(0.0, 0.0); dim];
    let amp = 1.0 / (grounds.len() as f64).sqrt();
    for &g in &grounds {
        equal_target[g] = Complex64::new(amp, 0.0);
    }
    let fidelity_equal_superposition = state_fidelity(&averaged_distribution, &equal_target);

    let mut fidelity_ground = [None, None];
    let mut mean_prob_ground = [None, None];
    for (k, &g) in grounds.iter().take(2).enumerate() {
        let mut target = vec![Complex64::new(0.0, 0.0); dim];
        target[g] = Complex64::new(1.0, 0.0);
        fidelity_ground[k] = Some(state_fidelity(&averaged_distribution, &target));
        mean_prob_ground[k] = Some(averaged_distribution.probs()[g]);
    }

    Ok(AggregateStats {
        mean_energy_shifted,
        excluded,
        averaged_distribution,
        steps_to_gap,
        per_run_steps_to_gap,
        fidelity_equal_superposition,
        fidelity_ground,
        mean_prob_ground,
        ground_energy_shifted: e_g,
        ground_states: grounds,
    })
}

/// The three families of parametrized trial states swept by the landscape
/// maps over a dimension-4 diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LandscapeFamily {
    /// sqrt(alpha)|01> + e^{-i phi} sqrt(1-alpha)|10>
    A,
    /// sqrt(beta)|00> + e^{-i phi} sqrt(1-beta)|01>
    B,
    /// sqrt(beta)|00> + sqrt(1-beta)(sqrt(alpha)|01> + sqrt(1-alpha)|10>)
    C,
}

impl LandscapeFamily {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "a" | "A" => Some(Self::A),
            "b" | "B" => Some(Self::B),
            "c" | "C" => Some(Self::C),
            _ => None,
        }
    }

    /// Column labels of the two grid axes.
    pub fn axis_names(self) -> (&'static str, &'static str) {
        match self {
            Self::A => ("alpha", "phi"),
            Self::B => ("beta", "phi"),
            Self::C => ("beta", "alpha"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AxisSpec {
    pub name: &'static str,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl AxisSpec {
    pub fn value(&self, i: usize) -> f64 {
        if self.steps <= 1 {
            self.start
        } else {
            self.start + (self.stop - self.start) * i as f64 / (self.steps - 1) as f64
        }
    }
}

/// Raw energies over a 2-D sweep; `energies[i * axis2.steps + j]` holds
/// the value at (axis1.value(i), axis2.value(j)).
#[derive(Debug, Clone)]
pub struct LandscapeGrid {
    pub family: LandscapeFamily,
    pub axis1: AxisSpec,
    pub axis2: AxisSpec,
    pub energies: Vec<f64>,
}

/// Sweep the family's trial states on a `grid_steps` x `grid_steps` grid
/// and evaluate raw energies from |amplitude|^2.
pub fn landscape_sweep(
    family: LandscapeFamily,
    h: &DiagonalHamiltonian,
    grid_steps: usize,
) -> Result<LandscapeGrid> {
    if h.dim() != 4 {
        return Err(Error::LandscapeDimension(h.dim()));
    }
    let steps = grid_steps.max(2);
    let (name1, name2) = family.axis_names();
    let tau = std::f64::consts::TAU;
    let axis1 = AxisSpec {
        name: name1,
        start: 0.0,
        stop: 1.0,
        steps,
    };
    let axis2 = AxisSpec {
        name: name2,
        start: 0.0,
        stop: if matches!(family, LandscapeFamily::C) {
            1.0
        } else {
            tau
        },
        steps,
    };

    let mut energies = Vec::with_capacity(steps * steps);
    for i in 0..steps {
        let v1 = axis1.value(i);
        for j in 0..steps {
            let v2 = axis2.value(j);
            let amps = trial_state(family, v1, v2);
            let dist = exact_probabilities(&amps)?;
            energies.push(energy_expectation(&dist, h, false)?);
        }
    }
    Ok(LandscapeGrid {
        family,
        axis1,
        axis2,
        energies,
    })
}

fn trial_state(family: LandscapeFamily, v1: f64, v2: f64) -> ndarray::Array1<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let mut amps = ndarray::Array1::from_elem(4, zero);
    match family {
        LandscapeFamily::A => {
            let (alpha, phi) = (v1, v2);
            amps[1] = Complex64::new(alpha.sqrt(), 0.0);
            amps[2] = Complex64::from_polar((1.0 - alpha).sqrt(), -phi);
        }
        LandscapeFamily::B => {
            let (beta, phi) = (v1, v2);
            amps[0] = Complex64::new(beta.sqrt(), 0.0);
            amps[1] = Complex64::from_polar((1.0 - beta).sqrt(), -phi);
        }
        LandscapeFamily::C => {
            let (beta, alpha) = (v1, v2);
            amps[0] = Complex64::new(beta.sqrt(), 0.0);
            let rest = (1.0 - beta).sqrt();
            amps[1] = Complex64::new(rest * alpha.sqrt(), 0.0);
            amps[2] = Complex64::new(rest * (1.0 - alpha).sqrt(), 0.0);
        }
    }
    amps
}

/// Label of basis state `index` as a bit string over the free bits.
pub fn basis_label(index: usize, free_bits: u32) -> String {
    if free_bits == 0 {
        return "0".to_string();
    }
    (0..free_bits)
        .rev()
        .map(|b| if index >> b & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Write convergence.csv, distribution.csv, summary.json and (for
/// dimension-4 instances) landscape_{a,b,c}.csv into `dir`. Identical
/// inputs produce byte-identical files. Pass `stats = None` with no
/// results for headers-only CSVs and a zero-count summary.
pub fn export(
    stats: Option<&AggregateStats>,
    results: &[RunResult],
    h: &DiagonalHamiltonian,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();

    let path = dir.join("convergence.csv");
    {
        let mut f = create(&path)?;
        writeln!(f, "run_id,iteration,n_evals,energy_raw,energy_shifted").map_err(io_err(&path))?;
        for (run_id, r) in results.iter().enumerate() {
            for rec in &r.trace {
                writeln!(
                    f,
                    "{},{},{},{},{}",
                    run_id, rec.iter, rec.n_evals_cumulative, rec.energy_raw, rec.energy_shifted
                )
                .map_err(io_err(&path))?;
            }
        }
    }
    written.push(path);

    let free_bits = h.layout.free_x + h.layout.free_y;
    let path = dir.join("distribution.csv");
    {
        let mut f = create(&path)?;
        let header: Vec<String> = (0..h.dim()).map(|i| format!("p{}", basis_label(i, free_bits))).collect();
        writeln!(f, "run_id,{}", header.join(",")).map_err(io_err(&path))?;
        for (run_id, r) in results.iter().enumerate() {
            let row: Vec<String> = r
                .final_distribution
                .probs()
                .iter()
                .map(|p| p.to_string())
                .collect();
            writeln!(f, "{},{}", run_id, row.join(",")).map_err(io_err(&path))?;
        }
        if let Some(stats) = stats {
            let row: Vec<String> = stats
                .averaged_distribution
                .probs()
                .iter()
                .map(|p| p.to_string())
                .collect();
            writeln!(f, "MEAN,{}", row.join(",")).map_err(io_err(&path))?;
        }
    }
    written.push(path);

    if h.dim() == 4 {
        for family in [LandscapeFamily::A, LandscapeFamily::B, LandscapeFamily::C] {
            let grid = landscape_sweep(family, h, 101)?;
            let name = match family {
                LandscapeFamily::A => "landscape_a.csv",
                LandscapeFamily::B => "landscape_b.csv",
                LandscapeFamily::C => "landscape_c.csv",
            };
            let path = dir.join(name);
            write_landscape_csv(&grid, &path)?;
            written.push(path);
        }
    }

    let path = dir.join("summary.json");
    {
        let summary = summary_json(stats, results, h);
        let mut f = create(&path)?;
        let text = serde_json::to_string_pretty(&summary)?;
        writeln!(f, "{text}").map_err(io_err(&path))?;
    }
    written.push(path);

    Ok(written)
}

pub fn write_landscape_csv(grid: &LandscapeGrid, path: &Path) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "{},{},energy", grid.axis1.name, grid.axis2.name).map_err(io_err(path))?;
    for i in 0..grid.axis1.steps {
        for j in 0..grid.axis2.steps {
            writeln!(
                f,
                "{},{},{}",
                grid.axis1.value(i),
                grid.axis2.value(j),
                grid.energies[i * grid.axis2.steps + j]
            )
            .map_err(io_err(path))?;
        }
    }
    Ok(())
}

/// The summary schema; key names follow the two-qubit instance, where the
/// first two ground states read |01> and |10>.
pub fn summary_json(
    stats: Option<&AggregateStats>,
    results: &[RunResult],
    h: &DiagonalHamiltonian,
) -> serde_json::Value {
    match stats {
        Some(stats) => json!({
            "n": h.n,
            "repetitions": results.len(),
            "excluded": stats.excluded,
            "ground_energy_shifted": stats.ground_energy_shifted,
            "steps_to_gap": {
                "1e-2": stats.steps_to_gap[0],
                "1e-3": stats.steps_to_gap[1],
                "1e-4": stats.steps_to_gap[2],
            },
            "fidelity_equal_superposition": stats.fidelity_equal_superposition,
            "fidelity_01": stats.fidelity_ground[0],
            "fidelity_10": stats.fidelity_ground[1],
            "mean_p01": stats.mean_prob_ground[0],
            "mean_p10": stats.mean_prob_ground[1],
        }),
        None => json!({
            "n": h.n,
            "repetitions": results.len(),
            "excluded": 0,
            "ground_energy_shifted": h.ground_energy_shifted(),
            "steps_to_gap": { "1e-2": null, "1e-3": null, "1e-4": null },
            "fidelity_equal_superposition": null,
            "fidelity_01": null,
            "fidelity_10": null,
            "mean_p01": null,
            "mean_p10": null,
        }),
    }
}
