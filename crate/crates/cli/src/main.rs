//! `pvqa`: factor odd semiprimes on a simulated photonic mesh, sweep
//! energy landscapes, and diagonalize unitaries into mesh phases.

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use photonic_vqa::{
    aggregate, bit_lengths, build_hamiltonian, compose_mesh, decompose_unitary, export,
    landscape_sweep, run_repetitions, trace_fidelity, BitLengthRule, DiagonalHamiltonian,
    ExperimentConfig, LandscapeFamily, MatrixJson, MeshLayout, OptimizerConfig, SemiprimeInstance,
    ShotMode, ShotModel, UnitaryMatrix,
};

const EXIT_USAGE: u8 = 2;
const EXIT_NO_FACTORS: u8 = 3;
const EXIT_NOT_UNITARY: u8 = 4;

#[derive(Parser)]
#[command(name = "pvqa", version, about = "Variational factorization on a simulated photonic interferometer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run repeated optimizations that drive a photon to the ground state
    /// encoding the factors of N, and export the statistics
    Factor(FactorArgs),
    /// Sweep one of the trial-state energy landscapes onto a CSV grid
    Landscape(LandscapeArgs),
    /// Diagonalize a unitary matrix into mesh phases plus a residual diagonal
    Decompose(DecomposeArgs),
    /// Build the diagonal problem Hamiltonian for N and write it as JSON
    Hamiltonian(HamiltonianArgs),
}

#[derive(Args)]
struct FactorArgs {
    /// Odd semiprime, at least 9
    n: u64,
    /// Number of optimization repetitions
    #[arg(long)]
    reps: Option<usize>,
    /// Master seed (falls back to VQA_SEED, then the config file, then 7)
    #[arg(long)]
    seed: Option<u64>,
    /// Shots per energy evaluation (multinomial counting statistics)
    #[arg(long, conflicts_with = "exact")]
    shots: Option<u64>,
    /// Use exact probabilities instead of finite counting statistics
    #[arg(long)]
    exact: bool,
    /// Finite-difference spacing
    #[arg(long)]
    h: Option<f64>,
    /// Learning rate
    #[arg(long)]
    eta: Option<f64>,
    /// Convergence threshold on successive energies
    #[arg(long)]
    epsilon: Option<f64>,
    /// Iteration cap per repetition
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    /// Output directory for convergence.csv, distribution.csv,
    /// landscape_*.csv and summary.json
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overwrite existing exports in the output directory
    #[arg(long)]
    force: bool,
    /// JSON file mirroring the experiment configuration; explicit flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct LandscapeArgs {
    /// Trial-state family: a, b, or c
    #[arg(long)]
    family: String,
    /// Instance whose Hamiltonian is swept (must reduce to two free bits)
    #[arg(long, default_value_t = 35)]
    n: u64,
    /// Grid points per axis
    #[arg(long, default_value_t = 101)]
    grid: usize,
    /// Output CSV path (defaults to landscape_<family>.csv)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Input JSON: {"m": M, "re": [[..]], "im": [[..]]}, row-major
    #[arg(long = "in")]
    input: PathBuf,
    /// Output JSON with thetas, phis and the residual diagonal
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct HamiltonianArgs {
    /// Odd semiprime, at least 9
    n: u64,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Force the general bit-length rule instead of the successive-prime one
    #[arg(long)]
    general: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Factor(args) => cmd_factor(args),
        Command::Landscape(args) => cmd_landscape(args),
        Command::Decompose(args) => cmd_decompose(args),
        Command::Hamiltonian(args) => cmd_hamiltonian(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn preprocess(n: u64, force_general: bool) -> anyhow::Result<Option<DiagonalHamiltonian>> {
    let instance = match SemiprimeInstance::new(n, !force_general) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(None);
        }
    };
    let layout = bit_lengths(&instance)?;
    match build_hamiltonian(&layout, n) {
        Ok(h) => Ok(Some(h)),
        Err(e) => {
            eprintln!("error: {e}");
            Ok(None)
        }
    }
}

fn cmd_factor(args: FactorArgs) -> anyhow::Result<u8> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<ExperimentConfig>(&text)
                .with_context(|| format!("parsing {}", path.display()))?
        }
        None => ExperimentConfig {
            optimizer: OptimizerConfig {
                shots: ShotMode::Sampled {
                    shots: 10_000,
                    model: ShotModel::Multinomial,
                },
                ..OptimizerConfig::default()
            },
            ..ExperimentConfig::default()
        },
    };

    cfg.n = args.n;
    if let Some(reps) = args.reps {
        cfg.repetitions = reps;
    }
    let env_seed = std::env::var("VQA_SEED")
        .ok()
        .and_then(|s| s.parse::<u64>().ok());
    if let Some(seed) = args.seed.or(env_seed) {
        cfg.master_seed = seed;
    }
    if let Some(h) = args.h {
        cfg.optimizer.h = h;
    }
    if let Some(eta) = args.eta {
        cfg.optimizer.eta = eta;
    }
    if let Some(eps) = args.epsilon {
        cfg.optimizer.epsilon = eps;
    }
    if let Some(mi) = args.max_iters {
        cfg.optimizer.max_iters = mi;
    }
    if args.exact {
        cfg.optimizer.shots = ShotMode::Exact;
    } else if let Some(shots) = args.shots {
        cfg.optimizer.shots = ShotMode::Sampled {
            shots,
            model: ShotModel::Multinomial,
        };
    }
    let out_dir = args
        .out
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    cfg.out_dir = Some(out_dir.clone());

    let Some(h) = preprocess(cfg.n, false)? else {
        return Ok(EXIT_USAGE);
    };
    let rule = match h.layout.rule {
        BitLengthRule::SuccessivePrime => "successive-prime",
        BitLengthRule::General => "general",
    };
    println!(
        "N = {}: n_x = {}, n_y = {} ({} rule), {} basis states",
        cfg.n,
        h.layout.n_x,
        h.layout.n_y,
        rule,
        h.dim()
    );

    let existing: Vec<String> = [
        "convergence.csv",
        "distribution.csv",
        "summary.json",
        "landscape_a.csv",
        "landscape_b.csv",
        "landscape_c.csv",
    ]
    .iter()
    .filter(|name| out_dir.join(name).exists())
    .map(|s| s.to_string())
    .collect();
    if !existing.is_empty() && !args.force {
        eprintln!(
            "error: {} already contains {}; pass --force to overwrite",
            out_dir.display(),
            existing.join(", ")
        );
        return Ok(EXIT_USAGE);
    }

    let mesh = MeshLayout::new(h.dim());
    println!(
        "mesh: {} modes, {} interferometers, {} parameters; seed {}",
        mesh.modes(),
        mesh.mzi_count(),
        2 * mesh.mzi_count(),
        cfg.master_seed
    );
    let results = run_repetitions(&cfg, &h, &mesh)?;
    let stats = aggregate(&results, &h)?;
    let written = export(Some(&stats), &results, &h, &out_dir)?;

    let decoded = pick_solution(stats.averaged_distribution.probs(), &results, &h);
    println!(
        "excluded {} of {} runs; mean shifted energy ends at {:.6}",
        stats.excluded,
        results.len(),
        stats.mean_energy_shifted.last().copied().unwrap_or(f64::NAN)
    );
    if let [Some(g1), Some(g2), Some(g3)] = stats.steps_to_gap {
        println!("mean-trace gap crossings: 1% at {g1}, 0.1% at {g2}, 0.01% at {g3}");
    }
    println!(
        "equal-superposition fidelity {:.5}",
        stats.fidelity_equal_superposition
    );
    for path in &written {
        println!("wrote {}", path.display());
    }

    match decoded {
        Some((x, y)) => {
            println!("factors: {} = {} x {} (valid)", cfg.n, x, y);
            Ok(0)
        }
        None => {
            eprintln!("error: no run decoded a valid factorization of {}", cfg.n);
            Ok(EXIT_NO_FACTORS)
        }
    }
}

/// Argmax of the averaged distribution, falling back to the most frequent
/// valid per-run solution.
fn pick_solution(
    averaged: &[f64],
    results: &[photonic_vqa::RunResult],
    h: &DiagonalHamiltonian,
) -> Option<(u64, u64)> {
    let mut best = 0;
    for (i, &p) in averaged.iter().enumerate() {
        if p > averaged[best] {
            best = i;
        }
    }
    let pair = photonic_vqa::decode_solution(best, &h.layout, h.n);
    if pair.valid {
        return Some((pair.x, pair.y));
    }
    let mut votes: HashMap<(u64, u64), usize> = HashMap::new();
    for r in results {
        if r.decoded.valid {
            *votes.entry((r.decoded.x, r.decoded.y)).or_default() += 1;
        }
    }
    votes.into_iter().max_by_key(|&(_, c)| c).map(|(p, _)| p)
}

fn cmd_landscape(args: LandscapeArgs) -> anyhow::Result<u8> {
    let Some(family) = LandscapeFamily::parse(&args.family) else {
        eprintln!("error: unknown family {:?}; expected a, b, or c", args.family);
        return Ok(EXIT_USAGE);
    };
    let Some(h) = preprocess(args.n, false)? else {
        return Ok(EXIT_USAGE);
    };
    let grid = match landscape_sweep(family, &h, args.grid) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_USAGE);
        }
    };
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("landscape_{}.csv", args.family.to_lowercase())));
    photonic_vqa::experiment::write_landscape_csv(&grid, &out)?;
    println!(
        "wrote {} ({} x {} grid)",
        out.display(),
        grid.axis1.steps,
        grid.axis2.steps
    );
    Ok(0)
}

fn cmd_decompose(args: DecomposeArgs) -> anyhow::Result<u8> {
    let text = match std::fs::read_to_string(&args.input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: reading {}: {e}", args.input.display());
            return Ok(EXIT_USAGE);
        }
    };
    let matrix = match serde_json::from_str::<MatrixJson>(&text).map(|m| m.to_matrix()) {
        Ok(Ok(m)) => m,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            return Ok(EXIT_USAGE);
        }
        Err(e) => {
            eprintln!("error: parsing {}: {e}", args.input.display());
            return Ok(EXIT_USAGE);
        }
    };
    let unitary = match UnitaryMatrix::new(matrix) {
        Ok(u) => u,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_NOT_UNITARY);
        }
    };

    let layout = MeshLayout::new(unitary.modes());
    let d = decompose_unitary(&unitary, &layout)?;

    let mut reconstructed = compose_mesh(&layout, &d.phases)?.into_inner();
    for (i, &di) in d.diagonal.iter().enumerate() {
        for j in 0..layout.modes() {
            reconstructed[[i, j]] *= di;
        }
    }
    let fidelity = trace_fidelity(unitary.matrix(), &reconstructed);

    let output = serde_json::json!({
        "m": layout.modes(),
        "thetas": d.phases.thetas(),
        "phis": d.phases.phis(),
        "diagonal": {
            "re": d.diagonal.iter().map(|c| c.re).collect::<Vec<_>>(),
            "im": d.diagonal.iter().map(|c| c.im).collect::<Vec<_>>(),
        },
        "roundtrip_fidelity": fidelity,
    });
    std::fs::write(&args.out, serde_json::to_string_pretty(&output)?)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("round-trip fidelity {fidelity:.12}");
    println!("wrote {}", args.out.display());
    Ok(0)
}

fn cmd_hamiltonian(args: HamiltonianArgs) -> anyhow::Result<u8> {
    let Some(h) = preprocess(args.n, args.general)? else {
        return Ok(EXIT_USAGE);
    };
    let json = photonic_vqa::factoring::HamiltonianJson::from_hamiltonian(&h);
    let text = serde_json::to_string_pretty(&json)?;
    match args.out {
        Some(path) => {
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(0)
}
