//! Wasm bindings for the browser demo. Each export returns a JSON string;
//! the page under `www/` renders them onto canvases with no framework.

use wasm_bindgen::prelude::wasm_bindgen;

use photonic_vqa::{
    aggregate, bit_lengths, build_hamiltonian, energy_expectation, evolve_mesh_column,
    exact_probabilities, landscape_sweep, run_repetitions, ExperimentConfig, LandscapeFamily,
    MeshLayout, OptimizerConfig, PhaseConfig, SemiprimeInstance, ShotMode, ShotModel,
};

fn hamiltonian_for(n: u64) -> Result<photonic_vqa::DiagonalHamiltonian, String> {
    let instance = SemiprimeInstance::new(n, true).map_err(|e| e.to_string())?;
    let layout = bit_lengths(&instance).map_err(|e| e.to_string())?;
    build_hamiltonian(&layout, n).map_err(|e| e.to_string())
}

fn labels(dim: usize, free_bits: u32) -> Vec<String> {
    (0..dim)
        .map(|i| photonic_vqa::experiment::basis_label(i, free_bits))
        .collect()
}

/// Repeated optimization runs in exact or sampled mode, plus aggregate
/// statistics for plotting.
pub fn factorization_json(
    n: u64,
    repetitions: usize,
    master_seed: u64,
    shots: u64,
) -> Result<String, String> {
    let h = hamiltonian_for(n)?;
    let mesh = MeshLayout::new(h.dim());
    let cfg = ExperimentConfig {
        n,
        repetitions,
        master_seed,
        optimizer: OptimizerConfig {
            shots: if shots == 0 {
                ShotMode::Exact
            } else {
                ShotMode::Sampled {
                    shots,
                    model: ShotModel::Multinomial,
                }
            },
            ..OptimizerConfig::default()
        },
        out_dir: None,
    };
    let results = run_repetitions(&cfg, &h, &mesh).map_err(|e| e.to_string())?;
    let stats = aggregate(&results, &h).map_err(|e| e.to_string())?;

    let traces: Vec<Vec<f64>> = results
        .iter()
        .take(30)
        .map(|r| r.trace.iter().map(|rec| rec.energy_shifted).collect())
        .collect();
    let converged = results.iter().filter(|r| r.converged).count();
    let decoded = photonic_vqa::decode_solution(
        stats.averaged_distribution.argmax(),
        &h.layout,
        n,
    );

    let value = serde_json::json!({
        "n": n,
        "nx": h.layout.n_x,
        "ny": h.layout.n_y,
        "dim": h.dim(),
        "labels": labels(h.dim(), h.layout.free_x + h.layout.free_y),
        "modes": mesh.modes(),
        "mzis": mesh.mzi_count(),
        "repetitions": repetitions,
        "converged": converged,
        "excluded": stats.excluded,
        "ground_energy_shifted": stats.ground_energy_shifted,
        "mean_trace_shifted": stats.mean_energy_shifted,
        "run_traces_shifted": traces,
        "steps_to_gap": {
            "1e-2": stats.steps_to_gap[0],
            "1e-3": stats.steps_to_gap[1],
            "1e-4": stats.steps_to_gap[2],
        },
        "avg_distribution": stats.averaged_distribution.probs(),
        "fidelity_equal_superposition": stats.fidelity_equal_superposition,
        "factors": { "x": decoded.x, "y": decoded.y, "valid": decoded.valid },
    });
    Ok(value.to_string())
}

/// Energy heatmap of one trial-state family on a square grid.
pub fn landscape_json(family: &str, n: u64, grid: usize) -> Result<String, String> {
    let family = LandscapeFamily::parse(family).ok_or("family must be a, b, or c")?;
    let h = hamiltonian_for(n)?;
    let grid = landscape_sweep(family, &h, grid.clamp(2, 201)).map_err(|e| e.to_string())?;
    let (e_min, e_max) = grid
        .energies
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| {
            (lo.min(e), hi.max(e))
        });
    let value = serde_json::json!({
        "axis1": { "name": grid.axis1.name, "start": grid.axis1.start, "stop": grid.axis1.stop, "steps": grid.axis1.steps },
        "axis2": { "name": grid.axis2.name, "start": grid.axis2.start, "stop": grid.axis2.stop, "steps": grid.axis2.steps },
        "energies": grid.energies,
        "e_min": e_min,
        "e_max": e_max,
    });
    Ok(value.to_string())
}

/// Output statistics of the four-mode mesh at explicit phases, scored
/// against the N = 35 diagonal.
pub fn mesh_output_json(thetas: &[f64], phis: &[f64]) -> Result<String, String> {
    let h = hamiltonian_for(35)?;
    let layout = MeshLayout::new(4);
    let cfg = PhaseConfig::new(thetas.to_vec(), phis.to_vec()).map_err(|e| e.to_string())?;
    let amps = evolve_mesh_column(&layout, &cfg, 0).map_err(|e| e.to_string())?;
    let dist = exact_probabilities(&amps).map_err(|e| e.to_string())?;
    let raw = energy_expectation(&dist, &h, false).map_err(|e| e.to_string())?;
    let decoded = photonic_vqa::decode_solution(dist.argmax(), &h.layout, 35);
    let value = serde_json::json!({
        "labels": labels(4, 2),
        "probs": dist.probs(),
        "energy_raw": raw,
        "energy_shifted": raw - h.shift(),
        "ground_energy_shifted": -h.shift(),
        "decoded": { "x": decoded.x, "y": decoded.y, "valid": decoded.valid },
    });
    Ok(value.to_string())
}

#[wasm_bindgen]
pub fn run_factorization(n: u64, repetitions: usize, master_seed: u64, shots: u64) -> String {
    wrap(factorization_json(n, repetitions, master_seed, shots))
}

#[wasm_bindgen]
pub fn landscape_grid(family: &str, n: u64, grid: usize) -> String {
    wrap(landscape_json(family, n, grid))
}

#[wasm_bindgen]
pub fn mesh_output(thetas: &[f64], phis: &[f64]) -> String {
    wrap(mesh_output_json(thetas, phis))
}

fn wrap(result: Result<String, String>) -> String {
    match result {
        Ok(s) => s,
        Err(e) => serde_json::json!({ "error": e }).to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_json_decodes_35() {
        let text = factorization_json(35, 10, 7, 0).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["dim"], 4);
        assert!(v["factors"]["valid"].as_bool().unwrap());
        let (x, y) = (v["factors"]["x"].as_u64().unwrap(), v["factors"]["y"].as_u64().unwrap());
        assert_eq!(x * y, 35);
        assert_eq!(v["labels"][1], "01");
        assert!(v["fidelity_equal_superposition"].as_f64().unwrap() > 0.9);
    }

    #[test]
    fn landscape_json_family_a_is_flat() {
        let text = landscape_json("a", 35, 21).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["energies"].as_array().unwrap().len(), 21 * 21);
        assert!(v["e_max"].as_f64().unwrap().abs() <= 1e-12);
    }

    #[test]
    fn mesh_output_all_reflection_is_00() {
        let fr = std::f64::consts::FRAC_PI_2;
        let text = mesh_output_json(&[fr; 6], &[0.0; 6]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!((v["probs"][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert!((v["energy_raw"].as_f64().unwrap() - 100.0).abs() < 1e-9);
        assert!(!v["decoded"]["valid"].as_bool().unwrap());
    }

    #[test]
    fn errors_come_back_as_json() {
        let text = wrap(landscape_json("q", 35, 21));
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v["error"].as_str().is_some());
    }
}
