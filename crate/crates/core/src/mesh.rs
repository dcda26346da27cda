//! Programmable multiport interferometers built from Mach-Zehnder blocks.
//!
//! An M-mode rectangular mesh carries L = M(M-1)/2 MZIs, each with an
//! internal phase `theta` in [0, pi/2] (theta = pi/2 reflects, theta = 0
//! fully swaps the pair) and an external phase `phi` in [0, 2pi) on the
//! first input of the pair. The module composes a mesh into its unitary,
//! diagonalizes arbitrary unitaries back into phases, and embeds a small
//! mesh into a larger one with the surrounding MZIs held in reflection.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::UnitaryMatrix;

/// One MZI: acts on modes (j, j+1) of its host mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MZISpec {
    pub j: usize,
    pub theta: f64,
    pub phi: f64,
}

impl MZISpec {
    /// `phi` is wrapped into [0, 2pi); `theta` outside [0, pi/2] is rejected.
    pub fn new(j: usize, theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::ThetaRange(theta));
        }
        Ok(Self {
            j,
            theta,
            phi: phi.rem_euclid(TAU),
        })
    }

    pub fn validate_for(&self, modes: usize) -> Result<()> {
        if self.j + 1 >= modes {
            return Err(Error::ModeIndex {
                j: self.j,
                modes,
            });
        }
        Ok(())
    }
}

/// 2x2 transfer block: i e^{i theta} [[e^{i phi} sin, cos], [e^{i phi} cos, -sin]].
fn block(theta: f64, phi: f64) -> [[Complex64; 2]; 2] {
    let pref = Complex64::i() * Complex64::from_polar(1.0, theta);
    let ext = Complex64::from_polar(1.0, phi);
    let (s, c) = theta.sin_cos();
    [
        [pref * ext * s, pref * c],
        [pref * ext * c, -pref * s],
    ]
}

/// Full M-mode matrix of a single MZI: identity except the (j, j+1) block.
pub fn mzi_matrix(spec: &MZISpec, modes: usize) -> Result<UnitaryMatrix> {
    spec.validate_for(modes)?;
    let b = block(spec.theta, spec.phi);
    let mut u: Array2<Complex64> = Array2::eye(modes);
    u[[spec.j, spec.j]] = b[0][0];
    u[[spec.j, spec.j + 1]] = b[0][1];
    u[[spec.j + 1, spec.j]] = b[1][0];
    u[[spec.j + 1, spec.j + 1]] = b[1][1];
    UnitaryMatrix::new(u)
}

/// Whether a slot was introduced by a right-inverse or a left multiplication
/// during diagonalization; this fixes where it sits in the composed product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Right,
    Left,
}

/// Geometry of an M-mode rectangular mesh.
///
/// Slot l holds the l-th phase pair. Slots are numbered the way the
/// diagonalization introduces them: all right-inverse slots first (odd
/// diagonals, in nulling order), then the left slots (even diagonals).
/// For M = 4 the slot mode-pairs read T12, T34, T23, T12, T23, T34 and the
/// composed unitary is
///
/// `U = T23(5) T34(6) T12(4) T23(3) T34(2) T12(1)`
///
/// so a photon traverses slots 1, 2, 3, 4, 6, 5 in that order.
#[derive(Debug, Clone)]
pub struct MeshLayout {
    modes: usize,
    slots: Vec<(usize, Side)>,
    n_right: usize,
}

impl MeshLayout {
    pub fn new(modes: usize) -> Self {
        assert!(modes >= 1, "a mesh needs at least one mode");
        let mut rights = Vec::new();
        let mut lefts = Vec::new();
        for i in 1..modes {
            if i % 2 == 1 {
                // null U[m-1-js][i-1-js] with a right inverse on columns (c, c+1)
                for js in 0..i {
                    rights.push((i - 1 - js, Side::Right));
                }
            } else {
                // null U[m+js-i-1][js-1] with a left multiplication on rows (r-1, r)
                for js in 1..=i {
                    lefts.push((modes + js - i - 2, Side::Left));
                }
            }
        }
        let n_right = rights.len();
        let mut slots = rights;
        slots.append(&mut lefts);
        debug_assert_eq!(slots.len(), modes * (modes - 1) / 2);
        Self {
            modes,
            slots,
            n_right,
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// L = M(M-1)/2.
    pub fn mzi_count(&self) -> usize {
        self.slots.len()
    }

    /// Lower mode index of each slot's pair.
    pub fn slot_modes(&self) -> Vec<usize> {
        self.slots.iter().map(|&(j, _)| j).collect()
    }

    /// Slot indices in the order a photon meets them: right slots ascending,
    /// then left slots descending.
    fn application_order(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_right).chain((self.n_right..self.slots.len()).rev())
    }
}

/// The 2L phase parameters of a mesh; the optimizer's state vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseConfig {
    thetas: Vec<f64>,
    phis: Vec<f64>,
}

impl PhaseConfig {
    /// Same wrapping rules as [`MZISpec::new`], applied entrywise.
    pub fn new(thetas: Vec<f64>, phis: Vec<f64>) -> Result<Self> {
        if thetas.len() != phis.len() {
            return Err(Error::PhaseCount {
                expected: thetas.len(),
                got: phis.len(),
            });
        }
        for &t in &thetas {
            if !(0.0..=FRAC_PI_2).contains(&t) {
                return Err(Error::ThetaRange(t));
            }
        }
        let phis = phis.into_iter().map(|p| p.rem_euclid(TAU)).collect();
        Ok(Self { thetas, phis })
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }
}

fn check_config(layout: &MeshLayout, cfg: &PhaseConfig) -> Result<()> {
    if cfg.len() != layout.mzi_count() {
        return Err(Error::PhaseCount {
            expected: layout.mzi_count(),
            got: cfg.len(),
        });
    }
    Ok(())
}

/// W := T_j(theta, phi) W  (rows j, j+1).
fn apply_left(w: &mut Array2<Complex64>, j: usize, theta: f64, phi: f64) {
    let b = block(theta, phi);
    let n = w.ncols();
    for c in 0..n {
        let top = w[[j, c]];
        let bot = w[[j + 1, c]];
        w[[j, c]] = b[0][0] * top + b[0][1] * bot;
        w[[j + 1, c]] = b[1][0] * top + b[1][1] * bot;
    }
}

/// W := W T_j(theta, phi)^H  (columns j, j+1).
fn apply_right_inverse(w: &mut Array2<Complex64>, j: usize, theta: f64, phi: f64) {
    let b = block(theta, phi);
    let n = w.nrows();
    for r in 0..n {
        let left = w[[r, j]];
        let right = w[[r, j + 1]];
        w[[r, j]] = left * b[0][0].conj() + right * b[0][1].conj();
        w[[r, j + 1]] = left * b[1][0].conj() + right * b[1][1].conj();
    }
}

/// Product of the layout's MZIs at the given phases, with the residual
/// diagonal taken as the identity.
pub fn compose_mesh(layout: &MeshLayout, cfg: &PhaseConfig) -> Result<UnitaryMatrix> {
    check_config(layout, cfg)?;
    let mut u: Array2<Complex64> = Array2::eye(layout.modes);
    for slot in layout.application_order() {
        let (j, _) = layout.slots[slot];
        apply_left(&mut u, j, cfg.thetas[slot], cfg.phis[slot]);
    }
    UnitaryMatrix::new(u)
}

/// Column `mode` of the composed unitary, computed by pushing a basis
/// vector through the slots; identical arithmetic to composing and then
/// reading the column, at O(L) instead of O(L * M).
pub fn evolve_mesh_column(
    layout: &MeshLayout,
    cfg: &PhaseConfig,
    mode: usize,
) -> Result<ndarray::Array1<Complex64>> {
    check_config(layout, cfg)?;
    if mode >= layout.modes {
        return Err(Error::ModeIndex {
            j: mode,
            modes: layout.modes,
        });
    }
    let mut v = ndarray::Array1::from_elem(layout.modes, Complex64::new(0.0, 0.0));
    v[mode] = Complex64::new(1.0, 0.0);
    for slot in layout.application_order() {
        let (j, _) = layout.slots[slot];
        let b = block(cfg.thetas[slot], cfg.phis[slot]);
        let top = v[j];
        let bot = v[j + 1];
        v[j] = b[0][0] * top + b[0][1] * bot;
        v[j + 1] = b[1][0] * top + b[1][1] * bot;
    }
    Ok(v)
}

/// Phases plus the residual diagonal returned by [`decompose_unitary`]:
/// `diag(diagonal) * compose_mesh(layout, phases)` reproduces the input.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub phases: PhaseConfig,
    pub diagonal: Vec<Complex64>,
}

const PIVOT_EPS: f64 = 1e-14;

/// Phases nulling W[r][c] by a right inverse on columns (c, c+1).
fn null_right(w: &Array2<Complex64>, r: usize, c: usize) -> (f64, f64) {
    let wl = w[[r, c]];
    let wr = w[[r, c + 1]];
    if wl.norm() < PIVOT_EPS && wr.norm() < PIVOT_EPS {
        // already null; reflection leaves the rest of the matrix untouched
        return (FRAC_PI_2, 0.0);
    }
    let theta = wr.norm().atan2(wl.norm());
    let phi = if wl.norm() < PIVOT_EPS || wr.norm() < PIVOT_EPS {
        0.0
    } else {
        (wl.arg() - (-wr).arg()).rem_euclid(TAU)
    };
    (theta, phi)
}

/// Phases nulling W[r][c] by a left multiplication on rows (r-1, r).
fn null_left(w: &Array2<Complex64>, r: usize, c: usize) -> (f64, f64) {
    let top = w[[r - 1, c]];
    let bot = w[[r, c]];
    if top.norm() < PIVOT_EPS && bot.norm() < PIVOT_EPS {
        return (FRAC_PI_2, 0.0);
    }
    let theta = top.norm().atan2(bot.norm());
    let phi = if top.norm() < PIVOT_EPS || bot.norm() < PIVOT_EPS {
        0.0
    } else {
        (bot.arg() - top.arg()).rem_euclid(TAU)
    };
    (theta, phi)
}

/// Diagonalize U over the layout: alternately null odd diagonals with
/// right-multiplied inverses and even diagonals with left multiplications,
/// then commute the left factors through the residual diagonal so the
/// result matches the composed product form.
pub fn decompose_unitary(u: &UnitaryMatrix, layout: &MeshLayout) -> Result<Decomposition> {
    let m = layout.modes;
    if u.modes() != m {
        return Err(Error::Dimension {
            what: "unitary to decompose",
            expected: m,
            got: u.modes(),
        });
    }
    let mut w = u.matrix().clone();
    let l = layout.mzi_count();
    let mut thetas = vec![0.0; l];
    let mut phis = vec![0.0; l];

    let mut right_slot = 0;
    let mut left_slot = layout.n_right;
    for i in 1..m {
        if i % 2 == 1 {
            for js in 0..i {
                let r = m - 1 - js;
                let c = i - 1 - js;
                let (theta, phi) = null_right(&w, r, c);
                apply_right_inverse(&mut w, c, theta, phi);
                thetas[right_slot] = theta;
                phis[right_slot] = phi;
                right_slot += 1;
            }
        } else {
            for js in 1..=i {
                let r = m + js - i - 1;
                let c = js - 1;
                let (theta, phi) = null_left(&w, r, c);
                apply_left(&mut w, r - 1, theta, phi);
                thetas[left_slot] = theta;
                phis[left_slot] = phi;
                left_slot += 1;
            }
        }
    }

    let mut diagonal: Vec<Complex64> = (0..m).map(|k| w[[k, k]]).collect();

    // U = L1^H .. Lp^H D Rq .. R1; push each left inverse through the
    // diagonal via T_j(theta, phi)^H D = D' T_j(theta, phi') with
    // phi' = arg(D[j]) - arg(D[j+1]).
    for slot in (layout.n_right..l).rev() {
        let (j, _) = layout.slots[slot];
        let a = diagonal[j];
        let b = diagonal[j + 1];
        let theta = thetas[slot];
        let phi = phis[slot];
        phis[slot] = (a.arg() - b.arg()).rem_euclid(TAU);
        diagonal[j] = -Complex64::from_polar(1.0, -(2.0 * theta + phi)) * b;
        diagonal[j + 1] = -Complex64::from_polar(1.0, -2.0 * theta) * b;
    }

    Ok(Decomposition {
        phases: PhaseConfig::new(thetas, phis)?,
        diagonal,
    })
}

/// A small mesh placed in the first `inner` modes of a larger one, with
/// every MZI touching the remaining modes pinned in reflection so no
/// amplitude leaves the block. Pinned slots carry phi = pi, which makes a
/// reflection act as the identity on its pair; the embedded block then
/// reproduces the inner unitary exactly.
#[derive(Debug, Clone)]
pub struct EmbeddedMesh {
    layout: MeshLayout,
    inner_modes: usize,
    /// inner slot -> outer slot
    map: Vec<usize>,
}

pub const PINNED_THETA: f64 = FRAC_PI_2;
pub const PINNED_PHI: f64 = PI;

/// Column index of each gate when the sequence is packed greedily into
/// layers of disjoint mode pairs; reordering within a layer commutes, so
/// two circuits with equal (layer, mode) slots compose identically.
fn greedy_layers(mode_seq: &[usize], modes: usize) -> Vec<usize> {
    let mut next_free = vec![0usize; modes.max(2)];
    mode_seq
        .iter()
        .map(|&j| {
            let layer = next_free[j].max(next_free[j + 1]);
            next_free[j] = layer + 1;
            next_free[j + 1] = layer + 1;
            layer
        })
        .collect()
}

pub fn embed_isolated(inner: &MeshLayout, outer_modes: usize) -> Result<EmbeddedMesh> {
    let m = inner.modes();
    if m > outer_modes {
        return Err(Error::Embedding {
            inner: m,
            outer: outer_modes,
        });
    }
    let outer = MeshLayout::new(outer_modes);

    // match slots by their (layer, mode) position; the block slots of the
    // outer mesh cover the inner rectangle, and the leftover block slots
    // end up pinned to the identity, which commutes with everything
    let inner_app: Vec<usize> = inner.application_order().collect();
    let inner_modes_seq: Vec<usize> = inner_app.iter().map(|&s| inner.slots[s].0).collect();
    let inner_layers = greedy_layers(&inner_modes_seq, m);

    let block_app: Vec<usize> = outer
        .application_order()
        .filter(|&s| outer.slots[s].0 + 2 <= m)
        .collect();
    let block_modes_seq: Vec<usize> = block_app.iter().map(|&s| outer.slots[s].0).collect();
    let block_layers = greedy_layers(&block_modes_seq, m);

    let mut map = vec![0usize; inner.mzi_count()];
    for (pos, &inner_slot) in inner_app.iter().enumerate() {
        let coord = (inner_layers[pos], inner_modes_seq[pos]);
        let found = block_app
            .iter()
            .enumerate()
            .find(|&(bpos, _)| (block_layers[bpos], block_modes_seq[bpos]) == coord)
            .map(|(_, &outer_slot)| outer_slot)
            .ok_or(Error::Embedding {
                inner: m,
                outer: outer_modes,
            })?;
        map[inner_slot] = found;
    }

    Ok(EmbeddedMesh {
        layout: outer,
        inner_modes: m,
        map,
    })
}

impl EmbeddedMesh {
    pub fn layout(&self) -> &MeshLayout {
        &self.layout
    }

    pub fn inner_modes(&self) -> usize {
        self.inner_modes
    }

    /// Outer slot carrying the given inner slot's phases.
    pub fn outer_slot(&self, inner_slot: usize) -> usize {
        self.map[inner_slot]
    }

    /// Lift an inner phase configuration onto the full mesh; every slot not
    /// mapped from the inner mesh is pinned at (pi/2, pi).
    pub fn expand_phases(&self, inner_cfg: &PhaseConfig) -> Result<PhaseConfig> {
        if inner_cfg.len() != self.map.len() {
            return Err(Error::PhaseCount {
                expected: self.map.len(),
                got: inner_cfg.len(),
            });
        }
        let l = self.layout.mzi_count();
        let mut thetas = vec![PINNED_THETA; l];
        let mut phis = vec![PINNED_PHI; l];
        for (inner_slot, &outer_slot) in self.map.iter().enumerate() {
            thetas[outer_slot] = inner_cfg.thetas()[inner_slot];
            phis[outer_slot] = inner_cfg.phis()[inner_slot];
        }
        PhaseConfig::new(thetas, phis)
    }
}

/// Uniform random phases, reproducible from the seed: theta on [0, pi/2),
/// then phi on [0, 2pi), drawn slot by slot.
pub fn random_phases(layout: &MeshLayout, seed: u64) -> PhaseConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = layout.mzi_count();
    let thetas = (0..l).map(|_| rng.random_range(0.0..FRAC_PI_2)).collect();
    let phis = (0..l).map(|_| rng.random_range(0.0..TAU)).collect();
    PhaseConfig::new(thetas, phis).expect("draws are in range")
}
