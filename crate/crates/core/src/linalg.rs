//! Dense complex-matrix helpers: unitarity checks, random unitaries, JSON I/O.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Max-norm tolerance below which a matrix counts as unitary.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Max-norm of `U^H U - I`.
pub fn unitarity_defect(u: &Array2<Complex64>) -> f64 {
    let m = u.nrows();
    let mut worst = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            // (U^H U)[i][j] = sum_k conj(U[k][i]) U[k][j]
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..m {
                acc += u[[k, i]].conj() * u[[k, j]];
            }
            if i == j {
                acc -= Complex64::new(1.0, 0.0);
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

/// A square complex matrix verified unitary on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(Array2<Complex64>);

impl UnitaryMatrix {
    pub fn new(matrix: Array2<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension {
                what: "unitary matrix",
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let defect = unitarity_defect(&matrix);
        if defect > UNITARITY_TOL {
            return Err(Error::NotUnitary {
                defect,
                tolerance: UNITARITY_TOL,
            });
        }
        Ok(Self(matrix))
    }

    pub fn modes(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.0
    }

    pub fn column(&self, k: usize) -> Array1<Complex64> {
        self.0.column(k).to_owned()
    }

    pub fn into_inner(self) -> Array2<Complex64> {
        self.0
    }
}

/// `|Tr(A^H B)| / M`, equal to 1 iff A and B agree up to a global phase.
pub fn trace_fidelity(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    let m = a.nrows();
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..m {
        for k in 0..m {
            tr += a[[k, i]].conj() * b[[k, i]];
        }
    }
    tr.norm() / m as f64
}

/// Random unitary from Gram-Schmidt orthonormalization of a complex
/// Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Array2<Complex64> {
    let mut z = Array2::zeros((m, m));
    for i in 0..m {
        for j in 0..m {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            z[[i, j]] = Complex64::new(re, im);
        }
    }

    let mut q: Array2<Complex64> = Array2::zeros((m, m));
    for i in 0..m {
        let mut v = z.column(i).to_owned();
        for j in 0..i {
            let proj: Complex64 = (0..m).map(|k| q[[k, j]].conj() * v[k]).sum();
            for k in 0..m {
                v[k] -= proj * q[[k, j]];
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for k in 0..m {
            q[[k, i]] = v[k] / norm;
        }
    }
    q
}

/// Wire form of a complex matrix: `{"m": M, "re": [[...]], "im": [[...]]}`,
/// row-major.
#[derive(Serialize, Deserialize)]
pub struct MatrixJson {
    pub m: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(u: &Array2<Complex64>) -> Self {
        let m = u.nrows();
        let re = (0..m)
            .map(|i| (0..m).map(|j| u[[i, j]].re).collect())
            .collect();
        let im = (0..m)
            .map(|i| (0..m).map(|j| u[[i, j]].im).collect())
            .collect();
        Self { m, re, im }
    }

    pub fn to_matrix(&self) -> Result<Array2<Complex64>> {
        let m = self.m;
        let rows_ok = self.re.len() == m
            && self.im.len() == m
            && self.re.iter().all(|r| r.len() == m)
            && self.im.iter().all(|r| r.len() == m);
        if !rows_ok {
            return Err(Error::Dimension {
                what: "matrix JSON",
                expected: m,
                got: self.re.len().min(self.im.len()),
            });
        }
        let mut u = Array2::zeros((m, m));
        for i in 0..m {
            for j in 0..m {
                u[[i, j]] = Complex64::new(self.re[i][j], self.im[i][j]);
            }
        }
        Ok(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_has_zero_defect() {
        let eye: Array2<Complex64> = Array2::eye(4);
        assert_eq!(unitarity_defect(&eye), 0.0);
        assert!(UnitaryMatrix::new(eye).is_ok());
    }

    #[test]
    fn scaled_identity_rejected() {
        let m: Array2<Complex64> = Array2::eye(3) * Complex64::new(1.5, 0.0);
        match UnitaryMatrix::new(m) {
            Err(Error::NotUnitary { .. }) => {}
            other => panic!("expected NotUnitary, got {other:?}"),
        }
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for m in [1, 2, 3, 4, 6] {
            let u = random_unitary(m, &mut rng);
            assert!(unitarity_defect(&u) < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn trace_fidelity_detects_global_phase_equality() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random_unitary(4, &mut rng);
        let phased = u.mapv(|x| x * Complex64::from_polar(1.0, 0.7));
        assert!((trace_fidelity(&u, &phased) - 1.0).abs() < 1e-12);
        let v = random_unitary(4, &mut rng);
        assert!(trace_fidelity(&u, &v) < 1.0 - 1e-3);
    }

    #[test]
    fn matrix_json_round_trip() {
        let u = array![
            [Complex64::new(0.0, 1.0), Complex64::new(0.5, -0.25)],
            [Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.125)],
        ];
        let text = serde_json::to_string(&MatrixJson::from_matrix(&u)).unwrap();
        let parsed: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.to_matrix().unwrap(), u);
    }
}
