//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies the classical real Jacobi rotation, so the
//! combined 2x2 unitary is `G = diag(1, e^{-i phi}) * [[c, s], [-s, c]]`.

use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Sweep limit before giving up.
pub const MAX_SWEEPS: usize = 100;
/// Relative off-diagonal Frobenius mass at which iteration stops.
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;
/// Hermitian precondition tolerance, relative to `max(1, |H|_max)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues in ascending order and the unitary matrix whose columns are
/// the matching eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Column `k` of the eigenvector matrix.
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `U diag(g(lambda)) U*`.
    pub fn reconstruct_with<F: Fn(f64) -> f64>(&self, g: F) -> ComplexMatrix {
        let n = self.dim();
        let u = &self.eigenvectors;
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| g(l)).collect();
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = ZERO;
                for (k, &w) in weights.iter().enumerate() {
                    if w != 0.0 {
                        acc += u[(i, k)] * u[(j, k)].conj() * w;
                    }
                }
                if i == j {
                    out[(i, i)] = C64::new(acc.re, 0.0);
                } else {
                    out[(i, j)] = acc;
                    out[(j, i)] = acc.conj();
                }
            }
        }
        out
    }
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn herm_eig(h: &ComplexMatrix) -> Result<HermitianEigenSystem> {
    check_hermitian(h)?;
    let (values, vectors) = jacobi(h, true)?;
    Ok(HermitianEigenSystem {
        eigenvalues: values,
        eigenvectors: vectors.expect("vectors requested"),
    })
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn herm_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    jacobi(h, false).map(|(v, _)| v)
}

/// Spectrum of a matrix the caller built Hermitian by construction
/// (e.g. via `hermitian_part`); skips the precondition scan.
pub(crate) fn trusted_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    jacobi(h, false)
        .map(|(v, _)| v)
        .unwrap_or_else(|e| panic!("eigensolver failed on a Hermitian matrix: {e}"))
}

pub(crate) fn trusted_eig(h: &ComplexMatrix) -> HermitianEigenSystem {
    let (values, vectors) =
        jacobi(h, true).unwrap_or_else(|e| panic!("eigensolver failed on a Hermitian matrix: {e}"));
    HermitianEigenSystem {
        eigenvalues: values,
        eigenvectors: vectors.expect("vectors requested"),
    }
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    let deviation = h.hermitian_defect();
    let allowed = HERMITIAN_TOL * h.max_abs().max(1.0);
    if deviation > allowed {
        return Err(Error::NonHermitianInput { deviation, allowed });
    }
    Ok(())
}

fn jacobi(h: &ComplexMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    let n = h.dim();
    let mut a: Vec<C64> = h.hermitian_part().as_slice().to_vec();
    let mut u = if want_vectors {
        let mut id = vec![ZERO; n * n];
        for i in 0..n {
            id[i * n + i] = ONE;
        }
        Some(id)
    } else {
        None
    };

    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let threshold = OFF_DIAGONAL_TOL * total;

    let off_norm = |a: &[C64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a[i * n + j].norm_sqr();
            }
        }
        s.sqrt()
    };

    let mut sweep = 0;
    while n > 1 && total > 0.0 && off_norm(&a) > threshold {
        if sweep == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps: MAX_SWEEPS,
                off_norm: off_norm(&a),
            });
        }
        sweep += 1;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                // Pivot already negligible against both diagonal entries.
                let g = 100.0 * r;
                if sweep > 4 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = ZERO;
                    a[q * n + p] = ZERO;
                    continue;
                }
                rotated = true;
                let e = apq / r;
                let e_bar = e.conj();
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let cs_bar = e_bar * c;
                let ss_bar = e_bar * s;

                // A <- A G
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c - akq * ss_bar;
                    a[k * n + q] = akp * s + akq * cs_bar;
                }
                // A <- G* A
                let ce = e * c;
                let se = e * s;
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c - aqk * se;
                    a[q * n + k] = apk * s + aqk * ce;
                }
                a[p * n + p] = C64::new(app - t * r, 0.0);
                a[q * n + q] = C64::new(aqq + t * r, 0.0);
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;

                if let Some(u) = u.as_mut() {
                    for k in 0..n {
                        let ukp = u[k * n + p];
                        let ukq = u[k * n + q];
                        u[k * n + p] = ukp * c - ukq * ss_bar;
                        u[k * n + q] = ukp * s + ukq * cs_bar;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = u.map(|u| {
        let mut sorted = vec![ZERO; n * n];
        for (new_col, &old_col) in order.iter().enumerate() {
            for k in 0..n {
                sorted[k * n + new_col] = u[k * n + old_col];
            }
        }
        ComplexMatrix::from_row_major(n, sorted).expect("finite eigenvectors")
    });
    Ok((values, vectors))
}
