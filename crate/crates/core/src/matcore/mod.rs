//! Complex matrix algebra and Hermitian spectral machinery.

mod eigen;
mod matrix;

pub use eigen::{
    herm_eig, herm_eigenvalues, HermitianEigenSystem, HERMITIAN_TOL, MAX_SWEEPS, OFF_DIAGONAL_TOL,
};
pub use matrix::{ComplexMatrix, C64, I, ONE, ZERO};

pub(crate) use eigen::{trusted_eig, trusted_eigenvalues};

use crate::error::{Error, Result};

/// Relative cutoff below which negative eigenvalues of a PSD matrix are treated as roundoff.
pub const PSD_CLAMP_TOL: f64 = 1e-10;

/// Operator norm `|A| = sqrt(lambda_max(A* A))`.
pub fn spectral_norm(a: &ComplexMatrix) -> f64 {
    let gram = &a.adjoint() * a;
    trusted_eigenvalues(&gram)
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(0.0)
        .sqrt()
}

/// Operator norm of a Hermitian matrix, `max |lambda|`.
pub fn hermitian_norm(h: &ComplexMatrix) -> f64 {
    let ev = trusted_eigenvalues(h);
    ev[0].abs().max(ev[ev.len() - 1].abs())
}

/// `P^p` for positive semidefinite `P` through its spectral decomposition.
///
/// Eigenvalues in `[-1e-10 |P|, 0)` are clamped to zero before powering.
pub fn psd_power(p_mat: &ComplexMatrix, p: f64) -> Result<ComplexMatrix> {
    if p.is_nan() || p <= 0.0 || !p.is_finite() {
        return Err(Error::BadParam(format!(
            "psd_power exponent must be positive, got {p}"
        )));
    }
    let sys = herm_eig(p_mat)?;
    psd_power_of(&sys, p)
}

/// Same as [`psd_power`] but reusing an existing eigensystem.
pub fn psd_power_of(sys: &HermitianEigenSystem, p: f64) -> Result<ComplexMatrix> {
    let scale = sys.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let allowed = -PSD_CLAMP_TOL * scale;
    if sys.min_eigenvalue() < allowed {
        return Err(Error::NotPsd {
            eigenvalue: sys.min_eigenvalue(),
            allowed,
        });
    }
    if scale == 0.0 {
        return Ok(ComplexMatrix::zeros(sys.dim()));
    }
    // Power the normalized spectrum, then rescale, so large exponents stay finite as long as the result does.
    let unit = sys.reconstruct_with(|l| (l.max(0.0) / scale).powf(p));
    Ok(unit.scale_real(scale.powf(p)))
}

/// Cartesian decomposition `A = Re(A) + i Im(A)` with both parts Hermitian.
pub fn cartesian_parts(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.dim();
    let mut re = ComplexMatrix::zeros(n);
    let mut im = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let aij = a[(i, j)];
            let aji = a[(j, i)].conj();
            re[(i, j)] = (aij + aji) * 0.5;
            // (a - a*) / 2i
            let d = (aij - aji) * 0.5;
            im[(i, j)] = C64::new(d.im, -d.re);
        }
    }
    (re, im)
}

/// `Re(lambda A)` for a unit scalar `lambda = e^{i theta}`, i.e. `cos(theta) Re(A) - sin(theta) Im(A)`.
pub fn rotated_real_part(re: &ComplexMatrix, im: &ComplexMatrix, theta: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    let mut out = re.scale_real(c);
    let n = re.dim();
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] -= im[(i, j)] * s;
        }
    }
    out
}

/// Spectral data of `A*A` and `A A*`, from which every `|a|^r` and `|a*|^r` is read off.
#[derive(Debug, Clone)]
pub struct AbsSpectra {
    pub gram: HermitianEigenSystem,
    pub cogram: HermitianEigenSystem,
}

impl AbsSpectra {
    pub fn new(a: &ComplexMatrix) -> Self {
        let adj = a.adjoint();
        Self {
            gram: trusted_eig(&(&adj * a)),
            cogram: trusted_eig(&(a * &adj)),
        }
    }

    /// `|a|^r = (a* a)^{r/2}`.
    pub fn abs_pow(&self, r: f64) -> ComplexMatrix {
        psd_power_of(&self.gram, r / 2.0).expect("Gram matrices are PSD")
    }

    /// `|a*|^r = (a a*)^{r/2}`.
    pub fn abs_adj_pow(&self, r: f64) -> ComplexMatrix {
        psd_power_of(&self.cogram, r / 2.0).expect("Gram matrices are PSD")
    }
}

/// `(|a|, |a*|)`.
pub fn abs_parts(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let spectra = AbsSpectra::new(a);
    (spectra.abs_pow(1.0), spectra.abs_adj_pow(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nilpotent3() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[0.0, 1.0, 0.0], [0.0, 0.0, 2.0], [0.0, 0.0, 0.0]])
    }

    fn example_diag() -> ComplexMatrix {
        ComplexMatrix::from_diag(&[C64::new(-1.0, -2.0), ZERO, C64::new(1.0, 2.0)])
    }

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn spectral_norm_examples() {
        assert!((spectral_norm(&ComplexMatrix::identity(3)) - 1.0).abs() < 1e-15);
        let a = nilpotent3();
        assert!((spectral_norm(&a) - 2.0).abs() < 1e-14);
        assert!((spectral_norm(&a.pow(2)) - 2.0).abs() < 1e-14);
        assert!((spectral_norm(&a.adjoint()) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn psd_power_examples() {
        let p = ComplexMatrix::from_real_diag(&[0.0, 1.0, 4.0]);
        let root = psd_power(&p, 0.5).unwrap();
        assert!(close(
            &root,
            &ComplexMatrix::from_real_diag(&[0.0, 1.0, 2.0]),
            1e-14
        ));
        let id = ComplexMatrix::identity(4);
        assert!(close(&psd_power(&id, 3.7).unwrap(), &id, 1e-14));
        let a = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        let abs_a = psd_power(&(&a.adjoint() * &a), 0.5).unwrap();
        assert!(close(
            &abs_a,
            &ComplexMatrix::from_real_diag(&[0.0, 1.0]),
            1e-15
        ));
    }

    #[test]
    fn psd_power_errors() {
        let neg = ComplexMatrix::from_real_diag(&[1.0, -0.5]);
        assert!(matches!(psd_power(&neg, 0.5), Err(Error::NotPsd { .. })));
        let tiny_neg = ComplexMatrix::from_real_diag(&[1.0, -1e-12]);
        let r = psd_power(&tiny_neg, 0.5).unwrap();
        assert_eq!(r[(1, 1)], ZERO);
        let not_herm = ComplexMatrix::from_real_rows(&[[1.0, 1.0], [0.0, 1.0]]);
        assert!(matches!(
            psd_power(&not_herm, 2.0),
            Err(Error::NonHermitianInput { .. })
        ));
        assert!(matches!(
            psd_power(&ComplexMatrix::identity(2), 0.0),
            Err(Error::BadParam(_))
        ));
    }

    #[test]
    fn cartesian_parts_of_example_diagonal() {
        let (re, im) = cartesian_parts(&example_diag());
        assert!(close(
            &re,
            &ComplexMatrix::from_real_diag(&[-1.0, 0.0, 1.0]),
            0.0
        ));
        assert!(close(
            &im,
            &ComplexMatrix::from_real_diag(&[-2.0, 0.0, 2.0]),
            0.0
        ));
    }

    #[test]
    fn cartesian_parts_of_hermitian_and_skew() {
        let h = ComplexMatrix::from_rows(&[
            [C64::new(1.0, 0.0), C64::new(2.0, -1.0)],
            [C64::new(2.0, 1.0), C64::new(-3.0, 0.0)],
        ]);
        let (re, im) = cartesian_parts(&h);
        assert!(close(&re, &h, 1e-15));
        assert!(im.max_abs() < 1e-15);
        let (re, im) = cartesian_parts(&h.scale(I));
        assert!(re.max_abs() < 1e-15);
        assert!(close(&im, &h, 1e-15));
    }

    #[test]
    fn abs_parts_examples() {
        let (abs_a, abs_adj) = abs_parts(&nilpotent3());
        assert!(close(
            &abs_a,
            &ComplexMatrix::from_real_diag(&[0.0, 1.0, 2.0]),
            1e-14
        ));
        assert!(close(
            &abs_adj,
            &ComplexMatrix::from_real_diag(&[1.0, 2.0, 0.0]),
            1e-14
        ));
        assert!((hermitian_norm(&(&abs_a + &abs_adj)) / 2.0 - 1.5).abs() < 1e-14);

        let c = std::f64::consts::FRAC_1_SQRT_2;
        let u = ComplexMatrix::from_rows(&[
            [C64::new(c, 0.0), C64::new(0.0, c)],
            [C64::new(0.0, c), C64::new(c, 0.0)],
        ]);
        let (abs_u, abs_u_adj) = abs_parts(&u);
        let id = ComplexMatrix::identity(2);
        assert!(close(&abs_u, &id, 1e-14) && close(&abs_u_adj, &id, 1e-14));
    }

    #[test]
    fn rotated_real_part_matches_definition() {
        let a = ComplexMatrix::from_rows(&[
            [C64::new(0.3, 1.0), C64::new(-2.0, 0.5)],
            [C64::new(0.0, 0.7), C64::new(1.0, -1.0)],
        ]);
        let (re, im) = cartesian_parts(&a);
        let theta = 0.83;
        let lambda = C64::from_polar(1.0, theta);
        let direct = cartesian_parts(&a.scale(lambda)).0;
        assert!(close(&rotated_real_part(&re, &im, theta), &direct, 1e-15));
    }
}
