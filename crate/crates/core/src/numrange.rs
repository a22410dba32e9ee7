//! Numerical radius, numerical range boundary and the equality-case classifiers.
//!
//! Everything here reduces to the Hermitian pencil
//! `Re(e^{i theta} A) = cos(theta) Re(A) - sin(theta) Im(A)`:
//! `v(A) = max_theta lambda_max(Re(e^{i theta} A))`.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{
    cartesian_parts, hermitian_norm, rotated_real_part, spectral_norm, trusted_eig,
    trusted_eigenvalues, ComplexMatrix, C64,
};
use crate::optimize::{golden_max, SearchPoint};

pub const DEFAULT_RESOLUTION: usize = 1024;
pub const MIN_RESOLUTION: usize = 64;
pub const DEFAULT_REFINE_TOL: f64 = 1e-12;
pub const DEFAULT_EQUALITY_TOL: f64 = 1e-7;
/// At most this many grid peaks are refined per maximization.
const MAX_REFINED_PEAKS: usize = 6;

/// Cartesian parts of `A`, evaluated along the unit circle.
#[derive(Debug, Clone)]
pub struct CartesianPencil {
    re: ComplexMatrix,
    im: ComplexMatrix,
}

impl CartesianPencil {
    pub fn new(a: &ComplexMatrix) -> Self {
        let (re, im) = cartesian_parts(a);
        Self { re, im }
    }

    /// `Re(e^{i theta} A)`.
    pub fn real_part_at(&self, theta: f64) -> ComplexMatrix {
        rotated_real_part(&self.re, &self.im, theta)
    }

    /// `Im(e^{i theta} A) = sin(theta) Re(A) + cos(theta) Im(A)`.
    pub fn imag_part_at(&self, theta: f64) -> ComplexMatrix {
        rotated_real_part(&self.im, &self.re.scale_real(-1.0), theta)
    }

    /// `lambda_max(Re(e^{i theta} A))`.
    pub fn top_eigenvalue(&self, theta: f64) -> f64 {
        *trusted_eigenvalues(&self.real_part_at(theta))
            .last()
            .expect("non-empty")
    }

    /// `|Re(e^{i theta} A)|`.
    pub fn real_part_norm(&self, theta: f64) -> f64 {
        hermitian_norm(&self.real_part_at(theta))
    }
}

/// Maximum of a continuous `2 pi`-periodic function: uniform grid, then
/// golden-section refinement in the two cells around each promising node.
///
/// A node is promising when it lies within the semiconvexity margin
/// `|best| * step^2 / 8` of the best node (top eigenvalue branches of the pencil
/// satisfy `h'' >= -h`), capped at [`MAX_REFINED_PEAKS`] disjoint brackets.
pub fn maximize_periodic<F: FnMut(f64) -> f64>(
    mut g: F,
    resolution: usize,
    refine_tol: f64,
) -> SearchPoint {
    assert!(resolution >= 1);
    let step = TAU / resolution as f64;
    let values: Vec<f64> = (0..resolution).map(|j| g(j as f64 * step)).collect();
    let (best_idx, &best_val) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("non-empty grid");
    let mut best = SearchPoint {
        arg: best_idx as f64 * step,
        value: best_val,
    };
    let margin = 1.01 * best_val.abs() * step * step / 8.0 + 4.0 * f64::EPSILON * best_val.abs();
    let mut candidates: Vec<usize> = (0..resolution)
        .filter(|&j| values[j] >= best_val - margin)
        .collect();
    candidates.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));

    let mut refined: Vec<usize> = Vec::new();
    for j in candidates {
        if refined.len() == MAX_REFINED_PEAKS {
            break;
        }
        let near = |k: usize| {
            let d = j.abs_diff(k);
            d.min(resolution - d) <= 1
        };
        if refined.iter().any(|&k| near(k)) {
            continue;
        }
        refined.push(j);
        let center = j as f64 * step;
        let p = golden_max(&mut g, center - step, center + step, refine_tol);
        if p.value > best.value {
            best = p;
        }
    }
    best.arg = best.arg.rem_euclid(TAU);
    best
}

/// `v(A)` together with a maximizing angle: `v = lambda_max(Re(e^{i theta} A))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    pub value: f64,
    pub theta: f64,
}

pub fn numerical_radius_estimate(
    a: &ComplexMatrix,
    resolution: usize,
    refine_tol: f64,
) -> RadiusEstimate {
    assert!(
        resolution >= MIN_RESOLUTION,
        "resolution must be at least {MIN_RESOLUTION}, got {resolution}"
    );
    if a.is_zero() {
        return RadiusEstimate {
            value: 0.0,
            theta: 0.0,
        };
    }
    let pencil = CartesianPencil::new(a);
    let p = maximize_periodic(|t| pencil.top_eigenvalue(t), resolution, refine_tol);
    RadiusEstimate {
        value: p.value.max(0.0),
        theta: p.arg,
    }
}

/// Numerical radius `v(A)`. Every returned value is an attained
/// `lambda_max(Re(e^{i theta} A))`, hence never above the true radius.
pub fn numerical_radius(a: &ComplexMatrix, resolution: usize, refine_tol: f64) -> f64 {
    numerical_radius_estimate(a, resolution, refine_tol).value
}

/// `v(A)` at the default resolution and refinement tolerance.
pub fn radius(a: &ComplexMatrix) -> f64 {
    numerical_radius(a, DEFAULT_RESOLUTION, DEFAULT_REFINE_TOL)
}

/// Both branches of `max_|lambda|=1 |Re(lambda a) +- Im(lambda a)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmRadius {
    pub plus: f64,
    pub minus: f64,
}

impl PmRadius {
    /// `(1/sqrt 2) max(plus, minus)`.
    pub fn radius(&self) -> f64 {
        FRAC_1_SQRT_2 * self.plus.max(self.minus)
    }
}

pub fn pm_formula_branches(a: &ComplexMatrix, resolution: usize, refine_tol: f64) -> PmRadius {
    assert!(
        resolution >= MIN_RESOLUTION,
        "resolution must be at least {MIN_RESOLUTION}, got {resolution}"
    );
    if a.is_zero() {
        return PmRadius {
            plus: 0.0,
            minus: 0.0,
        };
    }
    let pencil = CartesianPencil::new(a);
    let branch = |sign: f64| {
        maximize_periodic(
            |t| {
                let re = pencil.real_part_at(t);
                let im = pencil.imag_part_at(t);
                hermitian_norm(&(&re + &im.scale_real(sign)))
            },
            resolution,
            refine_tol,
        )
        .value
    };
    PmRadius {
        plus: branch(1.0),
        minus: branch(-1.0),
    }
}

/// `v(A) = (1/sqrt 2) max_|lambda|=1 |Re(lambda a) +- Im(lambda a)|`, evaluated
/// from explicit Cartesian parts of `lambda a` (independent of the pencil path).
pub fn radius_via_pm_formula(a: &ComplexMatrix, resolution: usize) -> f64 {
    pm_formula_branches(a, resolution, DEFAULT_REFINE_TOL).radius()
}

/// Support function `h(theta) = lambda_max(Re(e^{-i theta} A))` of the numerical range.
pub fn support_function(a: &ComplexMatrix, theta: f64) -> f64 {
    CartesianPencil::new(a).top_eigenvalue(-theta)
}

/// Sampled boundary of the numerical range.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RangeBoundary {
    pub thetas: Vec<f64>,
    pub support_values: Vec<f64>,
    pub points: Vec<C64>,
    /// Indices where the top eigenvalue was multiple; the point is one representative of a boundary segment.
    pub degenerate: Vec<usize>,
}

impl RangeBoundary {
    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn max_modulus(&self) -> f64 {
        self.points.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// CSV with header `theta,support,re_p,im_p`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,support,re_p,im_p\n");
        for k in 0..self.len() {
            let p = self.points[k];
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.thetas[k], self.support_values[k], p.re, p.im
            )
            .expect("writing to a String");
        }
        out
    }
}

/// Relative gap below which the top eigenvalue counts as multiple.
const DEGENERACY_TOL: f64 = 1e-10;

/// Boundary points `p(theta) = <A xi, xi>` where `xi` is a top eigenvector of
/// `Re(e^{-i theta} A)`, for `theta = 2 pi k / n_points`.
pub fn range_boundary(a: &ComplexMatrix, n_points: usize) -> Result<RangeBoundary> {
    if n_points < 8 {
        return Err(Error::BadParam(format!(
            "n_points must be at least 8, got {n_points}"
        )));
    }
    let pencil = CartesianPencil::new(a);
    let scale = spectral_norm(a).max(1.0);
    let mut out = RangeBoundary {
        thetas: Vec::with_capacity(n_points),
        support_values: Vec::with_capacity(n_points),
        points: Vec::with_capacity(n_points),
        degenerate: Vec::new(),
    };
    for k in 0..n_points {
        let theta = TAU * k as f64 / n_points as f64;
        let sys = trusted_eig(&pencil.real_part_at(-theta));
        let top = sys.dim() - 1;
        if top > 0 && sys.eigenvalues[top] - sys.eigenvalues[top - 1] <= DEGENERACY_TOL * scale {
            out.degenerate.push(k);
        }
        let xi = sys.eigenvector(top);
        let a_xi = a.mat_vec(&xi);
        let p: C64 = xi.iter().zip(&a_xi).map(|(x, y)| x.conj() * y).sum();
        out.thetas.push(theta);
        out.support_values.push(sys.eigenvalues[top]);
        out.points.push(p);
    }
    Ok(out)
}

/// Equality-case flags and their worst-angle witnesses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualityClass {
    /// `v(A) = |A| / 2`: `|Re(lambda A)| = |A|/2` for every unit `lambda`.
    pub v_equals_half_norm: bool,
    /// `v(A)^2 = |A*A + AA*| / 4`: `|Re(lambda A)|^2` constant at that value.
    pub v_sq_equals_quarter_cross: bool,
    /// `v(A) = |A|`.
    pub v_equals_norm: bool,
    pub half_norm_deviation: f64,
    pub quarter_cross_deviation: f64,
    pub norm_deviation: f64,
    /// `max_theta | |Re(lambda A) +- Im(lambda A)| - |A|/sqrt 2 |` over both signs.
    pub pm_half_norm_deviation: f64,
    /// `max_theta | |Re(lambda A) +- Im(lambda A)|^2 - |A*A + AA*|/2 |` over both signs.
    pub pm_quarter_cross_deviation: f64,
}

impl EqualityClass {
    /// Whether the `+-` characterizations agree with the primary flags at `tol`.
    pub fn pm_consistent(&self, tol: f64) -> bool {
        (self.pm_half_norm_deviation <= tol) == self.v_equals_half_norm
            && (self.pm_quarter_cross_deviation <= tol) == self.v_sq_equals_quarter_cross
    }
}

pub fn equality_class(a: &ComplexMatrix, tol: f64) -> EqualityClass {
    equality_class_at(a, tol, DEFAULT_RESOLUTION)
}

pub fn equality_class_at(a: &ComplexMatrix, tol: f64, resolution: usize) -> EqualityClass {
    assert!(tol > 0.0, "tolerance must be positive");
    let norm = spectral_norm(a);
    let cross = {
        let adj = a.adjoint();
        hermitian_norm(&(&(&adj * a) + &(a * &adj)))
    };
    let pencil = CartesianPencil::new(a);
    let mut half_dev: f64 = 0.0;
    let mut cross_dev: f64 = 0.0;
    let mut pm_half_dev: f64 = 0.0;
    let mut pm_cross_dev: f64 = 0.0;
    for j in 0..resolution {
        let theta = TAU * j as f64 / resolution as f64;
        let re = pencil.real_part_at(theta);
        let im = pencil.imag_part_at(theta);
        let r = hermitian_norm(&re);
        half_dev = half_dev.max((r - norm / 2.0).abs());
        cross_dev = cross_dev.max((r * r - cross / 4.0).abs());
        for sign in [1.0, -1.0] {
            let s = hermitian_norm(&(&re + &im.scale_real(sign)));
            pm_half_dev = pm_half_dev.max((s - norm * FRAC_1_SQRT_2).abs());
            pm_cross_dev = pm_cross_dev.max((s * s - cross / 2.0).abs());
        }
    }
    let v = numerical_radius(a, resolution.max(MIN_RESOLUTION), DEFAULT_REFINE_TOL);
    let norm_dev = (v - norm).abs();
    EqualityClass {
        v_equals_half_norm: half_dev <= tol,
        v_sq_equals_quarter_cross: cross_dev <= tol,
        v_equals_norm: norm_dev <= tol,
        half_norm_deviation: half_dev,
        quarter_cross_deviation: cross_dev,
        norm_deviation: norm_dev,
        pm_half_norm_deviation: pm_half_dev,
        pm_quarter_cross_deviation: pm_cross_dev,
    }
}
