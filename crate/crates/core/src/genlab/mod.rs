//! Deterministic matrix generators for the structural classes the bounds distinguish.
//!
//! Every generator is a pure function of its [`GenSpec`]: the seed keys a
//! [`CounterRng`] stream that is split by the generator kind name.

pub mod rng;

use serde::{Deserialize, Serialize};

pub use rng::CounterRng;

use crate::error::{Error, Result};
use crate::matcore::{ComplexMatrix, C64, ZERO};

/// Number of grid points used by `diagonal_sample` helpers when the caller supplies no grid.
pub const DEFAULT_GRID_POINTS: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenKind {
    Ginibre,
    Hermitian,
    Normal,
    SquareZero,
    UpperNilpotent,
    DiagonalSample,
    AlphaBetaTarget,
}

impl GenKind {
    pub const ALL: [GenKind; 7] = [
        GenKind::Ginibre,
        GenKind::Hermitian,
        GenKind::Normal,
        GenKind::SquareZero,
        GenKind::UpperNilpotent,
        GenKind::DiagonalSample,
        GenKind::AlphaBetaTarget,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GenKind::Ginibre => "ginibre",
            GenKind::Hermitian => "hermitian",
            GenKind::Normal => "normal",
            GenKind::SquareZero => "square_zero",
            GenKind::UpperNilpotent => "upper_nilpotent",
            GenKind::DiagonalSample => "diagonal_sample",
            GenKind::AlphaBetaTarget => "alpha_beta_target",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// Kind-specific generator parameters. Unused fields are omitted on the wire.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenParams {
    /// `diagonal_sample`: explicit function values `g(x_j)` as `[re, im]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<[f64; 2]>>,
    /// `diagonal_sample`: `g(x) = coef * x` evaluated on `grid`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coef: Option<[f64; 2]>,
    /// `diagonal_sample`: sample points; defaults to `dim` equispaced points on `[-1, 1]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    /// `alpha_beta_target`: target lower constant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// `alpha_beta_target`: target upper constant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

impl GenParams {
    fn is_empty(&self) -> bool {
        *self == GenParams::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    pub kind: GenKind,
    pub dim: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "GenParams::is_empty")]
    pub params: GenParams,
}

impl GenSpec {
    pub fn new(kind: GenKind, dim: usize, seed: u64) -> Self {
        Self {
            kind,
            dim,
            seed,
            params: GenParams::default(),
        }
    }

    pub fn with_params(mut self, params: GenParams) -> Self {
        self.params = params;
        self
    }

    /// `diag(coef * x_j)` over an explicit grid.
    pub fn linear_diagonal(coef: C64, grid: Vec<f64>) -> Self {
        Self {
            kind: GenKind::DiagonalSample,
            dim: grid.len(),
            seed: 0,
            params: GenParams {
                coef: Some([coef.re, coef.im]),
                grid: Some(grid),
                ..GenParams::default()
            },
        }
    }

    pub fn alpha_beta(dim: usize, seed: u64, alpha: f64, beta: f64) -> Self {
        Self {
            kind: GenKind::AlphaBetaTarget,
            dim,
            seed,
            params: GenParams {
                alpha: Some(alpha),
                beta: Some(beta),
                ..GenParams::default()
            },
        }
    }
}

/// `n` equispaced points on `[-1, 1]`, endpoints included.
pub fn equispaced_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => (0..n)
            .map(|j| {
                if j == n - 1 {
                    1.0
                } else {
                    -1.0 + 2.0 * j as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// `diag(g(x_j))` for a closure `g` sampled on `grid`.
pub fn diagonal_from_fn<F: Fn(f64) -> C64>(g: F, grid: &[f64]) -> ComplexMatrix {
    let d: Vec<C64> = grid.iter().map(|&x| g(x)).collect();
    ComplexMatrix::from_diag(&d)
}

/// Range of `beta` for which `alpha_beta_target` can hit `(alpha, beta)` exactly at dimension `dim`.
pub fn feasible_beta_range(alpha: f64, dim: usize) -> Option<(f64, f64)> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return None;
    }
    match dim {
        0 => None,
        1 => (alpha == 1.0).then_some((1.0, 1.0)),
        2 => Some((1.0 / alpha, 1.0 / alpha)),
        m => {
            let e = (m - 1) as f64;
            Some((alpha.powf(-1.0 / e), alpha.powf(-e)))
        }
    }
}

pub fn generate(spec: &GenSpec) -> Result<ComplexMatrix> {
    if spec.dim == 0 {
        return Err(Error::BadSpec("dim must be at least 1".into()));
    }
    let mut rng = CounterRng::new(spec.seed).split(spec.kind.name());
    let n = spec.dim;
    let m = match spec.kind {
        GenKind::Ginibre => ginibre(n, &mut rng),
        GenKind::Hermitian => {
            let g = ginibre(n, &mut rng);
            (&g + &g.adjoint()).scale_real(0.5)
        }
        GenKind::Normal => {
            let u = random_unitary(n, &mut rng);
            let d: Vec<C64> = (0..n).map(|_| rng.complex_gaussian()).collect();
            let ud = &u * &ComplexMatrix::from_diag(&d);
            &ud * &u.adjoint()
        }
        GenKind::SquareZero => {
            // [[0, B], [0, 0]] with a k x (n-k) block B: the range lies in the kernel.
            let k = n / 2;
            let mut a = ComplexMatrix::zeros(n);
            for i in 0..k {
                for j in k..n {
                    a[(i, j)] = rng.complex_gaussian();
                }
            }
            a
        }
        GenKind::UpperNilpotent => {
            let mut a = ComplexMatrix::zeros(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    a[(i, j)] = rng.complex_gaussian();
                }
            }
            a
        }
        GenKind::DiagonalSample => diagonal_sample(spec, &mut rng)?,
        GenKind::AlphaBetaTarget => alpha_beta_target(spec, &mut rng)?,
    };
    Ok(m)
}

fn ginibre(n: usize, rng: &mut CounterRng) -> ComplexMatrix {
    let data: Vec<C64> = (0..n * n).map(|_| rng.complex_gaussian()).collect();
    ComplexMatrix::from_row_major(n, data).expect("finite Gaussian entries")
}

/// Haar-ish unitary: Gram-Schmidt (applied twice) on the columns of a Ginibre draw.
pub fn random_unitary(n: usize, rng: &mut CounterRng) -> ComplexMatrix {
    let g = ginibre(n, rng);
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| g.column(j)).collect();
    for j in 0..n {
        for _pass in 0..2 {
            for k in 0..j {
                let proj: C64 = cols[k]
                    .iter()
                    .zip(&cols[j])
                    .map(|(q, v)| q.conj() * v)
                    .sum();
                let qk = cols[k].clone();
                for (v, q) in cols[j].iter_mut().zip(&qk) {
                    *v -= q * proj;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    let mut u = ComplexMatrix::zeros(n);
    for (j, col) in cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            u[(i, j)] = z;
        }
    }
    u
}

fn diagonal_sample(spec: &GenSpec, rng: &mut CounterRng) -> Result<ComplexMatrix> {
    let n = spec.dim;
    let p = &spec.params;
    if let Some(samples) = &p.samples {
        if samples.len() != n {
            return Err(Error::BadSpec(format!(
                "diagonal_sample has {} samples but dim {n}",
                samples.len()
            )));
        }
        let d: Vec<C64> = samples.iter().map(|s| C64::new(s[0], s[1])).collect();
        return ComplexMatrix::from_row_major(n, diag_data(&d))
            .map_err(|e| Error::BadSpec(e.to_string()));
    }
    let grid = match &p.grid {
        Some(g) if g.len() != n => {
            return Err(Error::BadSpec(format!(
                "grid has {} points but dim {n}",
                g.len()
            )))
        }
        Some(g) => g.clone(),
        None => equispaced_grid(n),
    };
    let m = match p.coef {
        Some([re, im]) => {
            let c = C64::new(re, im);
            diagonal_from_fn(|x| c * x, &grid)
        }
        None => {
            // Random quadratic c0 + c1 x + c2 x^2 sampled on the grid.
            let c: [C64; 3] = [
                rng.complex_gaussian(),
                rng.complex_gaussian(),
                rng.complex_gaussian(),
            ];
            diagonal_from_fn(|x| c[0] + c[1] * x + c[2] * x * x, &grid)
        }
    };
    if m.as_slice()
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::BadSpec("non-finite diagonal sample".into()));
    }
    Ok(m)
}

fn diag_data(d: &[C64]) -> Vec<C64> {
    let n = d.len();
    let mut data = vec![ZERO; n * n];
    for (i, &z) in d.iter().enumerate() {
        data[i * n + i] = z;
    }
    data
}

/// `V (D P) V*` where `P` is the cyclic shift and `D` a positive diagonal whose
/// consecutive ratios are `alpha`, `beta` and a common filler `c` with product one.
/// Then `A A* = V D^2 V*`, `A* A = V P* D^2 P V*`, and the extreme generalized
/// ratios of the pair are exactly `alpha^2` and `beta^2`.
fn alpha_beta_target(spec: &GenSpec, rng: &mut CounterRng) -> Result<ComplexMatrix> {
    let n = spec.dim;
    let (alpha, beta) = match (spec.params.alpha, spec.params.beta) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::BadSpec(
                "alpha_beta_target needs `alpha` and `beta`".into(),
            ))
        }
    };
    if !(alpha > 0.0 && alpha <= 1.0 && beta >= 1.0 && beta.is_finite()) {
        return Err(Error::BadSpec(format!(
            "targets must satisfy 0 < alpha <= 1 <= beta < inf, got ({alpha}, {beta})"
        )));
    }
    let (lo, hi) = feasible_beta_range(alpha, n)
        .ok_or_else(|| Error::BadSpec(format!("alpha = {alpha} is not reachable at dim {n}")))?;
    let slack = 1e-12 * hi;
    if beta < lo - slack || beta > hi + slack {
        return Err(Error::BadSpec(format!(
            "beta = {beta} outside the reachable range [{lo}, {hi}] for alpha = {alpha} at dim {n}"
        )));
    }
    let scale = 0.5 + rng.gaussian().abs();
    if n == 1 {
        let phase = rng.complex_gaussian();
        let phase = if phase.norm() > 0.0 {
            phase / phase.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        return Ok(ComplexMatrix::from_diag(&[phase * scale]));
    }

    // Diagonal ratio (A A*)_{ii} / (A* A)_{ii} = (d_i / d_{i+1})^2 = q_i^2, indices mod n.
    let mut q = vec![alpha, beta];
    if n > 2 {
        let c = (alpha * beta).powf(-1.0 / (n - 2) as f64);
        q.extend(std::iter::repeat_n(c, n - 2));
    }
    let mut d = vec![scale; n];
    for i in 0..n - 1 {
        d[i + 1] = d[i] / q[i];
    }
    let mut a0 = ComplexMatrix::zeros(n);
    for i in 0..n {
        // Row i picks coordinate i-1, so (A* A)_{i-1,i-1} = d_i^2.
        let j = (i + n - 1) % n;
        a0[(i, j)] = C64::new(d[i], 0.0);
    }
    let v = random_unitary(n, rng);
    Ok(&(&v * &a0) * &v.adjoint())
}
