//! States on `M_n(C)`: vector states `a -> <a xi, xi>` and density states
//! `a -> tr(rho a)`, plus state-level inequality checks and the
//! `(alpha, beta)`-normality estimate.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::genlab::rng::CounterRng;
use crate::matcore::{
    herm_eigenvalues, psd_power, trusted_eig, trusted_eigenvalues, AbsSpectra, ComplexMatrix, C64,
    I, ZERO,
};

/// Tolerance for unit norm, trace one and positivity of a state.
pub const STATE_TOL: f64 = 1e-12;
/// Relative slack used by every state-level verdict.
pub const VERDICT_TOL: f64 = 1e-9;

/// `<x, y> = sum x_i conj(y_i)`.
pub fn inner(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub fn vector_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a xi, xi>`.
pub fn quadratic_form(a: &ComplexMatrix, xi: &[C64]) -> C64 {
    inner(&a.mat_vec(xi), xi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Vector,
    Density,
}

#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Vector(Vec<C64>),
    Density(ComplexMatrix),
}

impl State {
    /// Vector state of a unit vector.
    pub fn vector(xi: Vec<C64>) -> Result<Self> {
        if xi.is_empty() {
            return Err(Error::InvalidState("empty vector".into()));
        }
        if xi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite vector entry".into()));
        }
        let norm = vector_norm(&xi);
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("vector norm {norm} is not 1")));
        }
        Ok(Self::Vector(xi))
    }

    /// Vector state of `x / |x|`.
    pub fn from_unnormalized(x: &[C64]) -> Result<Self> {
        let norm = vector_norm(x);
        if norm.is_nan() || norm <= 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        Self::vector(x.iter().map(|z| z / norm).collect())
    }

    /// Density state; `rho` must be Hermitian, PSD and of unit trace.
    pub fn density(rho: ComplexMatrix) -> Result<Self> {
        let defect = rho.hermitian_defect();
        if defect > STATE_TOL * rho.max_abs().max(1.0) {
            return Err(Error::InvalidState(format!(
                "density matrix is not Hermitian (defect {defect:e})"
            )));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix trace {tr} is not 1"
            )));
        }
        let min = herm_eigenvalues(&rho)?[0];
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix has eigenvalue {min:e}"
            )));
        }
        Ok(Self::Density(rho))
    }

    /// Vector state of the `k`-th standard basis vector.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut xi = vec![ZERO; dim];
        xi[k] = C64::new(1.0, 0.0);
        Self::Vector(xi)
    }

    /// `rho = I / n`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self::Density(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn kind(&self) -> StateKind {
        match self {
            Self::Vector(_) => StateKind::Vector,
            Self::Density(_) => StateKind::Density,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Vector(xi) => xi.len(),
            Self::Density(rho) => rho.dim(),
        }
    }

    /// `f(a)`.
    pub fn eval(&self, a: &ComplexMatrix) -> Result<C64> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: a.dim(),
            });
        }
        Ok(self.eval_unchecked(a))
    }

    fn eval_unchecked(&self, a: &ComplexMatrix) -> C64 {
        match self {
            Self::Vector(xi) => quadratic_form(a, xi),
            Self::Density(rho) => {
                let n = rho.dim();
                let mut acc = ZERO;
                for i in 0..n {
                    for j in 0..n {
                        acc += rho[(i, j)] * a[(j, i)];
                    }
                }
                acc
            }
        }
    }

    /// `f(p)` for PSD `p`, where the value is real.
    fn eval_real(&self, p: &ComplexMatrix) -> f64 {
        self.eval_unchecked(p).re
    }
}

/// `f(a)` for the state `f`.
pub fn eval_state(f: &State, a: &ComplexMatrix) -> Result<C64> {
    f.eval(a)
}

/// Random state: a normalized complex Gaussian vector, or `G G* / tr(G G*)`
/// for a complex Gaussian `G`. Deterministic in `seed`.
pub fn random_state(dim: usize, kind: StateKind, seed: u64) -> State {
    assert!(dim >= 1, "state dimension must be positive");
    let root = CounterRng::new(seed);
    match kind {
        StateKind::Vector => {
            let mut rng = root.split("state_vector");
            loop {
                let x: Vec<C64> = (0..dim).map(|_| rng.complex_gaussian()).collect();
                if vector_norm(&x) > 1e-300 {
                    let norm = vector_norm(&x);
                    return State::Vector(x.iter().map(|z| z / norm).collect());
                }
            }
        }
        StateKind::Density => {
            let mut rng = root.split("state_density");
            let data: Vec<C64> = (0..dim * dim).map(|_| rng.complex_gaussian()).collect();
            let g = ComplexMatrix::from_row_major(dim, data).expect("finite draws");
            let gram = (&g * &g.adjoint()).hermitian_part();
            let tr = gram.trace().re;
            State::Density(gram.scale_real(1.0 / tr))
        }
    }
}

/// Outcome of comparing `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

impl Verdict {
    /// Holds when `lhs <= rhs + 1e-9 max(1, |rhs|)`.
    pub fn compare(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            slack: rhs - lhs,
            holds: lhs <= rhs + VERDICT_TOL * rhs.abs().max(1.0),
        }
    }
}

/// Parameters of the state-level inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalParams {
    pub r: u32,
    pub t: f64,
}

impl Default for FunctionalParams {
    fn default() -> Self {
        Self { r: 1, t: 1.0 }
    }
}

/// How the matrix inputs of an inequality are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    /// A single element `a`.
    One,
    /// A pair `(a, b)`.
    Pair,
    /// Any number `n >= 1` of summands `a_1, ..., a_n`.
    Sum,
    /// `n >= 1` triples `(a_k, x_k, b_k)` flattened in order.
    Triples,
}

/// A registered state-level inequality.
#[derive(Debug, Clone, Copy)]
pub struct FunctionalIneq {
    pub id: &'static str,
    pub arity: Arity,
    pub uses_r: bool,
    pub uses_t: bool,
    pub statement: &'static str,
}

pub const FUNCTIONAL_REGISTRY: &[FunctionalIneq] = &[
    FunctionalIneq {
        id: "F_3_3",
        arity: Arity::One,
        uses_r: true,
        uses_t: false,
        statement: "|f(a)|^r <= 1/2 f(|a|^r + |a*|^r)",
    },
    FunctionalIneq {
        id: "F_3_5",
        arity: Arity::One,
        uses_r: true,
        uses_t: true,
        statement: "|f(a)|^(2r) <= f(t |a|^(2r) + (1-t) |a*|^(2r))",
    },
    FunctionalIneq {
        id: "F_3_7",
        arity: Arity::One,
        uses_r: false,
        uses_t: true,
        statement: "|f(a)|^2 <= t/2 |f(a^2)| + f((1 - 3t/4) a*a + t/4 aa*)",
    },
    FunctionalIneq {
        id: "F_3_9",
        arity: Arity::One,
        uses_r: false,
        uses_t: true,
        statement: "|f(a)|^2 <= f(t ((|a| + |a*|)/2)^2 + (1-t) |a|^2)",
    },
    FunctionalIneq {
        id: "F_3_11",
        arity: Arity::One,
        uses_r: false,
        uses_t: false,
        statement: "|f(a)|^2 <= 1/4 |f(|a| + i|a*|)|^2 + 1/4 |f(|a||a*|)| + 1/8 f(|a|^2 + |a*|^2)",
    },
    FunctionalIneq {
        id: "F_REM_3_10",
        arity: Arity::Pair,
        uses_r: false,
        uses_t: false,
        statement: "|f(ab)| <= 1/2 f(aa* + b*b)",
    },
    FunctionalIneq {
        id: "F_4_2",
        arity: Arity::Sum,
        uses_r: true,
        uses_t: false,
        statement: "|f(sum a_k)|^(2r) <= n^(2r-1)/2 f(sum (|a_k|^(2r) + |a_k*|^(2r))/2 + sum Re(|a_k|^r |a_k*|^r))",
    },
    FunctionalIneq {
        id: "F_4_3",
        arity: Arity::Triples,
        uses_r: true,
        uses_t: false,
        statement: "|f(sum a_k* x_k b_k)|^r <= n^(r-1)/sqrt2 |f(sum (b_k*|x_k|b_k)^r + i (a_k*|x_k*|a_k)^r)|",
    },
];

pub fn functional_ineq(id: &str) -> Result<&'static FunctionalIneq> {
    FUNCTIONAL_REGISTRY
        .iter()
        .find(|q| q.id == id)
        .ok_or_else(|| Error::UnknownInequality(id.to_string()))
}

/// Verdict of a state-level inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalVerdict {
    pub id: String,
    pub params: FunctionalParams,
    #[serde(flatten)]
    pub verdict: Verdict,
}

/// Evaluates both sides of inequality `id` for the state `f`.
pub fn functional_check(
    id: &str,
    inputs: &[ComplexMatrix],
    params: FunctionalParams,
    f: &State,
) -> Result<FunctionalVerdict> {
    let ineq = functional_ineq(id)?;
    validate_inputs(ineq, inputs, params, f.dim())?;
    let r = params.r;
    let t = params.t;
    let a = &inputs[0];
    let (lhs, rhs) = match ineq.id {
        "F_3_3" => {
            let sp = AbsSpectra::new(a);
            let rf = r as f64;
            let rhs = 0.5 * f.eval_real(&(&sp.abs_pow(rf) + &sp.abs_adj_pow(rf)));
            (f.eval_unchecked(a).norm().powi(r as i32), rhs)
        }
        "F_3_5" => {
            let sp = AbsSpectra::new(a);
            let e = 2.0 * r as f64;
            let mix = &sp.abs_pow(e).scale_real(t) + &sp.abs_adj_pow(e).scale_real(1.0 - t);
            (
                f.eval_unchecked(a).norm().powi(2 * r as i32),
                f.eval_real(&mix),
            )
        }
        "F_3_7" => {
            let adj = a.adjoint();
            let mix = &(&adj * a).scale_real(1.0 - 0.75 * t) + &(a * &adj).scale_real(0.25 * t);
            let rhs = 0.5 * t * f.eval_unchecked(&a.pow(2)).norm() + f.eval_real(&mix);
            (f.eval_unchecked(a).norm_sqr(), rhs)
        }
        "F_3_9" => {
            let sp = AbsSpectra::new(a);
            let abs_a = sp.abs_pow(1.0);
            let mean = (&abs_a + &sp.abs_adj_pow(1.0)).scale_real(0.5);
            let mix = &(&mean * &mean).scale_real(t) + &(&abs_a * &abs_a).scale_real(1.0 - t);
            (f.eval_unchecked(a).norm_sqr(), f.eval_real(&mix))
        }
        "F_3_11" => {
            let sp = AbsSpectra::new(a);
            let abs_a = sp.abs_pow(1.0);
            let abs_adj = sp.abs_adj_pow(1.0);
            let combo = &abs_a + &abs_adj.scale(I);
            let squares = &(&abs_a * &abs_a) + &(&abs_adj * &abs_adj);
            let rhs = 0.25 * f.eval_unchecked(&combo).norm_sqr()
                + 0.25 * f.eval_unchecked(&(&abs_a * &abs_adj)).norm()
                + 0.125 * f.eval_real(&squares);
            (f.eval_unchecked(a).norm_sqr(), rhs)
        }
        "F_REM_3_10" => {
            let b = &inputs[1];
            let sum = &(a * &a.adjoint()) + &(&b.adjoint() * b);
            (f.eval_unchecked(&(a * b)).norm(), 0.5 * f.eval_real(&sum))
        }
        "F_4_2" => {
            let n = inputs.len();
            let rf = r as f64;
            let mut total = ComplexMatrix::zeros(a.dim());
            let mut inner_sum = ComplexMatrix::zeros(a.dim());
            for ak in inputs {
                total = &total + ak;
                let sp = AbsSpectra::new(ak);
                let (pa, pb) = (sp.abs_pow(rf), sp.abs_adj_pow(rf));
                let squares = (&(&pa * &pa) + &(&pb * &pb)).scale_real(0.5);
                let prod = &pa * &pb;
                let re_prod = (&prod + &prod.adjoint()).scale_real(0.5);
                inner_sum = &(&inner_sum + &squares) + &re_prod;
            }
            let coef = (n as f64).powi(2 * r as i32 - 1) / 2.0;
            (
                f.eval_unchecked(&total).norm().powi(2 * r as i32),
                coef * f.eval_real(&inner_sum),
            )
        }
        "F_4_3" => {
            let n = inputs.len() / 3;
            let mut total = ComplexMatrix::zeros(a.dim());
            let mut combo = ComplexMatrix::zeros(a.dim());
            for triple in inputs.chunks(3) {
                let (ak, xk, bk) = (&triple[0], &triple[1], &triple[2]);
                total = &total + &(&(&ak.adjoint() * xk) * bk);
                let sp = AbsSpectra::new(xk);
                let right = (&(&bk.adjoint() * &sp.abs_pow(1.0)) * bk).pow(r);
                let left = (&(&ak.adjoint() * &sp.abs_adj_pow(1.0)) * ak).pow(r);
                combo = &(&combo + &right) + &left.scale(I);
            }
            let coef = (n as f64).powi(r as i32 - 1) * FRAC_1_SQRT_2;
            (
                f.eval_unchecked(&total).norm().powi(r as i32),
                coef * f.eval_unchecked(&combo).norm(),
            )
        }
        other => unreachable!("registered id {other} without evaluator"),
    };
    Ok(FunctionalVerdict {
        id: ineq.id.to_string(),
        params,
        verdict: Verdict::compare(lhs, rhs),
    })
}

fn validate_inputs(
    ineq: &FunctionalIneq,
    inputs: &[ComplexMatrix],
    params: FunctionalParams,
    dim: usize,
) -> Result<()> {
    let count_ok = match ineq.arity {
        Arity::One => inputs.len() == 1,
        Arity::Pair => inputs.len() == 2,
        Arity::Sum => !inputs.is_empty(),
        Arity::Triples => !inputs.is_empty() && inputs.len().is_multiple_of(3),
    };
    if !count_ok {
        return Err(Error::BadParam(format!(
            "{} expects {:?} inputs, got {}",
            ineq.id,
            ineq.arity,
            inputs.len()
        )));
    }
    if let Some(m) = inputs.iter().find(|m| m.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: m.dim(),
        });
    }
    if ineq.uses_r && params.r == 0 {
        return Err(Error::BadParam("r must be a positive integer".into()));
    }
    if ineq.uses_t && !(0.0..=1.0).contains(&params.t) {
        return Err(Error::BadParam(format!(
            "t = {} is outside [0, 1]",
            params.t
        )));
    }
    Ok(())
}

/// `|<a xi, eta>|^2 <= <|a| xi, xi> <|a*| eta, eta>` for unit `xi`, `eta`.
pub fn mixed_schwarz_check(a: &ComplexMatrix, xi: &[C64], eta: &[C64]) -> Verdict {
    let sp = AbsSpectra::new(a);
    let lhs = inner(&a.mat_vec(xi), eta).norm_sqr();
    let rhs =
        quadratic_form(&sp.abs_pow(1.0), xi).re * quadratic_form(&sp.abs_adj_pow(1.0), eta).re;
    Verdict::compare(lhs, rhs)
}

/// `<P xi, xi>^p <= <P^p xi, xi>` for PSD `P`, unit `xi` and `p >= 1`.
pub fn mccarthy_check(p_mat: &ComplexMatrix, xi: &[C64], p: f64) -> Result<Verdict> {
    if p < 1.0 {
        return Err(Error::BadParam(format!("exponent {p} must be at least 1")));
    }
    let base = quadratic_form(p_mat, xi).re.max(0.0);
    let powered = psd_power(p_mat, p)?;
    Ok(Verdict::compare(
        base.powf(p),
        quadratic_form(&powered, xi).re,
    ))
}

/// `2 |<x, z><z, y>| <= |x| |y| + |<x, y>|` for unit `z`.
pub fn buzano_check(x: &[C64], y: &[C64], z: &[C64]) -> Verdict {
    let lhs = 2.0 * (inner(x, z) * inner(z, y)).norm();
    let rhs = vector_norm(x) * vector_norm(y) + inner(x, y).norm();
    Verdict::compare(lhs, rhs)
}

/// `(sum x_k)^r <= n^(r-1) sum x_k^r` for positive `x_k`.
pub fn power_mean_check(xs: &[f64], r: u32) -> Verdict {
    assert!(!xs.is_empty() && r >= 1);
    let n = xs.len() as f64;
    let lhs = xs.iter().sum::<f64>().powi(r as i32);
    let rhs = n.powi(r as i32 - 1) * xs.iter().map(|x| x.powi(r as i32)).sum::<f64>();
    Verdict::compare(lhs, rhs)
}

/// Extreme constants with `alpha^2 a*a <= aa* <= beta^2 a*a` in the PSD order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaBetaResult {
    pub alpha_max: f64,
    /// `f64::INFINITY` when no finite `beta` exists; serialized as `null`.
    #[serde(
        serialize_with = "ser_inf_as_null",
        deserialize_with = "de_null_as_inf"
    )]
    pub beta_min: f64,
    pub normal_flag: bool,
}

fn ser_inf_as_null<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_some(x)
    } else {
        s.serialize_none()
    }
}

fn de_null_as_inf<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

/// Relative cutoff separating the support of a Gram matrix from its kernel.
const SUPPORT_CUTOFF: f64 = 1e-10;
/// Relative mass of the dominated matrix on that kernel still treated as zero.
const KERNEL_MASS_TOL: f64 = 1e-9;

/// `inf { g : g s >= t }` for PSD `s`, `t`; infinite when `t` has mass on `ker s`.
fn order_constant(s: &ComplexMatrix, t: &ComplexMatrix) -> f64 {
    let sys = trusted_eig(s);
    let n = sys.dim();
    let s_norm = sys.max_eigenvalue().max(0.0);
    let t_norm = trusted_eigenvalues(t)
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(0.0);
    let scale = s_norm.max(t_norm);
    if scale == 0.0 {
        return 0.0;
    }
    let cutoff = SUPPORT_CUTOFF * s_norm;
    let support: Vec<usize> = (0..n).filter(|&k| sys.eigenvalues[k] > cutoff).collect();
    let kernel: Vec<usize> = (0..n).filter(|&k| sys.eigenvalues[k] <= cutoff).collect();
    let restrict = |cols: &[usize], weights: Option<&[f64]>| {
        let m = cols.len();
        let mut out = ComplexMatrix::zeros(m);
        let vecs: Vec<Vec<C64>> = cols.iter().map(|&k| sys.eigenvector(k)).collect();
        let tv: Vec<Vec<C64>> = vecs.iter().map(|v| t.mat_vec(v)).collect();
        for i in 0..m {
            for j in 0..m {
                let mut z = inner(&tv[j], &vecs[i]);
                if let Some(w) = weights {
                    z *= w[i] * w[j];
                }
                out[(i, j)] = z;
            }
        }
        out.hermitian_part()
    };
    if !kernel.is_empty() {
        let on_kernel = restrict(&kernel, None);
        let top = *trusted_eigenvalues(&on_kernel).last().expect("non-empty");
        if top > KERNEL_MASS_TOL * scale {
            return f64::INFINITY;
        }
    }
    if support.is_empty() {
        return 0.0;
    }
    let weights: Vec<f64> = support
        .iter()
        .map(|&k| 1.0 / sys.eigenvalues[k].sqrt())
        .collect();
    let m = restrict(&support, Some(&weights));
    trusted_eigenvalues(&m)
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(0.0)
}

/// `(alpha, beta)`-normality constants of `a`.
///
/// `alpha_max = sup { alpha : aa* >= alpha^2 a*a }` and
/// `beta_min = inf { beta : beta^2 a*a >= aa* }`; `a = 0` gives `(1, 1)`.
pub fn alpha_beta(a: &ComplexMatrix, tol: f64) -> AlphaBetaResult {
    if a.is_zero() {
        return AlphaBetaResult {
            alpha_max: 1.0,
            beta_min: 1.0,
            normal_flag: true,
        };
    }
    let adj = a.adjoint();
    let s = (&adj * a).hermitian_part();
    let t = (a * &adj).hermitian_part();
    let beta_sq = order_constant(&s, &t);
    let inv_alpha_sq = order_constant(&t, &s);
    let beta_min = if beta_sq.is_finite() {
        beta_sq.sqrt().max(1.0)
    } else {
        f64::INFINITY
    };
    let alpha_max = if inv_alpha_sq.is_finite() && inv_alpha_sq > 0.0 {
        (1.0 / inv_alpha_sq.sqrt()).min(1.0)
    } else {
        0.0
    };
    AlphaBetaResult {
        alpha_max,
        beta_min,
        normal_flag: (alpha_max - 1.0).abs() <= tol && (beta_min - 1.0).abs() <= tol,
    }
}

// Serialization mirrors ComplexMatrix: vectors as {"re": [...], "im": [...]}.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum StateJson {
    Vector { re: Vec<f64>, im: Vec<f64> },
    Density { rho: ComplexMatrix },
}

impl Serialize for State {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let json = match self {
            Self::Vector(xi) => StateJson::Vector {
                re: xi.iter().map(|z| z.re).collect(),
                im: xi.iter().map(|z| z.im).collect(),
            },
            Self::Density(rho) => StateJson::Density { rho: rho.clone() },
        };
        json.serialize(s)
    }
}

impl<'de> Deserialize<'de> for State {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match StateJson::deserialize(d)? {
            StateJson::Vector { re, im } => {
                if re.len() != im.len() {
                    return Err(D::Error::custom("re and im lengths differ"));
                }
                let xi = re
                    .into_iter()
                    .zip(im)
                    .map(|(r, i)| C64::new(r, i))
                    .collect();
                State::vector(xi).map_err(D::Error::custom)
            }
            StateJson::Density { rho } => State::density(rho).map_err(D::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::ONE;

    fn jordan2() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]])
    }

    fn example_diag() -> ComplexMatrix {
        ComplexMatrix::from_diag(&[C64::new(-1.0, -2.0), ZERO, C64::new(1.0, 2.0)])
    }

    #[test]
    fn eval_examples() {
        let e1 = State::basis(2, 0);
        assert_eq!(e1.eval(&jordan2()).unwrap(), ZERO);
        let (abs_a, abs_adj) = crate::matcore::abs_parts(&jordan2());
        assert!((e1.eval(&(&abs_a + &abs_adj)).unwrap() - ONE).norm() < 1e-15);
        let mixed = State::maximally_mixed(3);
        assert!(mixed.eval(&example_diag()).unwrap().norm() < 1e-15);
        assert!(matches!(
            mixed.eval(&jordan2()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn states_are_unital_and_linear() {
        let a = example_diag();
        let b = ComplexMatrix::from_rows(&[
            [C64::new(0.0, 1.0), ONE, ZERO],
            [ZERO, C64::new(2.0, -1.0), C64::new(0.5, 0.5)],
            [ONE, ZERO, ZERO],
        ]);
        let z = C64::new(0.3, -1.7);
        for kind in [StateKind::Vector, StateKind::Density] {
            let f = random_state(3, kind, 11);
            assert!((f.eval(&ComplexMatrix::identity(3)).unwrap() - ONE).norm() < 1e-14);
            let lin = f.eval(&(&a + &b.scale(z))).unwrap();
            let sep = f.eval(&a).unwrap() + z * f.eval(&b).unwrap();
            assert!((lin - sep).norm() < 1e-13);
        }
    }

    #[test]
    fn random_states_are_valid_and_deterministic() {
        let one = random_state(1, StateKind::Vector, 99);
        assert!((one.eval(&ComplexMatrix::identity(1)).unwrap() - ONE).norm() < 1e-15);
        let s1 = random_state(3, StateKind::Density, 5);
        assert_eq!(s1, random_state(3, StateKind::Density, 5));
        for seed in 0..20 {
            match random_state(4, StateKind::Density, seed) {
                State::Density(rho) => {
                    assert!((rho.trace().re - 1.0).abs() < 1e-12);
                    State::density(rho).unwrap();
                }
                State::Vector(_) => unreachable!(),
            }
            match random_state(4, StateKind::Vector, seed) {
                State::Vector(xi) => assert!((vector_norm(&xi) - 1.0).abs() < 1e-12),
                State::Density(_) => unreachable!(),
            }
        }
    }

    #[test]
    fn state_validation() {
        assert!(State::vector(vec![ONE, ONE]).is_err());
        assert!(State::density(ComplexMatrix::from_real_diag(&[1.5, -0.5])).is_err());
        assert!(State::density(ComplexMatrix::from_real_diag(&[0.5, 0.25])).is_err());
        assert!(State::density(ComplexMatrix::from_real_rows(&[[0.5, 0.1], [0.0, 0.5]])).is_err());
        assert!(State::from_unnormalized(&[ZERO, ZERO]).is_err());
        let f = State::from_unnormalized(&[C64::new(3.0, 0.0), C64::new(0.0, 4.0)]).unwrap();
        assert_eq!(f.dim(), 2);
    }

    #[test]
    fn state_json_round_trip() {
        for kind in [StateKind::Vector, StateKind::Density] {
            let f = random_state(3, kind, 8);
            let text = serde_json::to_string(&f).unwrap();
            let back: State = serde_json::from_str(&text).unwrap();
            assert_eq!(back, f);
        }
        let bad = r#"{"kind":"vector","re":[1.0,1.0],"im":[0.0,0.0]}"#;
        assert!(serde_json::from_str::<State>(bad).is_err());
    }

    #[test]
    fn functional_examples() {
        let e1 = State::basis(2, 0);
        let v = functional_check("F_3_3", &[jordan2()], FunctionalParams::default(), &e1).unwrap();
        assert_eq!(v.verdict.lhs, 0.0);
        assert!((v.verdict.rhs - 0.5).abs() < 1e-15);
        assert!(v.verdict.holds);

        let id = ComplexMatrix::identity(3);
        let f = random_state(3, StateKind::Density, 1);
        let v = functional_check(
            "F_REM_3_10",
            &[id.clone(), id],
            FunctionalParams::default(),
            &f,
        )
        .unwrap();
        assert!((v.verdict.lhs - 1.0).abs() < 1e-14 && (v.verdict.rhs - 1.0).abs() < 1e-14);
        assert!(v.verdict.slack.abs() < 1e-14 && v.verdict.holds);
    }

    #[test]
    fn sum_inequality_single_diagonal_term() {
        // a = diag(-1-2i, 0, 1+2i), f = e_3: f(a) = 1+2i; |a|^2 = |a*|^2 = Re(|a||a*|) = diag(5, 0, 5).
        let f = State::basis(3, 2);
        let v =
            functional_check("F_4_2", &[example_diag()], FunctionalParams::default(), &f).unwrap();
        let lhs = C64::new(1.0, 2.0).norm_sqr();
        let rhs = 0.5 * ((5.0 + 5.0) / 2.0 + 5.0);
        assert!((v.verdict.lhs - lhs).abs() < 1e-13);
        assert!((v.verdict.rhs - rhs).abs() < 1e-13);
        assert!(v.verdict.holds);
    }

    #[test]
    fn functional_errors() {
        let f = State::basis(2, 0);
        let p = FunctionalParams::default();
        assert!(matches!(
            functional_check("F_9_9", &[jordan2()], p, &f),
            Err(Error::UnknownInequality(_))
        ));
        assert!(matches!(
            functional_check("F_3_5", &[jordan2()], FunctionalParams { r: 1, t: 1.5 }, &f),
            Err(Error::BadParam(_))
        ));
        assert!(matches!(
            functional_check("F_3_3", &[jordan2()], FunctionalParams { r: 0, t: 0.0 }, &f),
            Err(Error::BadParam(_))
        ));
        assert!(matches!(
            functional_check("F_4_3", &[jordan2()], p, &f),
            Err(Error::BadParam(_))
        ));
        assert!(matches!(
            functional_check("F_3_3", &[example_diag()], p, &f),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn triple_product_at_unit_is_tight() {
        let e = ComplexMatrix::identity(2);
        let f = State::basis(2, 1);
        let v = functional_check(
            "F_4_3",
            &[e.clone(), e.clone(), e],
            FunctionalParams::default(),
            &f,
        )
        .unwrap();
        assert!((v.verdict.lhs - 1.0).abs() < 1e-15);
        assert!((v.verdict.rhs - 1.0).abs() < 1e-15);
    }

    #[test]
    fn registry_is_complete_and_holds_on_random_draws() {
        use crate::genlab::{generate, GenKind, GenSpec};
        for (i, ineq) in FUNCTIONAL_REGISTRY.iter().enumerate() {
            for trial in 0..40u64 {
                let dim = 2 + (trial as usize % 3);
                let count = match ineq.arity {
                    Arity::One => 1,
                    Arity::Pair => 2,
                    Arity::Sum => 1 + (trial as usize % 3),
                    Arity::Triples => 3 * (1 + trial as usize % 2),
                };
                let inputs: Vec<ComplexMatrix> = (0..count)
                    .map(|k| {
                        generate(&GenSpec::new(
                            GenKind::Ginibre,
                            dim,
                            trial * 31 + k as u64 + 1000 * i as u64,
                        ))
                        .unwrap()
                    })
                    .collect();
                let kind = if trial % 2 == 0 {
                    StateKind::Vector
                } else {
                    StateKind::Density
                };
                let f = random_state(dim, kind, trial);
                let params = FunctionalParams {
                    r: 1 + (trial % 3) as u32,
                    t: (trial % 5) as f64 / 4.0,
                };
                let v = functional_check(ineq.id, &inputs, params, &f).unwrap();
                assert!(v.verdict.holds, "{} failed: {v:?}", ineq.id);
            }
        }
    }

    #[test]
    fn lemma_checks() {
        let mut rng = CounterRng::new(4);
        for _ in 0..50 {
            let a =
                ComplexMatrix::from_row_major(3, (0..9).map(|_| rng.complex_gaussian()).collect())
                    .unwrap();
            let unit = |rng: &mut CounterRng| {
                let x: Vec<C64> = (0..3).map(|_| rng.complex_gaussian()).collect();
                let n = vector_norm(&x);
                x.into_iter().map(|z| z / n).collect::<Vec<_>>()
            };
            let xi = unit(&mut rng);
            let eta = unit(&mut rng);
            assert!(mixed_schwarz_check(&a, &xi, &eta).holds);
            let p_mat = &a.adjoint() * &a;
            for p in [1.0, 2.0, 3.0, 3.5] {
                assert!(mccarthy_check(&p_mat, &xi, p).unwrap().holds);
            }
            let x: Vec<C64> = (0..3).map(|_| rng.complex_gaussian()).collect();
            let y: Vec<C64> = (0..3).map(|_| rng.complex_gaussian()).collect();
            assert!(buzano_check(&x, &y, &xi).holds);
            let xs: Vec<f64> = (0..4).map(|_| rng.uniform(0.01, 10.0)).collect();
            for r in [1, 2, 3, 5] {
                assert!(power_mean_check(&xs, r).holds);
            }
        }
        // Buzano is tight for z along x = y.
        let x = vec![ONE, ZERO];
        assert!(buzano_check(&x, &x, &x).slack.abs() < 1e-15);
    }

    #[test]
    fn alpha_beta_examples() {
        let r = alpha_beta(
            &ComplexMatrix::from_diag(&[C64::new(1.0, 1.0), C64::new(2.0, 0.0)]),
            1e-7,
        );
        assert!(
            (r.alpha_max - 1.0).abs() < 1e-12 && (r.beta_min - 1.0).abs() < 1e-12 && r.normal_flag
        );

        let r = alpha_beta(&jordan2(), 1e-7);
        assert_eq!(r.alpha_max, 0.0);
        assert!(r.beta_min.is_infinite());
        assert!(!r.normal_flag);
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"alpha_max":0.0,"beta_min":null,"normal_flag":false}"#
        );
        let back: AlphaBetaResult =
            serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert!(back.beta_min.is_infinite());

        let r = alpha_beta(&ComplexMatrix::zeros(3), 1e-7);
        assert_eq!((r.alpha_max, r.beta_min, r.normal_flag), (1.0, 1.0, true));
    }

    #[test]
    fn alpha_beta_weighted_shift() {
        // a e_1 = 2 e_2, a e_2 = e_1: a*a = diag(4, 1), aa* = diag(1, 4).
        // aa* >= alpha^2 a*a gives alpha^2 = 1/4, beta^2 = 4.
        let a = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [2.0, 0.0]]);
        let r = alpha_beta(&a, 1e-7);
        assert!((r.alpha_max - 0.5).abs() < 1e-12, "{r:?}");
        assert!((r.beta_min - 2.0).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn alpha_beta_matches_state_definition() {
        // Brute-force the defining ratio f(aa*)/f(a*a) over vector states.
        let a = ComplexMatrix::from_rows(&[
            [C64::new(1.0, 0.5), C64::new(2.0, 0.0), ZERO],
            [ZERO, C64::new(-0.5, 1.0), C64::new(1.5, 0.0)],
            [C64::new(0.3, 0.3), ZERO, C64::new(0.2, -0.7)],
        ]);
        let r = alpha_beta(&a, 1e-7);
        let s = &a.adjoint() * &a;
        let t = &a * &a.adjoint();
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for seed in 0..20_000 {
            let f = random_state(3, StateKind::Vector, seed);
            let ratio = f.eval(&t).unwrap().re / f.eval(&s).unwrap().re;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        assert!(r.alpha_max * r.alpha_max <= lo + 1e-12);
        assert!(r.beta_min * r.beta_min >= hi - 1e-12);
        // Tightness: power iteration on s^-1 t and t^-1 s.
        let beta_sq = dominant_eigenvalue(&solve(&s, &t));
        let inv_alpha_sq = dominant_eigenvalue(&solve(&t, &s));
        assert!(
            (r.beta_min * r.beta_min - beta_sq).abs() < 1e-9 * beta_sq,
            "{r:?} vs {beta_sq}"
        );
        assert!(
            (r.alpha_max * r.alpha_max - 1.0 / inv_alpha_sq).abs() < 1e-9,
            "{r:?} vs {inv_alpha_sq}"
        );
    }

    /// `m^-1 b` by Gauss-Jordan elimination with partial pivoting.
    fn solve(m: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        let n = m.dim();
        let mut a = m.clone();
        let mut x = b.clone();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
                .unwrap();
            for k in 0..n {
                let (u, v) = (a[(col, k)], a[(piv, k)]);
                a[(col, k)] = v;
                a[(piv, k)] = u;
                let (u, v) = (x[(col, k)], x[(piv, k)]);
                x[(col, k)] = v;
                x[(piv, k)] = u;
            }
            let d = a[(col, col)];
            for k in 0..n {
                a[(col, k)] /= d;
                x[(col, k)] /= d;
            }
            for i in 0..n {
                if i != col {
                    let factor = a[(i, col)];
                    for k in 0..n {
                        let (ack, xck) = (a[(col, k)], x[(col, k)]);
                        a[(i, k)] -= factor * ack;
                        x[(i, k)] -= factor * xck;
                    }
                }
            }
        }
        x
    }

    fn dominant_eigenvalue(m: &ComplexMatrix) -> f64 {
        let mut v = vec![ONE; m.dim()];
        let mut lambda = 0.0;
        for _ in 0..2000 {
            let w = m.mat_vec(&v);
            lambda = vector_norm(&w) / vector_norm(&v);
            let n = vector_norm(&w);
            v = w.into_iter().map(|z| z / n).collect();
        }
        lambda
    }
}
