//! Lower and upper bounds for the numerical radius, bounds for sums,
//! products and commutators, and the chain verifier that checks every bound
//! against a computed `v(a)`.
//!
//! Each bound is a [`BoundValue`] compared against `v^power` of its target
//! element: lower bounds must not exceed it, upper bounds must not fall below.

use std::cell::OnceCell;
use std::cmp::Ordering;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{hermitian_norm, spectral_norm, AbsSpectra, ComplexMatrix, C64, I};
use crate::numrange::{numerical_radius, CartesianPencil, DEFAULT_REFINE_TOL, DEFAULT_RESOLUTION};
use crate::optimize::convex_min_unit_interval;
use crate::states::alpha_beta;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_R_LIST: [u32; 3] = [1, 2, 3];
pub const DEFAULT_T_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
pub const DEFAULT_N_LIST: [u32; 4] = [1, 2, 3, 4];
/// Grid size and bracket width of the minimizations over `t in [0, 1]`.
pub const T_GRID_POINTS: usize = 65;
pub const T_REFINE_TOL: f64 = 1e-10;
/// Relative size of `|ab - ba|` below which two elements count as commuting.
pub const COMMUTING_TOL: f64 = 1e-10;
/// Entrywise tolerance for the self-adjointness precondition.
pub const SELF_ADJOINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Parameters a bound was evaluated at.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<Sign>,
}

impl BoundParams {
    pub fn r(r: u32) -> Self {
        Self {
            r: Some(r),
            ..Self::default()
        }
    }

    pub fn t(t: f64) -> Self {
        Self {
            t: Some(t),
            ..Self::default()
        }
    }

    pub fn n(n: u32) -> Self {
        Self {
            n: Some(n),
            ..Self::default()
        }
    }

    pub fn rt(r: u32, t: f64) -> Self {
        Self {
            r: Some(r),
            t: Some(t),
            ..Self::default()
        }
    }

    fn order(&self, other: &Self) -> Ordering {
        let t_cmp = match (self.t, other.t) {
            (Some(a), Some(b)) => a.total_cmp(&b),
            (a, b) => a.is_some().cmp(&b.is_some()),
        };
        self.r
            .cmp(&other.r)
            .then(self.n.cmp(&other.n))
            .then(t_cmp)
            .then(self.sign.cmp(&other.sign))
    }

    /// `r=2;t=0.5`, or empty.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if let Some(r) = self.r {
            parts.push(format!("r={r}"));
        }
        if let Some(t) = self.t {
            parts.push(format!("t={t}"));
        }
        if let Some(n) = self.n {
            parts.push(format!("n={n}"));
        }
        if let Some(s) = self.sign {
            parts.push(format!("sign={}", s.symbol()));
        }
        parts.join(";")
    }
}

/// One side of a named inequality, evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub id: String,
    pub side: Side,
    pub params: BoundParams,
    pub value: f64,
    /// The bound is compared against `v^power` of its target element.
    pub power: u32,
    pub anchor: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl BoundValue {
    fn new(id: &str, params: BoundParams, value: f64, power: u32) -> Self {
        let info = bound_info(id).unwrap_or_else(|| panic!("unregistered bound id {id}"));
        Self {
            id: id.to_string(),
            side: info.side,
            params,
            value,
            power,
            anchor: info.statement.to_string(),
            detail: None,
        }
    }

    fn with_detail(mut self, detail: String) -> Self {
        self.detail = Some(detail);
        self
    }

    /// Compares against the radius `v` of the target element.
    pub fn check(&self, v: f64, tol: f64) -> BoundCheck {
        let target = v.powi(self.power as i32);
        let (slack, rhs) = match self.side {
            Side::Lower => (target - self.value, target),
            Side::Upper => (self.value - target, self.value),
        };
        let band = tol * (1.0 + rhs.abs());
        BoundCheck {
            bound: self.clone(),
            target,
            slack,
            equality: slack.abs() <= band,
            violation: slack < -band || slack.is_nan(),
        }
    }
}

fn sort_bounds(bounds: &mut [BoundValue]) {
    bounds.sort_by(|a, b| a.id.cmp(&b.id).then_with(|| a.params.order(&b.params)));
}

/// A bound next to the quantity it is compared with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    #[serde(flatten)]
    pub bound: BoundValue,
    /// `v^power` of the target element.
    pub target: f64,
    /// `target - value` for lower bounds, `value - target` for upper bounds.
    pub slack: f64,
    pub equality: bool,
    pub violation: bool,
}

/// Registry entry of a bound family.
#[derive(Debug, Clone, Copy)]
pub struct BoundInfo {
    pub id: &'static str,
    pub side: Side,
    /// Whether [`verify_chain`] evaluates it for a single element.
    pub in_chain: bool,
    pub statement: &'static str,
}

macro_rules! bound_table {
    ($($id:literal, $side:ident, $chain:literal, $stmt:literal;)*) => {
        pub const BOUND_REGISTRY: &[BoundInfo] = &[
            $(BoundInfo { id: $id, side: Side::$side, in_chain: $chain, statement: $stmt },)*
        ];
    };
}

bound_table! {
    "BASE_HALF_NORM", Lower, true, "v >= |a|/2";
    "BASE_QUARTER_CROSS", Lower, true, "v^2 >= |a*a + aa*|/4";
    "T1E1", Lower, true, "v >= |a|/2 + ||Re a| - |Im a||/2";
    "T1E2", Lower, true, "v >= |a|/2 + ||a|/2 - |Re a||/4 + ||a|/2 - |Im a||/4";
    "T1E3", Lower, true, "v >= |a|/2 + ||Re a + Im a| - |Re a - Im a|| / (2 sqrt2)";
    "T2E1", Lower, true, "v^2 >= |a*a + aa*|/4 + ||Re a|^2 - |Im a|^2|/2";
    "T2E2", Lower, true, "v^2 >= |a*a + aa*|/4 + ||Re a + Im a|^2 - |Re a - Im a|^2|/4";
    "T2E3", Lower, true, "v^2 >= |a*a + aa*|/4 + (||Re a|^2 - |a*a + aa*|/4| + ||Im a|^2 - |a*a + aa*|/4|)/4";
    "AB_T2E1", Lower, true, "v^2 >= max(1 + alpha^2, 1 + 1/beta^2) |a|^2/4 + ||Re a|^2 - |Im a|^2|/2";
    "AB_T2E2", Lower, true, "v^2 >= max(1 + alpha^2, 1 + 1/beta^2) |a|^2/4 + ||Re a + Im a|^2 - |Re a - Im a|^2|/4";
    "AB_T2E3", Lower, true, "v^2 >= max(1 + alpha^2, 1 + 1/beta^2) |a|^2/4 + (l + m)/4";
    "UB_NORM", Upper, true, "v <= |a|";
    "UB_HALF_CROSS", Upper, true, "v^2 <= |a*a + aa*|/2";
    "UB_3_3_r", Upper, true, "v^r <= ||a|^r + |a*|^r|/2";
    "UB_3_3_half_abs", Upper, true, "v <= ||a| + |a*||/2";
    "UB_3_3_refined", Upper, true, "v <= |a|/2 + sqrt(|a^2|)/2";
    "UB_3_5", Upper, true, "v^(2r) <= |t |a|^(2r) + (1-t) |a*|^(2r)|";
    "UB_3_5_min_t", Upper, true, "v^(2r) <= min_t |t |a|^(2r) + (1-t) |a*|^(2r)|";
    "UB_3_7_a", Upper, true, "v^2 <= t/2 v(a^2) + |t/4 |a*|^2 + (1 - 3t/4) |a|^2|";
    "UB_3_7_b", Upper, true, "v^2 <= t/2 v(a^2) + |t/4 |a|^2 + (1 - 3t/4) |a*|^2|";
    "UB_3_7_t1", Upper, true, "v^2 <= v(a^2)/2 + |a*a + aa*|/4";
    "UB_3_9_a", Upper, true, "v^2 <= |t ((|a| + |a*|)/2)^2 + (1-t) |a|^2|";
    "UB_3_9_b", Upper, true, "v^2 <= |t ((|a| + |a*|)/2)^2 + (1-t) |a*|^2|";
    "UB_3_9_a_min_t", Upper, true, "v^2 <= min_t |t ((|a| + |a*|)/2)^2 + (1-t) |a|^2|";
    "UB_3_9_b_min_t", Upper, true, "v^2 <= min_t |t ((|a| + |a*|)/2)^2 + (1-t) |a*|^2|";
    "UB_3_9_t1_re", Upper, true, "v^2 <= |Re(|a||a*|)|/2 + |a*a + aa*|/4";
    "UB_3_9_t1_v", Upper, true, "v^2 <= v(|a||a*|)/2 + |a*a + aa*|/4";
    "UB_3_11", Upper, true, "v^2 <= v^2(|a| + i|a*|)/4 + v(|a||a*|)/4 + ||a|^2 + |a*|^2|/8";
    "UB_3_13", Upper, true, "v <= sqrt(|t|a| + (1-t)|a*|| |a|)";
    "UB_3_13_min_t", Upper, true, "v <= min_t sqrt(|t|a| + (1-t)|a*|| |a|)";
    "UB_4_2_n1", Upper, true, "v^(2r) <= |Re(|a|^r |a*|^r)|/2 + ||a|^(2r) + |a*|^(2r)|/4";
    "UB_4_5_n1", Upper, true, "v <= v(|a| + i|a*|)/sqrt2";
    "REV_3_14", Upper, true, "v^n <= v(a^n)/2^(n-1) + sum_{k<n} |a^k| |a|^(n-k)/2^k";
    "SUM_4_2", Upper, true, "v^(2r)(sum a_k) <= n^(2r-1)/2 (|sum Re(|a_k|^r |a_k*|^r)| + |sum |a_k|^(2r) + |a_k*|^(2r)|/2)";
    "PROD_4_3", Upper, false, "v^r(sum a_k* x_k b_k) <= n^(r-1)/sqrt2 v(sum (b_k*|x_k|b_k)^r + i (a_k*|x_k*|a_k)^r)";
    "PROD_4_4", Upper, false, "v^r(sum a_k b_k) <= n^(r-1)/sqrt2 v(sum |b_k|^(2r) + i |a_k*|^(2r))";
    "PROD_4_5", Upper, false, "v^r(sum a_k) <= n^(r-1)/sqrt2 v(sum |a_k|^r + i |a_k*|^r)";
    "TWO_SUM_4_6", Upper, false, "v^2(a + b) <= min(|a*a + b*b|, |a*a + bb*|) + min(v(ba), v(b*a)) + |a||b|";
    "TWO_SUM_4_6_sa", Upper, false, "v^2(a + b) <= v^2(a + ib) + v(ba) + |a||b| for self-adjoint a, b";
    "COMM_4_7", Upper, false, "v(axb +- bya) <= sqrt2 min(|b| sqrt|a*a + aa*|, |a| sqrt|b*b + bb*|) max(|x|, |y|)";
    "COMM_4_7_comm", Upper, false, "v(ab) <= min(|b| sqrt|a*a + aa*|, |a| sqrt|b*b + bb*|)/sqrt2 when ab = ba";
    "COR_4_8", Upper, false, "v(ab +- ba) <= 2 sqrt2 min(|b| sqrt(v^2(a) - alpha(a)), |a| sqrt(v^2(b) - alpha(b)))";
    "COR_4_8_coarse", Upper, false, "v(ab +- ba) <= 2 sqrt2 min(|b| v(a), |a| v(b))";
    "COR_4_9", Upper, false, "v(ab) <= 2 sqrt2 min(|b| sqrt(v^2(a) - alpha(a)), |a| sqrt(v^2(b) - alpha(b)))";
    "COR_4_9_coarse", Upper, false, "v(ab) <= 2 sqrt2 min(|b| v(a), |a| v(b))";
    "COR_4_9_comm", Upper, false, "v(ab) <= sqrt2 min(|b| sqrt(v^2(a) - alpha(a)), |a| sqrt(v^2(b) - alpha(b))) when ab = ba";
    "COR_4_9_comm_coarse", Upper, false, "v(ab) <= sqrt2 min(|b| v(a), |a| v(b)) when ab = ba";
    "REM_4_10_comm", Upper, false, "v(ab) <= 2 v(a) v(b) when ab = ba";
}

pub fn bound_info(id: &str) -> Option<&'static BoundInfo> {
    BOUND_REGISTRY.iter().find(|b| b.id == id)
}

/// Validates a filter list against the registry.
pub fn check_bound_ids<S: AsRef<str>>(ids: &[S]) -> Result<()> {
    for id in ids {
        let id = id.as_ref();
        if id != "all" && bound_info(id).is_none() {
            return Err(Error::UnknownInequality(id.to_string()));
        }
    }
    Ok(())
}

/// `|Re(x)|` for an arbitrary `x`.
fn real_part_norm(x: &ComplexMatrix) -> f64 {
    hermitian_norm(&(x + &x.adjoint()).scale_real(0.5))
}

/// `min_t |t x + (1 - t) y|` with the minimizing `t`.
fn min_affine_norm(x: &ComplexMatrix, y: &ComplexMatrix) -> (f64, f64) {
    let p = convex_min_unit_interval(
        |t| hermitian_norm(&(&x.scale_real(t) + &y.scale_real(1.0 - t))),
        T_GRID_POINTS,
        T_REFINE_TOL,
    );
    (p.arg, p.value)
}

/// Quantities of one element shared by its bounds; nested radii are computed on demand.
pub struct Element<'a> {
    a: &'a ComplexMatrix,
    resolution: usize,
    pub norm: f64,
    pub re_norm: f64,
    pub im_norm: f64,
    pub re_plus_im_norm: f64,
    pub re_minus_im_norm: f64,
    /// `|a*a + aa*|`.
    pub cross_norm: f64,
    spectra: AbsSpectra,
    abs_a: ComplexMatrix,
    abs_adj: ComplexMatrix,
    v: OnceCell<f64>,
    v_powers: Vec<OnceCell<f64>>,
}

impl<'a> Element<'a> {
    pub fn new(a: &'a ComplexMatrix, resolution: usize) -> Self {
        let pencil = CartesianPencil::new(a);
        let re = pencil.real_part_at(0.0);
        let im = pencil.imag_part_at(0.0);
        let adj = a.adjoint();
        let spectra = AbsSpectra::new(a);
        let abs_a = spectra.abs_pow(1.0);
        let abs_adj = spectra.abs_adj_pow(1.0);
        Self {
            a,
            resolution,
            norm: spectral_norm(a),
            re_norm: hermitian_norm(&re),
            im_norm: hermitian_norm(&im),
            re_plus_im_norm: hermitian_norm(&(&re + &im)),
            re_minus_im_norm: hermitian_norm(&(&re - &im)),
            cross_norm: hermitian_norm(&(&(&adj * a) + &(a * &adj))),
            spectra,
            abs_a,
            abs_adj,
            v: OnceCell::new(),
            v_powers: Vec::new(),
        }
    }

    fn radius(&self, m: &ComplexMatrix) -> f64 {
        numerical_radius(m, self.resolution, DEFAULT_REFINE_TOL)
    }

    /// `v(a)`.
    pub fn v(&self) -> f64 {
        *self.v.get_or_init(|| self.radius(self.a))
    }

    /// `v(a^n)`.
    pub fn v_of_power(&mut self, n: u32) -> f64 {
        if n == 1 {
            return self.v();
        }
        let idx = n as usize;
        if self.v_powers.len() <= idx {
            self.v_powers.resize_with(idx + 1, OnceCell::new);
        }
        let a = self.a;
        let res = self.resolution;
        *self.v_powers[idx].get_or_init(|| numerical_radius(&a.pow(n), res, DEFAULT_REFINE_TOL))
    }

    pub fn lower_bounds(&self) -> Vec<BoundValue> {
        let half = self.norm / 2.0;
        let quarter = self.cross_norm / 4.0;
        let (re2, im2) = (self.re_norm.powi(2), self.im_norm.powi(2));
        let (p2, m2) = (self.re_plus_im_norm.powi(2), self.re_minus_im_norm.powi(2));
        let mut out = vec![
            BoundValue::new("BASE_HALF_NORM", BoundParams::default(), half, 1),
            BoundValue::new("BASE_QUARTER_CROSS", BoundParams::default(), quarter, 2),
            BoundValue::new(
                "T1E1",
                BoundParams::default(),
                half + (self.re_norm - self.im_norm).abs() / 2.0,
                1,
            ),
            BoundValue::new(
                "T1E2",
                BoundParams::default(),
                half + (half - self.re_norm).abs() / 4.0 + (half - self.im_norm).abs() / 4.0,
                1,
            ),
            BoundValue::new(
                "T1E3",
                BoundParams::default(),
                half + (self.re_plus_im_norm - self.re_minus_im_norm).abs() / (2.0 * SQRT_2),
                1,
            ),
        ];
        out.extend(self.squared_lower_family("T2E1", "T2E2", "T2E3", quarter, re2, im2, p2, m2));
        sort_bounds(&mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn squared_lower_family(
        &self,
        id1: &str,
        id2: &str,
        id3: &str,
        base: f64,
        re2: f64,
        im2: f64,
        p2: f64,
        m2: f64,
    ) -> Vec<BoundValue> {
        let quarter = self.cross_norm / 4.0;
        let l = (re2 - quarter).abs();
        let m = (im2 - quarter).abs();
        vec![
            BoundValue::new(
                id1,
                BoundParams::default(),
                base + (re2 - im2).abs() / 2.0,
                2,
            ),
            BoundValue::new(id2, BoundParams::default(), base + (p2 - m2).abs() / 4.0, 2),
            BoundValue::new(id3, BoundParams::default(), base + (l + m) / 4.0, 2),
        ]
    }

    /// The three squared lower bounds with base `max(1 + alpha^2, 1 + 1/beta^2) |a|^2 / 4`.
    ///
    /// The caller vouches that `a` is `(alpha, beta)`-normal.
    pub fn alpha_beta_lower_bounds_unchecked(&self, alpha: f64, beta: f64) -> Vec<BoundValue> {
        let inv_beta_sq = if beta.is_finite() {
            1.0 / (beta * beta)
        } else {
            0.0
        };
        let base = 0.25 * (1.0 + alpha * alpha).max(1.0 + inv_beta_sq) * self.norm * self.norm;
        let mut out = self.squared_lower_family(
            "AB_T2E1",
            "AB_T2E2",
            "AB_T2E3",
            base,
            self.re_norm.powi(2),
            self.im_norm.powi(2),
            self.re_plus_im_norm.powi(2),
            self.re_minus_im_norm.powi(2),
        );
        let detail = format!(
            "alpha={alpha}, beta={}",
            if beta.is_finite() {
                beta.to_string()
            } else {
                "inf".into()
            }
        );
        for b in &mut out {
            b.detail = Some(detail.clone());
        }
        out
    }

    pub fn upper_bounds(&mut self, r_list: &[u32], t_grid: &[f64]) -> Vec<BoundValue> {
        let v_sq_a = self.v_of_power(2);
        let abs_a = &self.abs_a;
        let abs_adj = &self.abs_adj;
        let gram = &self.spectra.abs_pow(2.0);
        let cogram = &self.spectra.abs_adj_pow(2.0);
        let mut out = vec![
            BoundValue::new("UB_NORM", BoundParams::default(), self.norm, 1),
            BoundValue::new(
                "UB_HALF_CROSS",
                BoundParams::default(),
                self.cross_norm / 2.0,
                2,
            ),
            BoundValue::new(
                "UB_3_3_half_abs",
                BoundParams::default(),
                hermitian_norm(&(abs_a + abs_adj)) / 2.0,
                1,
            ),
            BoundValue::new(
                "UB_3_3_refined",
                BoundParams::default(),
                self.norm / 2.0 + spectral_norm(&self.a.pow(2)).sqrt() / 2.0,
                1,
            ),
            BoundValue::new(
                "UB_3_7_t1",
                BoundParams::default(),
                v_sq_a / 2.0 + self.cross_norm / 4.0,
                2,
            ),
        ];

        for &r in r_list {
            let rf = r as f64;
            let (pa, pb) = (self.spectra.abs_pow(rf), self.spectra.abs_adj_pow(rf));
            let (qa, qb) = (
                self.spectra.abs_pow(2.0 * rf),
                self.spectra.abs_adj_pow(2.0 * rf),
            );
            out.push(BoundValue::new(
                "UB_3_3_r",
                BoundParams::r(r),
                hermitian_norm(&(&pa + &pb)) / 2.0,
                r,
            ));
            for &t in t_grid {
                let mix = &qa.scale_real(t) + &qb.scale_real(1.0 - t);
                out.push(BoundValue::new(
                    "UB_3_5",
                    BoundParams::rt(r, t),
                    hermitian_norm(&mix),
                    2 * r,
                ));
            }
            let (t_star, value) = min_affine_norm(&qa, &qb);
            out.push(BoundValue::new(
                "UB_3_5_min_t",
                BoundParams::rt(r, t_star),
                value,
                2 * r,
            ));
            let value = real_part_norm(&(&pa * &pb)) / 2.0 + hermitian_norm(&(&qa + &qb)) / 4.0;
            out.push(BoundValue::new(
                "UB_4_2_n1",
                BoundParams::r(r),
                value,
                2 * r,
            ));
        }

        let mean = (abs_a + abs_adj).scale_real(0.5);
        let mean_sq = &mean * &mean;
        for &t in t_grid {
            let a_form = &cogram.scale_real(t / 4.0) + &gram.scale_real(1.0 - 0.75 * t);
            let b_form = &gram.scale_real(t / 4.0) + &cogram.scale_real(1.0 - 0.75 * t);
            out.push(BoundValue::new(
                "UB_3_7_a",
                BoundParams::t(t),
                t / 2.0 * v_sq_a + hermitian_norm(&a_form),
                2,
            ));
            out.push(BoundValue::new(
                "UB_3_7_b",
                BoundParams::t(t),
                t / 2.0 * v_sq_a + hermitian_norm(&b_form),
                2,
            ));
            let a_form = &mean_sq.scale_real(t) + &gram.scale_real(1.0 - t);
            let b_form = &mean_sq.scale_real(t) + &cogram.scale_real(1.0 - t);
            out.push(BoundValue::new(
                "UB_3_9_a",
                BoundParams::t(t),
                hermitian_norm(&a_form),
                2,
            ));
            out.push(BoundValue::new(
                "UB_3_9_b",
                BoundParams::t(t),
                hermitian_norm(&b_form),
                2,
            ));
            let mix = &abs_a.scale_real(t) + &abs_adj.scale_real(1.0 - t);
            out.push(BoundValue::new(
                "UB_3_13",
                BoundParams::t(t),
                (hermitian_norm(&mix) * self.norm).sqrt(),
                1,
            ));
        }
        let (t_star, value) = min_affine_norm(&mean_sq, gram);
        out.push(BoundValue::new(
            "UB_3_9_a_min_t",
            BoundParams::t(t_star),
            value,
            2,
        ));
        let (t_star, value) = min_affine_norm(&mean_sq, cogram);
        out.push(BoundValue::new(
            "UB_3_9_b_min_t",
            BoundParams::t(t_star),
            value,
            2,
        ));
        let (t_star, value) = min_affine_norm(abs_a, abs_adj);
        out.push(BoundValue::new(
            "UB_3_13_min_t",
            BoundParams::t(t_star),
            (value * self.norm).sqrt(),
            1,
        ));

        let prod = abs_a * abs_adj;
        let v_prod = self.radius(&prod);
        out.push(BoundValue::new(
            "UB_3_9_t1_re",
            BoundParams::default(),
            real_part_norm(&prod) / 2.0 + self.cross_norm / 4.0,
            2,
        ));
        out.push(BoundValue::new(
            "UB_3_9_t1_v",
            BoundParams::default(),
            v_prod / 2.0 + self.cross_norm / 4.0,
            2,
        ));
        let combo = abs_a + &abs_adj.scale(I);
        let v_combo = self.radius(&combo);
        let squares = hermitian_norm(&(gram + cogram));
        out.push(BoundValue::new(
            "UB_3_11",
            BoundParams::default(),
            v_combo * v_combo / 4.0 + v_prod / 4.0 + squares / 8.0,
            2,
        ));
        out.push(BoundValue::new(
            "UB_4_5_n1",
            BoundParams::default(),
            FRAC_1_SQRT_2 * v_combo,
            1,
        ));
        sort_bounds(&mut out);
        out
    }

    /// `v(a^n)/2^(n-1) + sum_{k=1}^{n-1} |a^k| |a|^(n-k) / 2^k`.
    pub fn reverse_power_bound(&mut self, n: u32) -> BoundValue {
        assert!(n >= 1, "n must be a positive integer");
        let mut value = self.v_of_power(n) / 2f64.powi(n as i32 - 1);
        for k in 1..n {
            value += spectral_norm(&self.a.pow(k)) * self.norm.powi((n - k) as i32)
                / 2f64.powi(k as i32);
        }
        BoundValue::new("REV_3_14", BoundParams::n(n), value, n)
    }

    /// The sum bound for the single summand `a`.
    pub fn single_sum_bound(&self, r: u32) -> BoundValue {
        let rf = r as f64;
        let (pa, pb) = (self.spectra.abs_pow(rf), self.spectra.abs_adj_pow(rf));
        let (qa, qb) = (
            self.spectra.abs_pow(2.0 * rf),
            self.spectra.abs_adj_pow(2.0 * rf),
        );
        let value = 0.5 * (real_part_norm(&(&pa * &pb)) + 0.5 * hermitian_norm(&(&qa + &qb)));
        BoundValue::new(
            "SUM_4_2",
            BoundParams {
                r: Some(r),
                n: Some(1),
                ..BoundParams::default()
            },
            value,
            2 * r,
        )
    }
}

/// Lower bounds of `v(a)` or `v^2(a)` that need no extra hypothesis.
pub fn lower_bounds(a: &ComplexMatrix) -> Vec<BoundValue> {
    Element::new(a, DEFAULT_RESOLUTION).lower_bounds()
}

/// Squared lower bounds for an `(alpha, beta)`-normal `a`.
pub fn lower_bound_alpha_beta(a: &ComplexMatrix, alpha: f64, beta: f64) -> Result<Vec<BoundValue>> {
    let est = alpha_beta(a, 1e-7);
    let slack = 1e-9;
    let admissible = (0.0..=1.0).contains(&alpha)
        && beta >= 1.0
        && alpha <= est.alpha_max + slack
        && (beta.is_infinite() || beta >= est.beta_min - slack * est.beta_min);
    if !admissible {
        return Err(Error::NotAlphaBetaNormal {
            alpha,
            beta,
            alpha_max: est.alpha_max,
            beta_min: est.beta_min,
        });
    }
    Ok(Element::new(a, DEFAULT_RESOLUTION).alpha_beta_lower_bounds_unchecked(alpha, beta))
}

pub fn upper_bounds(a: &ComplexMatrix, r_list: &[u32], t_grid: &[f64]) -> Result<Vec<BoundValue>> {
    validate_lists(r_list, t_grid, &[1])?;
    Ok(Element::new(a, DEFAULT_RESOLUTION).upper_bounds(r_list, t_grid))
}

pub fn reverse_power_bound(a: &ComplexMatrix, n: u32) -> Result<BoundValue> {
    if n == 0 {
        return Err(Error::BadParam("n must be a positive integer".into()));
    }
    Ok(Element::new(a, DEFAULT_RESOLUTION).reverse_power_bound(n))
}

fn validate_lists(r_list: &[u32], t_grid: &[f64], n_list: &[u32]) -> Result<()> {
    if r_list.contains(&0) {
        return Err(Error::BadParam("r values must be positive integers".into()));
    }
    if n_list.contains(&0) {
        return Err(Error::BadParam("n values must be positive integers".into()));
    }
    if let Some(t) = t_grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::BadParam(format!("t = {t} is outside [0, 1]")));
    }
    Ok(())
}

/// Bounds for an expression built from several elements, with `v` of that expression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeBound {
    pub expression: String,
    /// `v` of the expression; each bound compares against its `power`.
    pub lhs_radius: f64,
    pub bounds: Vec<BoundValue>,
}

impl CompositeBound {
    pub fn checks(&self, tol: f64) -> Vec<BoundCheck> {
        self.bounds
            .iter()
            .map(|b| b.check(self.lhs_radius, tol))
            .collect()
    }

    pub fn bound(&self, id: &str) -> Option<&BoundValue> {
        self.bounds.iter().find(|b| b.id == id)
    }
}

fn check_dims(mats: &[&ComplexMatrix]) -> Result<usize> {
    let dim = mats
        .first()
        .map(|m| m.dim())
        .ok_or_else(|| Error::BadParam("empty input list".into()))?;
    if let Some(m) = mats.iter().find(|m| m.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: m.dim(),
        });
    }
    Ok(dim)
}

fn radius(m: &ComplexMatrix) -> f64 {
    numerical_radius(m, DEFAULT_RESOLUTION, DEFAULT_REFINE_TOL)
}

/// `v^(2r)(sum a_k) <= n^(2r-1)/2 (|sum Re(|a_k|^r |a_k*|^r)| + |sum (|a_k|^(2r) + |a_k*|^(2r))|/2)`.
pub fn sum_bound(a_list: &[ComplexMatrix], r: u32) -> Result<CompositeBound> {
    let dim = check_dims(&a_list.iter().collect::<Vec<_>>())?;
    if r == 0 {
        return Err(Error::BadParam("r must be a positive integer".into()));
    }
    let n = a_list.len();
    let rf = r as f64;
    let mut total = ComplexMatrix::zeros(dim);
    let mut re_sum = ComplexMatrix::zeros(dim);
    let mut sq_sum = ComplexMatrix::zeros(dim);
    for a in a_list {
        total = &total + a;
        let sp = AbsSpectra::new(a);
        let prod = &sp.abs_pow(rf) * &sp.abs_adj_pow(rf);
        re_sum = &re_sum + &(&prod + &prod.adjoint()).scale_real(0.5);
        sq_sum = &(&sq_sum + &sp.abs_pow(2.0 * rf)) + &sp.abs_adj_pow(2.0 * rf);
    }
    let coef = (n as f64).powi(2 * r as i32 - 1) / 2.0;
    let value = coef * (hermitian_norm(&re_sum) + 0.5 * hermitian_norm(&sq_sum));
    Ok(CompositeBound {
        expression: "sum a_k".into(),
        lhs_radius: radius(&total),
        bounds: vec![BoundValue::new(
            "SUM_4_2",
            BoundParams {
                r: Some(r),
                n: Some(n as u32),
                ..BoundParams::default()
            },
            value,
            2 * r,
        )],
    })
}

fn product_family(
    id: &str,
    expression: &str,
    a_list: &[ComplexMatrix],
    x_list: &[ComplexMatrix],
    b_list: &[ComplexMatrix],
    r: u32,
) -> Result<CompositeBound> {
    if a_list.len() != x_list.len() || a_list.len() != b_list.len() {
        return Err(Error::BadParam(format!(
            "list lengths differ: {} a, {} x, {} b",
            a_list.len(),
            x_list.len(),
            b_list.len()
        )));
    }
    let all: Vec<&ComplexMatrix> = a_list.iter().chain(x_list).chain(b_list).collect();
    let dim = check_dims(&all)?;
    if r == 0 {
        return Err(Error::BadParam("r must be a positive integer".into()));
    }
    let n = a_list.len();
    let mut total = ComplexMatrix::zeros(dim);
    let mut combo = ComplexMatrix::zeros(dim);
    for ((a, x), b) in a_list.iter().zip(x_list).zip(b_list) {
        total = &total + &(&(&a.adjoint() * x) * b);
        let sp = AbsSpectra::new(x);
        let right = (&(&b.adjoint() * &sp.abs_pow(1.0)) * b).pow(r);
        let left = (&(&a.adjoint() * &sp.abs_adj_pow(1.0)) * a).pow(r);
        combo = &(&combo + &right) + &left.scale(I);
    }
    let value = (n as f64).powi(r as i32 - 1) * FRAC_1_SQRT_2 * radius(&combo);
    Ok(CompositeBound {
        expression: expression.into(),
        lhs_radius: radius(&total),
        bounds: vec![BoundValue::new(
            id,
            BoundParams {
                r: Some(r),
                n: Some(n as u32),
                ..BoundParams::default()
            },
            value,
            r,
        )],
    })
}

/// `v^r(sum a_k* x_k b_k) <= n^(r-1)/sqrt2 v(sum (b_k*|x_k|b_k)^r + i (a_k*|x_k*|a_k)^r)`.
pub fn triple_product_bound(
    a_list: &[ComplexMatrix],
    x_list: &[ComplexMatrix],
    b_list: &[ComplexMatrix],
    r: u32,
) -> Result<CompositeBound> {
    product_family("PROD_4_3", "sum a_k* x_k b_k", a_list, x_list, b_list, r)
}

/// `v^r(sum a_k b_k) <= n^(r-1)/sqrt2 v(sum |b_k|^(2r) + i |a_k*|^(2r))`.
pub fn product_bound_unit_middle(
    a_list: &[ComplexMatrix],
    b_list: &[ComplexMatrix],
) -> Result<CompositeBound> {
    product_bound_unit_middle_r(a_list, b_list, 1)
}

pub fn product_bound_unit_middle_r(
    a_list: &[ComplexMatrix],
    b_list: &[ComplexMatrix],
    r: u32,
) -> Result<CompositeBound> {
    let adj: Vec<ComplexMatrix> = a_list.iter().map(|a| a.adjoint()).collect();
    let units: Vec<ComplexMatrix> = a_list
        .iter()
        .map(|a| ComplexMatrix::identity(a.dim()))
        .collect();
    product_family("PROD_4_4", "sum a_k b_k", &adj, &units, b_list, r)
}

/// `v^r(sum a_k) <= n^(r-1)/sqrt2 v(sum |a_k|^r + i |a_k*|^r)`.
pub fn sum_bound_cartesian(a_list: &[ComplexMatrix], r: u32) -> Result<CompositeBound> {
    let units: Vec<ComplexMatrix> = a_list
        .iter()
        .map(|a| ComplexMatrix::identity(a.dim()))
        .collect();
    product_family("PROD_4_5", "sum a_k", &units, a_list, &units, r)
}

/// `v^2(a + b) <= min(|a*a + b*b|, |a*a + bb*|) + min(v(ba), v(b*a)) + |a||b|`,
/// with the active branch of each minimum in `detail`.
pub fn two_sum_bound(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<CompositeBound> {
    check_dims(&[a, b])?;
    let (a_adj, b_adj) = (a.adjoint(), b.adjoint());
    let gram_a = &a_adj * a;
    let n1 = hermitian_norm(&(&gram_a + &(&b_adj * b)));
    let n2 = hermitian_norm(&(&gram_a + &(b * &b_adj)));
    let r1 = radius(&(b * a));
    let r2 = radius(&(&b_adj * a));
    let (norm_term, norm_branch) = if n1 <= n2 {
        (n1, "a*a+b*b")
    } else {
        (n2, "a*a+bb*")
    };
    let (rad_term, rad_branch) = if r1 <= r2 {
        (r1, "v(ba)")
    } else {
        (r2, "v(b*a)")
    };
    let value = norm_term + rad_term + spectral_norm(a) * spectral_norm(b);
    Ok(CompositeBound {
        expression: "a + b".into(),
        lhs_radius: radius(&(a + b)),
        bounds: vec![
            BoundValue::new("TWO_SUM_4_6", BoundParams::default(), value, 2)
                .with_detail(format!("norm={norm_branch}, radius={rad_branch}")),
        ],
    })
}

/// `v^2(a + b) <= v^2(a + ib) + v(ba) + |a||b|` for self-adjoint `a`, `b`.
pub fn two_sum_bound_self_adjoint(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<CompositeBound> {
    check_dims(&[a, b])?;
    for m in [a, b] {
        if m.hermitian_defect() > SELF_ADJOINT_TOL * m.max_abs().max(1.0) {
            return Err(Error::NotSelfAdjoint);
        }
    }
    let v_mix = radius(&(a + &b.scale(I)));
    let value = v_mix * v_mix + radius(&(b * a)) + spectral_norm(a) * spectral_norm(b);
    Ok(CompositeBound {
        expression: "a + b".into(),
        lhs_radius: radius(&(a + b)),
        bounds: vec![BoundValue::new(
            "TWO_SUM_4_6_sa",
            BoundParams::default(),
            value,
            2,
        )],
    })
}

/// `min(|b| sqrt|a*a + aa*|, |a| sqrt|b*b + bb*|)`.
fn cross_min(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let cross = |m: &ComplexMatrix| {
        let adj = m.adjoint();
        hermitian_norm(&(&(&adj * m) + &(m * &adj)))
    };
    (spectral_norm(b) * cross(a).sqrt()).min(spectral_norm(a) * cross(b).sqrt())
}

/// `(min(|b| sqrt(v^2(a) - alpha(a)), |a| sqrt(v^2(b) - alpha(b))), min(|b| v(a), |a| v(b)))`
/// with `alpha(a) = ||Re a|^2 - |Im a|^2| / 2`.
fn radius_min_terms(a: &ComplexMatrix, b: &ComplexMatrix) -> (f64, f64) {
    let part = |m: &ComplexMatrix| {
        let el = Element::new(m, DEFAULT_RESOLUTION);
        let alpha = (el.re_norm.powi(2) - el.im_norm.powi(2)).abs() / 2.0;
        let v = el.v();
        ((v * v - alpha).max(0.0).sqrt(), v, el.norm)
    };
    let (ra, va, na) = part(a);
    let (rb, vb, nb) = part(b);
    ((nb * ra).min(na * rb), (nb * va).min(na * vb))
}

/// `v(axb +- bya) <= sqrt2 min(|b| sqrt|a*a + aa*|, |a| sqrt|b*b + bb*|) max(|x|, |y|)`.
pub fn commutator_bound(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    x: &ComplexMatrix,
    y: &ComplexMatrix,
    sign: Sign,
) -> Result<CompositeBound> {
    check_dims(&[a, b, x, y])?;
    let expr = &(&(a * x) * b) + (&(b * y) * a).scale_real(sign.factor());
    let value = SQRT_2 * cross_min(a, b) * spectral_norm(x).max(spectral_norm(y));
    Ok(CompositeBound {
        expression: format!("axb {} bya", sign.symbol()),
        lhs_radius: radius(&expr),
        bounds: vec![BoundValue::new(
            "COMM_4_7",
            BoundParams {
                sign: Some(sign),
                ..BoundParams::default()
            },
            value,
            1,
        )],
    })
}

/// The commutator bound at `x = y = e` together with its radius-based forms.
pub fn commutator_corollaries(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    sign: Sign,
) -> Result<CompositeBound> {
    let id = ComplexMatrix::identity(a.dim());
    let mut out = commutator_bound(a, b, &id, &id, sign)?;
    out.expression = format!("ab {} ba", sign.symbol());
    let (refined, coarse) = radius_min_terms(a, b);
    let p = BoundParams {
        sign: Some(sign),
        ..BoundParams::default()
    };
    out.bounds
        .push(BoundValue::new("COR_4_8", p, 2.0 * SQRT_2 * refined, 1));
    out.bounds.push(BoundValue::new(
        "COR_4_8_coarse",
        p,
        2.0 * SQRT_2 * coarse,
        1,
    ));
    Ok(out)
}

/// Bounds for `v(ab)`: the commutator bound at `x = e`, `y = 0` and its radius-based forms.
pub fn product_bounds(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<CompositeBound> {
    let dim = check_dims(&[a, b])?;
    let mut out = commutator_bound(
        a,
        b,
        &ComplexMatrix::identity(dim),
        &ComplexMatrix::zeros(dim),
        Sign::Plus,
    )?;
    out.expression = "ab".into();
    out.bounds[0].params = BoundParams::default();
    out.bounds[0].detail = Some("x=e, y=0".into());
    let (refined, coarse) = radius_min_terms(a, b);
    out.bounds.push(BoundValue::new(
        "COR_4_9",
        BoundParams::default(),
        2.0 * SQRT_2 * refined,
        1,
    ));
    out.bounds.push(BoundValue::new(
        "COR_4_9_coarse",
        BoundParams::default(),
        2.0 * SQRT_2 * coarse,
        1,
    ));
    Ok(out)
}

/// Sharper bounds for `v(ab)` when `ab = ba`.
pub fn commuting_product_bounds(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<CompositeBound> {
    check_dims(&[a, b])?;
    let ab = a * b;
    let defect = spectral_norm(&(&ab - &(b * a)));
    if defect > COMMUTING_TOL * spectral_norm(a) * spectral_norm(b) {
        return Err(Error::NotCommuting(defect));
    }
    let (refined, coarse) = radius_min_terms(a, b);
    let (va, vb) = (radius(a), radius(b));
    Ok(CompositeBound {
        expression: "ab".into(),
        lhs_radius: radius(&ab),
        bounds: vec![
            BoundValue::new(
                "COMM_4_7_comm",
                BoundParams::default(),
                FRAC_1_SQRT_2 * cross_min(a, b),
                1,
            ),
            BoundValue::new("COR_4_9_comm", BoundParams::default(), SQRT_2 * refined, 1),
            BoundValue::new(
                "COR_4_9_comm_coarse",
                BoundParams::default(),
                SQRT_2 * coarse,
                1,
            ),
            BoundValue::new("REM_4_10_comm", BoundParams::default(), 2.0 * va * vb, 1),
        ],
    })
}

/// What [`verify_chain`] evaluates and how strictly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainConfig {
    pub tol: f64,
    pub resolution: usize,
    pub r_list: Vec<u32>,
    pub t_grid: Vec<f64>,
    pub n_list: Vec<u32>,
    /// Bound ids to keep; `None` keeps all.
    pub filter: Option<Vec<String>>,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            resolution: DEFAULT_RESOLUTION,
            r_list: DEFAULT_R_LIST.to_vec(),
            t_grid: DEFAULT_T_GRID.to_vec(),
            n_list: DEFAULT_N_LIST.to_vec(),
            filter: None,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::BadParam(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.resolution < crate::numrange::MIN_RESOLUTION {
            return Err(Error::BadParam(format!(
                "resolution must be at least {}, got {}",
                crate::numrange::MIN_RESOLUTION,
                self.resolution
            )));
        }
        validate_lists(&self.r_list, &self.t_grid, &self.n_list)?;
        if let Some(ids) = &self.filter {
            check_bound_ids(ids)?;
        }
        Ok(())
    }

    fn keeps(&self, id: &str) -> bool {
        match &self.filter {
            None => true,
            Some(ids) => ids.iter().any(|f| f == "all" || f == id),
        }
    }
}

/// Every single-element bound checked against `v(a)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub v: f64,
    pub norm: f64,
    pub lowers: Vec<BoundCheck>,
    pub uppers: Vec<BoundCheck>,
    /// Checks whose slack is below `-tol (1 + |rhs|)`.
    pub violations: Vec<BoundCheck>,
    /// Ids (with parameters) whose slack is within the tolerance band.
    pub equalities: Vec<String>,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn checks(&self) -> impl Iterator<Item = &BoundCheck> {
        self.lowers.iter().chain(&self.uppers)
    }

    pub fn find(&self, id: &str) -> Vec<&BoundCheck> {
        self.checks().filter(|c| c.bound.id == id).collect()
    }

    /// One row per bound.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,params,side,power,value,target,slack,equality,violation\n");
        for c in self.checks() {
            writeln!(
                out,
                "{},{},{},{},{:.16e},{:.16e},{:.16e},{},{}",
                c.bound.id,
                c.bound.params.label(),
                match c.bound.side {
                    Side::Lower => "lower",
                    Side::Upper => "upper",
                },
                c.bound.power,
                c.bound.value,
                c.target,
                c.slack,
                c.equality,
                c.violation
            )
            .expect("writing to a String");
        }
        out
    }
}

fn equality_label(c: &BoundCheck) -> String {
    let params = c.bound.params.label();
    if params.is_empty() {
        c.bound.id.clone()
    } else {
        format!("{}[{}]", c.bound.id, params)
    }
}

/// Evaluates the single-element catalogue against `v(a)`.
pub fn verify_chain(a: &ComplexMatrix, config: &ChainConfig) -> Result<ChainReport> {
    config.validate()?;
    let mut el = Element::new(a, config.resolution);
    let v = el.v();

    let mut lowers = el.lower_bounds();
    let ab = alpha_beta(a, 1e-7);
    lowers.extend(el.alpha_beta_lower_bounds_unchecked(ab.alpha_max, ab.beta_min));

    let mut uppers = el.upper_bounds(&config.r_list, &config.t_grid);
    for &n in &config.n_list {
        uppers.push(el.reverse_power_bound(n));
    }
    for &r in &config.r_list {
        uppers.push(el.single_sum_bound(r));
    }

    lowers.retain(|b| config.keeps(&b.id));
    uppers.retain(|b| config.keeps(&b.id));
    sort_bounds(&mut lowers);
    sort_bounds(&mut uppers);
    let lowers: Vec<BoundCheck> = lowers.iter().map(|b| b.check(v, config.tol)).collect();
    let uppers: Vec<BoundCheck> = uppers.iter().map(|b| b.check(v, config.tol)).collect();
    let violations = lowers
        .iter()
        .chain(&uppers)
        .filter(|c| c.violation)
        .cloned()
        .collect();
    let equalities = lowers
        .iter()
        .chain(&uppers)
        .filter(|c| c.equality)
        .map(equality_label)
        .collect();
    Ok(ChainReport {
        v,
        norm: el.norm,
        lowers,
        uppers,
        violations,
        equalities,
    })
}

/// Scalar helper used by callers that already hold `f(a)` values.
pub fn complex_modulus_power(z: C64, p: u32) -> f64 {
    z.norm().powi(p as i32)
}
