//! Fuzz campaigns: generated elements are run through the bound chain and the
//! multi-element bounds, and the outcome is folded into a deterministic summary.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    check_bound_ids, commutator_bound, commutator_corollaries, commuting_product_bounds,
    product_bound_unit_middle_r, product_bounds, sum_bound, sum_bound_cartesian,
    triple_product_bound, two_sum_bound, two_sum_bound_self_adjoint, verify_chain, BoundCheck,
    BoundParams, ChainConfig, CompositeBound, Sign, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::genlab::{feasible_beta_range, generate, CounterRng, GenKind, GenParams, GenSpec};
use crate::matcore::{hermitian_norm, ComplexMatrix, C64};
use crate::numrange::{DEFAULT_EQUALITY_TOL, DEFAULT_RESOLUTION};

pub const SUMMARY_SCHEMA: u32 = 1;
pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_DIMS: [usize; 4] = [2, 3, 4, 6];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FuzzConfig {
    /// Trials per generator kind.
    pub trials: usize,
    /// Dimensions cycled over the trial index.
    pub dims: Vec<usize>,
    pub resolution: usize,
    pub tol: f64,
    pub seed: u64,
    pub filter: Option<Vec<String>>,
    pub kinds: Vec<GenKind>,
    /// Also check the sum, product, two-sum and commutator bounds on pairs of elements.
    pub composites: bool,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            trials: DEFAULT_TRIALS,
            dims: DEFAULT_DIMS.to_vec(),
            resolution: DEFAULT_RESOLUTION,
            tol: DEFAULT_TOL,
            seed: 0,
            filter: None,
            kinds: GenKind::ALL.to_vec(),
            composites: true,
        }
    }
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::BadParam("trials must be at least 1".into()));
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::BadParam(
                "dims must be a non-empty list of positive integers".into(),
            ));
        }
        if self.kinds.is_empty() {
            return Err(Error::BadParam("no generator kinds selected".into()));
        }
        if let Some(ids) = &self.filter {
            check_bound_ids(ids)?;
        }
        self.chain_config().validate()
    }

    pub fn chain_config(&self) -> ChainConfig {
        ChainConfig {
            tol: self.tol,
            resolution: self.resolution,
            filter: self.filter.clone(),
            ..ChainConfig::default()
        }
    }

    fn keeps(&self, id: &str) -> bool {
        match &self.filter {
            None => true,
            Some(ids) => ids.iter().any(|f| f == "all" || f == id),
        }
    }
}

/// The generator spec of trial `index` of `kind`.
pub fn trial_spec(seed: u64, kind: GenKind, dims: &[usize], index: usize) -> GenSpec {
    let mut rng = CounterRng::new(seed)
        .split(kind.name())
        .split_index(index as u64);
    let dim = dims[index % dims.len()];
    let spec = GenSpec::new(kind, dim, rng.next_u64());
    if kind != GenKind::AlphaBetaTarget {
        return spec;
    }
    let (alpha, beta) = if dim == 1 {
        (1.0, 1.0)
    } else {
        let alpha = rng.uniform(0.3, 1.0);
        let (lo, hi) = feasible_beta_range(alpha, dim).expect("alpha in (0, 1]");
        (alpha, rng.uniform(lo, hi))
    };
    spec.with_params(GenParams {
        alpha: Some(alpha),
        beta: Some(beta),
        ..GenParams::default()
    })
}

/// A second spec of the same kind and dimension, derived from `spec`.
fn partner_spec(spec: &GenSpec, label: &str) -> GenSpec {
    let seed = CounterRng::new(spec.seed).split(label).next_u64();
    GenSpec {
        seed,
        ..spec.clone()
    }
}

fn ginibre_partner(spec: &GenSpec, label: &str) -> GenSpec {
    GenSpec::new(
        GenKind::Ginibre,
        spec.dim,
        CounterRng::new(spec.seed).split(label).next_u64(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRef {
    pub kind: GenKind,
    pub index: usize,
}

/// Aggregate over every check of one inequality id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityStats {
    pub checks: usize,
    pub min_slack: f64,
    pub min_slack_at: TrialRef,
    /// Trials with at least one check inside the equality band.
    pub equality_trials: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct KindStats {
    pub trials: usize,
    /// Trials flagged by each structural equality class of `v`.
    pub equality_classes: BTreeMap<String, usize>,
    /// Trials where an id sits inside its equality band.
    pub equalities: BTreeMap<String, usize>,
}

/// A failed check together with the specs that rebuild its inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub id: String,
    pub params: BoundParams,
    pub expression: String,
    pub value: f64,
    pub target: f64,
    pub slack: f64,
    pub at: TrialRef,
    pub reproducer: Vec<GenSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub schema: u32,
    pub config: FuzzConfig,
    pub trials_total: usize,
    pub inequalities: BTreeMap<String, InequalityStats>,
    pub kinds: BTreeMap<String, KindStats>,
    pub violations: Vec<Violation>,
}

impl FuzzSummary {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

/// Everything one trial produced; merged into the summary in trial order.
struct TrialOutcome {
    at: TrialRef,
    checks: Vec<(String, Vec<GenSpec>, BoundCheck)>,
    classes: Vec<&'static str>,
}

fn structural_classes(a: &ComplexMatrix, v: f64, norm: f64) -> Vec<&'static str> {
    let adj = a.adjoint();
    let cross = hermitian_norm(&(&(&adj * a) + &(a * &adj)));
    let tol = DEFAULT_EQUALITY_TOL;
    let mut out = Vec::new();
    if (v - norm / 2.0).abs() <= tol * (1.0 + v) {
        out.push("v_equals_half_norm");
    }
    if (v * v - cross / 4.0).abs() <= tol * (1.0 + v * v) {
        out.push("v_sq_equals_quarter_cross");
    }
    if (v - norm).abs() <= tol * (1.0 + v) {
        out.push("v_equals_norm");
    }
    out
}

fn run_trial(
    cfg: &FuzzConfig,
    chain: &ChainConfig,
    kind: GenKind,
    index: usize,
) -> Result<TrialOutcome> {
    let spec = trial_spec(cfg.seed, kind, &cfg.dims, index);
    let a = generate(&spec)?;
    let report = verify_chain(&a, chain)?;
    let at = TrialRef { kind, index };
    let mut checks: Vec<(String, Vec<GenSpec>, BoundCheck)> = report
        .checks()
        .map(|c| ("a".to_string(), vec![spec.clone()], c.clone()))
        .collect();
    if cfg.composites {
        composite_checks(cfg, &spec, &a, &mut checks)?;
    }
    Ok(TrialOutcome {
        at,
        checks,
        classes: structural_classes(&a, report.v, report.norm),
    })
}

fn composite_checks(
    cfg: &FuzzConfig,
    spec: &GenSpec,
    a: &ComplexMatrix,
    out: &mut Vec<(String, Vec<GenSpec>, BoundCheck)>,
) -> Result<()> {
    let b_spec = partner_spec(spec, "partner");
    let x_spec = ginibre_partner(spec, "x");
    let y_spec = ginibre_partner(spec, "y");
    let b = generate(&b_spec)?;
    let x = generate(&x_spec)?;
    let y = generate(&y_spec)?;
    let keep_any = |ids: &[&str]| ids.iter().any(|id| cfg.keeps(id));
    let mut push = |bound: CompositeBound, specs: Vec<GenSpec>| {
        for c in bound.checks(cfg.tol) {
            if cfg.keeps(&c.bound.id) {
                out.push((bound.expression.clone(), specs.clone(), c));
            }
        }
    };
    let ab = vec![spec.clone(), b_spec.clone()];
    let abxy = vec![spec.clone(), b_spec.clone(), x_spec.clone(), y_spec.clone()];

    if keep_any(&["SUM_4_2"]) {
        for r in [1, 2] {
            push(sum_bound(&[a.clone(), b.clone()], r)?, ab.clone());
        }
    }
    if keep_any(&["PROD_4_5"]) {
        for r in [1, 2] {
            push(sum_bound_cartesian(&[a.clone(), b.clone()], r)?, ab.clone());
        }
    }
    if keep_any(&["PROD_4_4"]) {
        push(
            product_bound_unit_middle_r(&[a.clone(), b.clone()], &[b.clone(), a.clone()], 1)?,
            ab.clone(),
        );
    }
    if keep_any(&["PROD_4_3"]) {
        push(
            triple_product_bound(
                &[a.clone(), b.clone()],
                &[x.clone(), y.clone()],
                &[b.clone(), a.clone()],
                1,
            )?,
            abxy.clone(),
        );
    }
    if keep_any(&["TWO_SUM_4_6"]) {
        push(two_sum_bound(a, &b)?, ab.clone());
    }
    if keep_any(&["TWO_SUM_4_6_sa"]) {
        let re = |m: &ComplexMatrix| (m + &m.adjoint()).scale_real(0.5);
        push(two_sum_bound_self_adjoint(&re(a), &re(&b))?, ab.clone());
    }
    if keep_any(&["COMM_4_7"]) {
        for sign in [Sign::Plus, Sign::Minus] {
            push(commutator_bound(a, &b, &x, &y, sign)?, abxy.clone());
        }
    }
    if keep_any(&["COMM_4_7", "COR_4_8", "COR_4_8_coarse"]) {
        push(commutator_corollaries(a, &b, Sign::Minus)?, ab.clone());
    }
    if keep_any(&["COMM_4_7", "COR_4_9", "COR_4_9_coarse"]) {
        push(product_bounds(a, &b)?, ab.clone());
    }
    if keep_any(&[
        "COMM_4_7_comm",
        "COR_4_9_comm",
        "COR_4_9_comm_coarse",
        "REM_4_10_comm",
    ]) {
        // A polynomial in `a` commutes with `a`.
        let mut rng = CounterRng::new(spec.seed).split("polynomial");
        let c: [C64; 3] = [
            rng.complex_gaussian(),
            rng.complex_gaussian(),
            rng.complex_gaussian(),
        ];
        let e = ComplexMatrix::identity(a.dim());
        let a2 = a * a;
        let p = &(&e.scale(c[0]) + &a.scale(c[1])) + &a2.scale(c[2]);
        match commuting_product_bounds(a, &p) {
            Ok(bound) => push(bound, vec![spec.clone()]),
            Err(Error::NotCommuting(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// Runs `trials` per kind and folds the outcomes in (kind, trial index) order.
pub fn run_fuzz(cfg: &FuzzConfig) -> Result<FuzzSummary> {
    cfg.validate()?;
    let chain = cfg.chain_config();
    let mut kinds_sorted = cfg.kinds.clone();
    kinds_sorted.sort();
    kinds_sorted.dedup();

    let mut inequalities: BTreeMap<String, InequalityStats> = BTreeMap::new();
    let mut kinds: BTreeMap<String, KindStats> = BTreeMap::new();
    let mut violations = Vec::new();
    let mut trials_total = 0;

    for &kind in &kinds_sorted {
        let stats = kinds.entry(kind.name().to_string()).or_default();
        for index in 0..cfg.trials {
            let outcome = run_trial(cfg, &chain, kind, index)?;
            trials_total += 1;
            stats.trials += 1;
            for class in &outcome.classes {
                *stats.equality_classes.entry(class.to_string()).or_default() += 1;
            }
            let mut equal_ids: Vec<&str> = Vec::new();
            for (expression, specs, c) in &outcome.checks {
                let id = c.bound.id.as_str();
                let entry = inequalities
                    .entry(id.to_string())
                    .or_insert(InequalityStats {
                        checks: 0,
                        min_slack: f64::INFINITY,
                        min_slack_at: outcome.at,
                        equality_trials: 0,
                        violations: 0,
                    });
                entry.checks += 1;
                if c.slack < entry.min_slack {
                    entry.min_slack = c.slack;
                    entry.min_slack_at = outcome.at;
                }
                if c.equality {
                    equal_ids.push(id);
                }
                if c.violation {
                    entry.violations += 1;
                    violations.push(Violation {
                        id: id.to_string(),
                        params: c.bound.params,
                        expression: expression.clone(),
                        value: c.bound.value,
                        target: c.target,
                        slack: c.slack,
                        at: outcome.at,
                        reproducer: specs.clone(),
                    });
                }
            }
            equal_ids.sort_unstable();
            equal_ids.dedup();
            for id in equal_ids {
                inequalities
                    .get_mut(id)
                    .expect("seen above")
                    .equality_trials += 1;
                *stats.equalities.entry(id.to_string()).or_default() += 1;
            }
        }
    }

    Ok(FuzzSummary {
        schema: SUMMARY_SCHEMA,
        config: cfg.clone(),
        trials_total,
        inequalities,
        kinds,
        violations,
    })
}
