//! Acceptance suite: each criterion prints one PASS/FAIL line and the target
//! exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::process::ExitCode;
use std::time::Instant;

use numrad::bounds::{
    commuting_product_bounds, lower_bounds, upper_bounds, BoundValue, DEFAULT_R_LIST,
    DEFAULT_T_GRID,
};
use numrad::campaign::{run_fuzz, trial_spec, FuzzConfig};
use numrad::genlab::{generate, CounterRng, GenKind, GenSpec};
use numrad::matcore::{cartesian_parts, hermitian_norm, spectral_norm};
use numrad::numrange::{numerical_radius, radius, radius_via_pm_formula, DEFAULT_REFINE_TOL};
use numrad::states::{
    alpha_beta, buzano_check, functional_check, mccarthy_check, mixed_schwarz_check,
    power_mean_check, quadratic_form, random_state, vector_norm, Arity, FunctionalParams,
    StateKind, FUNCTIONAL_REGISTRY,
};
use numrad::{ComplexMatrix, C64};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Outcome {
            pass: true,
            detail: summary,
        }
    } else {
        let shown: Vec<&str> = failures.iter().take(5).map(String::as_str).collect();
        Outcome {
            pass: false,
            detail: format!("{} failures: {}", failures.len(), shown.join("; ")),
        }
    }
}

fn expect(failures: &mut Vec<String>, label: &str, got: f64, want: f64, tol: f64) {
    if (got - want).abs() > tol || got.is_nan() {
        failures.push(format!("{label}: got {got:.15}, want {want:.15}"));
    }
}

fn value(bounds: &[BoundValue], id: &str) -> f64 {
    bounds
        .iter()
        .find(|b| b.id == id)
        .unwrap_or_else(|| panic!("missing {id}"))
        .value
}

fn linear_diagonal() -> ComplexMatrix {
    generate(&GenSpec::linear_diagonal(
        C64::new(1.0, 2.0),
        vec![-1.0, 0.0, 1.0],
    ))
    .unwrap()
}

fn nilpotent() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[[0.0, 1.0, 0.0], [0.0, 0.0, 2.0], [0.0, 0.0, 0.0]])
}

fn linear_diagonal_reproduction() -> Outcome {
    let start = Instant::now();
    let a = linear_diagonal();
    let (re, im) = cartesian_parts(&a);
    let mut f = Vec::new();
    let s5 = 5f64.sqrt();
    expect(&mut f, "v", radius(&a), s5, 1e-9);
    expect(&mut f, "|a|", spectral_norm(&a), s5, 1e-9);
    expect(&mut f, "|Re|", hermitian_norm(&re), 1.0, 1e-9);
    expect(&mut f, "|Im|", hermitian_norm(&im), 2.0, 1e-9);
    expect(&mut f, "|Re+Im|", hermitian_norm(&(&re + &im)), 3.0, 1e-9);
    expect(&mut f, "|Re-Im|", hermitian_norm(&(&re - &im)), 1.0, 1e-9);
    let lb = lower_bounds(&a);
    expect(&mut f, "T1E1", value(&lb, "T1E1"), s5 / 2.0 + 0.5, 1e-9);
    expect(&mut f, "T1E2", value(&lb, "T1E2"), s5 / 2.0 + 0.25, 1e-9);
    expect(
        &mut f,
        "T1E3",
        value(&lb, "T1E3"),
        s5 / 2.0 + FRAC_1_SQRT_2,
        1e-9,
    );
    let secs = start.elapsed().as_secs_f64();
    if secs >= 1.0 {
        f.push(format!("runtime {secs:.3} s"));
    }
    outcome(
        f,
        format!("v = sqrt5 and three first-power lower bounds match ({secs:.3} s)"),
    )
}

fn squared_lower_bounds_reproduction() -> Outcome {
    let lb = lower_bounds(&linear_diagonal());
    let mut f = Vec::new();
    expect(&mut f, "T2E1", value(&lb, "T2E1"), 2.5 + 1.5, 1e-9);
    expect(&mut f, "T2E2", value(&lb, "T2E2"), 2.5 + 2.0, 1e-9);
    expect(&mut f, "T2E3", value(&lb, "T2E3"), 2.5 + 0.75, 1e-9);
    outcome(f, "squared lower bounds 4, 4.5, 3.25".into())
}

fn nilpotent_reproduction() -> Outcome {
    let a = nilpotent();
    let ub = upper_bounds(&a, &DEFAULT_R_LIST, &DEFAULT_T_GRID).unwrap();
    let mut f = Vec::new();
    let v = radius(&a);
    expect(&mut f, "v", v, 5f64.sqrt() / 2.0, 1e-9);
    expect(
        &mut f,
        "half |a|+|a*|",
        value(&ub, "UB_3_3_half_abs"),
        1.5,
        1e-9,
    );
    expect(
        &mut f,
        "refined",
        value(&ub, "UB_3_3_refined"),
        (2.0 + SQRT_2) / 2.0,
        1e-9,
    );
    let min_t = ub
        .iter()
        .find(|b| b.id == "UB_3_5_min_t" && b.params.r == Some(1))
        .expect("r = 1 present")
        .value;
    expect(&mut f, "min_t", min_t, 16.0 / 7.0, 1e-8);
    let half_cross = value(&ub, "UB_HALF_CROSS");
    if !(v * v < min_t && min_t < half_cross) {
        f.push(format!(
            "min_t {min_t} not strictly between {} and {half_cross}",
            v * v
        ));
    }
    outcome(
        f,
        format!("v = sqrt5/2, 3/2, (2+sqrt2)/2, min_t = {min_t:.12}"),
    )
}

fn commuting_product_reproduction() -> Outcome {
    let a = linear_diagonal();
    let b =
        ComplexMatrix::from_diag(&[C64::new(-1.0, -1.0), C64::new(0.0, 0.0), C64::new(1.0, 1.0)]);
    let mut f = Vec::new();
    match commuting_product_bounds(&a, &b) {
        Ok(c) => {
            expect(&mut f, "v(ab)", c.lhs_radius, 10f64.sqrt(), 1e-9);
            expect(
                &mut f,
                "refined",
                c.bound("COR_4_9_comm").unwrap().value,
                14f64.sqrt(),
                1e-9,
            );
            expect(
                &mut f,
                "coarse",
                c.bound("COR_4_9_comm_coarse").unwrap().value,
                20f64.sqrt(),
                1e-9,
            );
        }
        Err(e) => f.push(e.to_string()),
    }
    outcome(f, "sqrt10 <= sqrt14 <= sqrt20".into())
}

fn chain_fuzz() -> Outcome {
    let start = Instant::now();
    let cfg = FuzzConfig {
        trials: 1000,
        dims: vec![2, 3, 4, 6],
        resolution: 1024,
        tol: 1e-8,
        seed: 20_240_601,
        composites: false,
        ..FuzzConfig::default()
    };
    let summary = match run_fuzz(&cfg) {
        Ok(s) => s,
        Err(e) => return outcome(vec![e.to_string()], String::new()),
    };
    let secs = start.elapsed().as_secs_f64();
    let mut f: Vec<String> = summary
        .violations
        .iter()
        .map(|v| {
            format!(
                "{} [{}] slack {:e} at {:?}",
                v.id,
                v.params.label(),
                v.slack,
                v.reproducer
            )
        })
        .collect();
    if summary.trials_total != 7000 {
        f.push(format!("ran {} trials", summary.trials_total));
    }
    if secs >= 600.0 {
        f.push(format!("runtime {secs:.1} s"));
    }
    let checks: usize = summary.inequalities.values().map(|s| s.checks).sum();
    outcome(
        f,
        format!(
            "{} matrices, {checks} bound checks, 0 violations ({secs:.1} s)",
            summary.trials_total
        ),
    )
}

fn draws(seed: u64, count: usize, dims: &[usize]) -> Vec<ComplexMatrix> {
    (0..count)
        .map(|i| {
            let kind = GenKind::ALL[i % GenKind::ALL.len()];
            generate(&trial_spec(seed, kind, dims, i / GenKind::ALL.len())).unwrap()
        })
        .collect()
}

fn formula_equivalence() -> Outcome {
    let mut f = Vec::new();
    let mut worst: f64 = 0.0;
    for (i, a) in draws(11, 500, &[2, 3, 4, 5, 6]).iter().enumerate() {
        let v = numerical_radius(a, 1024, DEFAULT_REFINE_TOL);
        let pm = radius_via_pm_formula(a, 1024);
        worst = worst.max((v - pm).abs());
        if (v - pm).abs() > 1e-8 || pm.is_nan() {
            f.push(format!("draw {i}: v {v} vs pm {pm}"));
        }
    }
    outcome(f, format!("500 draws, max difference {worst:.2e}"))
}

fn random_unit(rng: &mut CounterRng, dim: usize) -> Vec<C64> {
    let x: Vec<C64> = (0..dim).map(|_| rng.complex_gaussian()).collect();
    let n = vector_norm(&x);
    x.into_iter().map(|z| z / n).collect()
}

fn brute_force_oracle() -> Outcome {
    let mut f = Vec::new();
    let mut worst_gap: f64 = 0.0;
    let mut count = 0;
    for (i, a) in draws(13, 14, &[2, 3, 4]).iter().enumerate() {
        let v = radius(a);
        let mut rng = CounterRng::new(99).split_index(i as u64);
        let mut best: f64 = 0.0;
        for _ in 0..200_000 {
            let xi = random_unit(&mut rng, a.dim());
            best = best.max(quadratic_form(a, &xi).norm());
        }
        count += 1;
        worst_gap = worst_gap.max(v - best);
        if best > v + 1e-8 {
            f.push(format!("draw {i}: sampled {best} exceeds v = {v}"));
        }
        if v - best > 5e-3 {
            f.push(format!("draw {i}: sampling gap {:.3e}", v - best));
        }
    }
    outcome(
        f,
        format!("{count} matrices x 200000 vectors, largest gap {worst_gap:.2e}"),
    )
}

fn structural_laws() -> Outcome {
    let mut f = Vec::new();
    for i in 0..200 {
        let a = generate(&trial_spec(17, GenKind::SquareZero, &[2, 3, 4, 5, 6], i)).unwrap();
        let adj = a.adjoint();
        let cross = hermitian_norm(&(&(&adj * &a) + &(&a * &adj)));
        let v = radius(&a);
        expect(
            &mut f,
            &format!("square-zero {i} half norm"),
            v,
            spectral_norm(&a) / 2.0,
            1e-8,
        );
        expect(
            &mut f,
            &format!("square-zero {i} quarter cross"),
            v,
            (cross / 4.0).sqrt(),
            1e-8,
        );
    }
    for i in 0..200 {
        let a = generate(&trial_spec(19, GenKind::Normal, &[2, 3, 4, 5, 6], i)).unwrap();
        expect(
            &mut f,
            &format!("normal {i} v = |a|"),
            radius(&a),
            spectral_norm(&a),
            1e-7,
        );
        let ab = alpha_beta(&a, 1e-7);
        expect(
            &mut f,
            &format!("normal {i} alpha"),
            ab.alpha_max,
            1.0,
            1e-7,
        );
        expect(&mut f, &format!("normal {i} beta"), ab.beta_min, 1.0, 1e-7);
    }
    for (i, a) in draws(23, 500, &[2, 3, 4, 6]).iter().enumerate() {
        let v = radius(a);
        for n in 2..=4u32 {
            let vn = radius(&a.pow(n));
            if vn > v.powi(n as i32) + 1e-8 {
                f.push(format!(
                    "draw {i}: v(a^{n}) = {vn} > v^{n} = {}",
                    v.powi(n as i32)
                ));
            }
        }
    }
    outcome(
        f,
        "200 square-zero, 200 normal, 500 power-inequality draws".into(),
    )
}

fn functional_suite() -> Outcome {
    const DRAWS: usize = 10_000;
    let mut f = Vec::new();
    let mut rng = CounterRng::new(29);
    for (idx, ineq) in FUNCTIONAL_REGISTRY.iter().enumerate() {
        let mut failed = 0;
        for trial in 0..DRAWS {
            let dim = 1 + trial % 4;
            let count = match ineq.arity {
                Arity::One => 1,
                Arity::Pair => 2,
                Arity::Sum => 1 + trial % 3,
                Arity::Triples => 3 * (1 + trial % 2),
            };
            let inputs: Vec<ComplexMatrix> = (0..count)
                .map(|k| {
                    let kind = GenKind::ALL[(trial + k) % GenKind::ALL.len()];
                    generate(&trial_spec(1000 + idx as u64, kind, &[dim], trial * 8 + k)).unwrap()
                })
                .collect();
            let kind = if trial % 2 == 0 {
                StateKind::Vector
            } else {
                StateKind::Density
            };
            let state = random_state(dim, kind, rng.next_u64());
            let params = FunctionalParams {
                r: 1 + (trial % 3) as u32,
                t: rng.next_f64(),
            };
            match functional_check(ineq.id, &inputs, params, &state) {
                Ok(v) if v.verdict.holds => {}
                Ok(v) => {
                    failed += 1;
                    if failed <= 2 {
                        f.push(format!(
                            "{} trial {trial}: lhs {} rhs {}",
                            ineq.id, v.verdict.lhs, v.verdict.rhs
                        ));
                    }
                }
                Err(e) => f.push(format!("{} trial {trial}: {e}", ineq.id)),
            }
        }
    }
    let mut lemma_fail = |name: &str, ok: bool, trial: usize| {
        if !ok {
            f.push(format!("{name} trial {trial}"));
        }
    };
    for trial in 0..DRAWS {
        let dim = 1 + trial % 4;
        let kind = GenKind::ALL[trial % GenKind::ALL.len()];
        let a = generate(&trial_spec(2000, kind, &[dim], trial)).unwrap();
        let xi = random_unit(&mut rng, dim);
        let eta = random_unit(&mut rng, dim);
        lemma_fail(
            "mixed Schwarz",
            mixed_schwarz_check(&a, &xi, &eta).holds,
            trial,
        );
        let p = 1.0 + 3.0 * rng.next_f64();
        let psd = &a.adjoint() * &a;
        lemma_fail(
            "McCarthy",
            mccarthy_check(&psd, &xi, p)
                .map(|v| v.holds)
                .unwrap_or(false),
            trial,
        );
        let x: Vec<C64> = (0..dim).map(|_| rng.complex_gaussian()).collect();
        let y: Vec<C64> = (0..dim).map(|_| rng.complex_gaussian()).collect();
        lemma_fail("Buzano", buzano_check(&x, &y, &eta).holds, trial);
        let xs: Vec<f64> = (0..1 + trial % 5).map(|_| rng.next_f64() * 10.0).collect();
        lemma_fail(
            "power mean",
            power_mean_check(&xs, 1 + (trial % 4) as u32).holds,
            trial,
        );
    }
    outcome(
        f,
        format!(
            "{} state-level inequalities and 4 lemmas x {DRAWS} draws, 0 violations",
            FUNCTIONAL_REGISTRY.len()
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("linear diagonal reproduction", linear_diagonal_reproduction),
        (
            "squared lower bounds reproduction",
            squared_lower_bounds_reproduction,
        ),
        ("nilpotent upper bounds", nilpotent_reproduction),
        ("commuting product bounds", commuting_product_reproduction),
        ("chain fuzz", chain_fuzz),
        ("formula equivalence", formula_equivalence),
        ("brute-force oracle", brute_force_oracle),
        ("structural laws", structural_laws),
        ("functional-level suite", functional_suite),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        all &= o.pass;
        println!(
            "criterion {} {}: {} ({}; {:.1} s)",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
