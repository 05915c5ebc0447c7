//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

// `!(e <= tol)` is deliberate: NaN must count as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::ExitCode;
use std::time::{Duration, Instant};

use negtype::closed_forms::{
    gamma_cycle, gamma_discrete, gamma_tree, inverse_cycle, inverse_tree, reciprocal_laplacian,
};
use negtype::gap::{
    analyze, beta_hypercube, beta_hypercube_naive, branch_and_bound, gap_form,
    verify_gap_inequality, witness_oscillation, EnumOptions, GapOptions, GapResult,
    DEFAULT_BNB_BUDGET,
};
use negtype::linalg::{dot, identity_error, norm1, SymMatrix};
use negtype::metric::{
    gen_cycle, gen_discrete, gen_random_tree, path_metric, power_matrix, validate_metric,
    MetricSpace, WeightedGraph,
};
use negtype::negtype::{build_b, Tolerances};
use negtype::Verdict;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TREE_SEED_BASE: u64 = 1000;

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

struct Instance {
    label: String,
    space: MetricSpace,
    /// Closed-form `Γ`.
    oracle: f64,
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(failures: &[String], summary: String) -> Self {
        match failures.first() {
            None => Outcome {
                pass: true,
                detail: summary,
            },
            Some(first) => Outcome {
                pass: false,
                detail: format!("{summary}; {} failure(s), first: {first}", failures.len()),
            },
        }
    }
}

fn sequential() -> GapOptions {
    GapOptions {
        enumeration: EnumOptions {
            parallel: false,
            ..Default::default()
        },
        ..Default::default()
    }
}

fn discrete_instances() -> Vec<Instance> {
    (2..=12)
        .map(|n| Instance {
            label: format!("discrete({n})"),
            space: gen_discrete(n).unwrap(),
            oracle: gamma_discrete(n).unwrap().gamma,
        })
        .collect()
}

fn cycle_instances() -> Vec<Instance> {
    (3..=15)
        .map(|n| Instance {
            label: format!("cycle({n})"),
            space: path_metric(&gen_cycle(n).unwrap()).unwrap(),
            oracle: gamma_cycle(n).unwrap().gamma,
        })
        .collect()
}

fn random_trees(count: u64) -> Vec<WeightedGraph> {
    (0..count)
        .map(|k| {
            let seed = TREE_SEED_BASE + k;
            let n = ChaCha8Rng::seed_from_u64(seed).gen_range(2..=12);
            gen_random_tree(n, (0.1, 10.0), seed).unwrap()
        })
        .collect()
}

fn tree_instances(trees: &[WeightedGraph]) -> Vec<Instance> {
    trees
        .iter()
        .enumerate()
        .map(|(k, t)| Instance {
            label: format!("tree#{k}(n={})", t.n()),
            space: path_metric(t).unwrap(),
            oracle: gamma_tree(t).unwrap().gamma,
        })
        .collect()
}

fn euclidean(n: usize, dim: usize, seed: u64) -> MetricSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let d = SymMatrix::from_fn(n, |i, j| {
        pts[i]
            .iter()
            .zip(&pts[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    });
    validate_metric(&d).unwrap()
}

fn gap_of(x: &MetricSpace) -> (Verdict, Option<GapResult>, f64) {
    let a = analyze(&power_matrix(x, 1.0).unwrap(), &sequential()).unwrap();
    let gamma = a.gamma().unwrap_or(f64::NAN);
    (a.report.verdict, a.gap, gamma)
}

fn check_gamma(instances: &[Instance], tol: f64, failures: &mut Vec<String>) -> f64 {
    let mut worst = 0.0f64;
    for inst in instances {
        let (_, _, gamma) = gap_of(&inst.space);
        let e = rel(gamma, inst.oracle);
        worst = worst.max(e);
        if !(e <= tol) {
            failures.push(format!("{}: gamma {gamma} vs {}", inst.label, inst.oracle));
        }
    }
    worst
}

fn c1() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let worst = check_gamma(&discrete_instances(), 1e-9, &mut failures);
    let t = start.elapsed();
    if t >= Duration::from_secs(1) {
        failures.push(format!("runtime {t:?} ≥ 1 s"));
    }
    Outcome::new(
        &failures,
        format!("n = 2..12, max rel err {worst:.2e}, {t:.2?}"),
    )
}

fn c2() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let cycles = cycle_instances();
    let odd: Vec<Instance> = cycles
        .into_iter()
        .filter(|c| c.space.n() % 2 == 1)
        .collect();
    let worst = check_gamma(&odd, 1e-9, &mut failures);
    for n in (4..=14).step_by(2) {
        let (verdict, gap, gamma) = gap_of(&path_metric(&gen_cycle(n).unwrap()).unwrap());
        if verdict != Verdict::NegativeTypeNonStrict || gap.is_some() || gamma != 0.0 {
            failures.push(format!("cycle({n}): {verdict:?}, gamma {gamma}"));
        }
    }
    let t = start.elapsed();
    if t >= Duration::from_secs(5) {
        failures.push(format!("runtime {t:?} ≥ 5 s"));
    }
    Outcome::new(
        &failures,
        format!("odd n = 3..15 max rel err {worst:.2e}, even n = 4..14 non-strict, {t:.2?}"),
    )
}

fn c3(trees: &[WeightedGraph]) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let worst = check_gamma(&tree_instances(trees), 1e-8, &mut failures);
    let t = start.elapsed();
    if t >= Duration::from_secs(10) {
        failures.push(format!("runtime {t:?} ≥ 10 s"));
    }
    Outcome::new(
        &failures,
        format!("{} trees, max rel err {worst:.2e}, {t:.2?}", trees.len()),
    )
}

fn c4(trees: &[WeightedGraph]) -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for (k, t) in trees.iter().enumerate() {
        let x = path_metric(t).unwrap();
        let b = build_b(&power_matrix(&x, 1.0).unwrap(), &Tolerances::default())
            .unwrap()
            .b;
        let half_l = reciprocal_laplacian(t).scale(0.5);
        let e = b.add_scaled(-1.0, &half_l).unwrap().max_abs() / half_l.max_abs();
        worst = worst.max(e);
        if !(e <= 1e-9) {
            failures.push(format!("tree#{k}: rel max-entry err {e:.2e}"));
        }
    }
    Outcome::new(
        &failures,
        format!("B = L/2 on {} trees, max rel err {worst:.2e}", trees.len()),
    )
}

fn c5(trees: &[WeightedGraph]) -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for n in (3..=15).step_by(2) {
        let a = power_matrix(&path_metric(&gen_cycle(n).unwrap()).unwrap(), 1.0)
            .unwrap()
            .a;
        let e = identity_error(&a.mul_dense(&inverse_cycle(n).unwrap()).unwrap());
        worst = worst.max(e);
        if !(e <= 1e-10) {
            failures.push(format!("cycle({n}): {e:.2e}"));
        }
    }
    for (k, t) in trees.iter().enumerate() {
        let a = power_matrix(&path_metric(t).unwrap(), 1.0).unwrap().a;
        let e = identity_error(&a.mul_dense(&inverse_tree(t).unwrap()).unwrap());
        worst = worst.max(e);
        if !(e <= 1e-10) {
            failures.push(format!("tree#{k}: {e:.2e}"));
        }
    }
    Outcome::new(&failures, format!("max |A·A⁻¹ − I| = {worst:.2e}"))
}

fn all_instances(trees: &[WeightedGraph]) -> Vec<Instance> {
    let mut v = discrete_instances();
    v.extend(cycle_instances());
    v.extend(tree_instances(trees));
    v
}

fn c6(instances: &[Instance]) -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    let mut strict = 0;
    for inst in instances {
        let (_, gap, _) = gap_of(&inst.space);
        let Some(g) = gap else { continue };
        strict += 1;
        let betas = [
            g.beta_by_hypercube.unwrap(),
            g.beta_by_opnorm.unwrap(),
            g.beta_by_binary.unwrap(),
            norm1(&g.witness_y0),
        ];
        let hi = betas.iter().cloned().fold(f64::MIN, f64::max);
        let lo = betas.iter().cloned().fold(f64::MAX, f64::min);
        let e = (hi - lo) / hi;
        worst = worst.max(e);
        if !(e <= 1e-8) {
            failures.push(format!("{}: {betas:?}", inst.label));
        }
    }
    Outcome::new(
        &failures,
        format!("{strict} strict instances, max spread {worst:.2e}"),
    )
}

fn c7(instances: &[Instance]) -> Outcome {
    let mut failures = Vec::new();
    let mut strict = 0;
    for inst in instances {
        let ntm = power_matrix(&inst.space, 1.0).unwrap();
        let a = analyze(&ntm, &sequential()).unwrap();
        let Some(g) = a.gap else { continue };
        strict += 1;
        let y = &g.witness_y0;
        let beta = g.beta;
        let sum = y.iter().sum::<f64>();
        let osc = witness_oscillation(&ntm, y).unwrap();
        let l1 = norm1(y);
        let energy = -dot(&ntm.a.mul_vec(y).unwrap(), y);
        let form = gap_form(&ntm.a, g.gamma, y).unwrap();
        let ok = sum.abs() <= 1e-9
            && osc <= 1.0 + 1e-9
            && rel(l1, beta) <= 1e-7
            && rel(energy, beta) <= 1e-7
            && form.abs() <= 1e-6 * beta;
        if !ok {
            failures.push(format!(
                "{}: sum {sum:.2e}, o {osc}, |y|₁ {l1}, energy {energy}, beta {beta}, form {form:.2e}",
                inst.label
            ));
        }
    }
    Outcome::new(&failures, format!("{strict} strict instances"))
}

fn c8(instances: &[Instance]) -> Outcome {
    let mut failures = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    let mut strict = 0;
    for (k, inst) in instances.iter().enumerate() {
        let (_, gap, _) = gap_of(&inst.space);
        let Some(g) = gap else { continue };
        strict += 1;
        let chk = verify_gap_inequality(
            &inst.space,
            1.0,
            g.gamma,
            1000,
            k as u64,
            Some(&g.witness_y0),
        )
        .unwrap();
        worst = worst.max(chk.max_scaled_slack);
        if !chk.all_pass() || chk.maximality.is_none() {
            failures.push(format!(
                "{}: {}/{} pass, maximality {:?}",
                inst.label, chk.passed, chk.trials, chk.maximality
            ));
        }
    }
    Outcome::new(
        &failures,
        format!("{strict} instances × 1000 trials, max scaled slack {worst:.2e}, Γ·1.0001 violated on every witness"),
    )
}

/// Seeded random strict instances: alternately random trees and planar
/// point sets.
fn random_strict(
    count: u64,
    seed_base: u64,
    n_range: std::ops::RangeInclusive<usize>,
) -> Vec<(String, MetricSpace)> {
    (0..count)
        .map(|k| {
            let seed = seed_base + k;
            let n = ChaCha8Rng::seed_from_u64(seed).gen_range(n_range.clone());
            if k % 2 == 0 {
                let t = gen_random_tree(n, (0.1, 10.0), seed).unwrap();
                (
                    format!("tree(n={n}, seed={seed})"),
                    path_metric(&t).unwrap(),
                )
            } else {
                (format!("points(n={n}, seed={seed})"), euclidean(n, 2, seed))
            }
        })
        .collect()
}

fn c9() -> Outcome {
    let mut failures = Vec::new();
    let cases = random_strict(20, 2000, 2..=12);
    for (label, x) in &cases {
        let b = build_b(&power_matrix(x, 1.0).unwrap(), &Tolerances::default())
            .unwrap()
            .b;
        let naive = beta_hypercube_naive(&b).unwrap();
        for parallel in [false, true] {
            let gray = beta_hypercube(
                &b,
                &EnumOptions {
                    parallel,
                    ..Default::default()
                },
            )
            .unwrap();
            if gray.0.to_bits() != naive.0.to_bits() || gray.1 != naive.1 {
                failures.push(format!(
                    "{label} (parallel={parallel}): {gray:?} vs {naive:?}"
                ));
            }
        }
    }
    Outcome::new(
        &failures,
        format!("{} instances, identical β and s*", cases.len()),
    )
}

fn c10() -> Outcome {
    let mut failures = Vec::new();
    let mut cases: Vec<(String, MetricSpace)> = Vec::new();
    for n in (3..=19).step_by(2) {
        cases.push((
            format!("cycle({n})"),
            path_metric(&gen_cycle(n).unwrap()).unwrap(),
        ));
    }
    for n in [2, 5, 10, 16, 20] {
        cases.push((format!("discrete({n})"), gen_discrete(n).unwrap()));
    }
    cases.extend(random_strict(12, 3000, 4..=20));
    let mut certified = 0;
    let mut nodes = 0u64;
    let start = Instant::now();
    for (label, x) in &cases {
        let b = build_b(&power_matrix(x, 1.0).unwrap(), &Tolerances::default())
            .unwrap()
            .b;
        let r = branch_and_bound(&b, DEFAULT_BNB_BUDGET).unwrap();
        nodes += r.nodes_expanded;
        if !r.certified {
            continue;
        }
        certified += 1;
        let (beta, _) = beta_hypercube(&b, &EnumOptions::default()).unwrap();
        if !(rel(r.beta, beta) <= 1e-9) {
            failures.push(format!("{label}: bnb {} vs enumeration {beta}", r.beta));
        }
    }
    let b7 = build_b(
        &power_matrix(&path_metric(&gen_cycle(7).unwrap()).unwrap(), 1.0).unwrap(),
        &Tolerances::default(),
    )
    .unwrap()
    .b;
    let r7 = branch_and_bound(&b7, DEFAULT_BNB_BUDGET).unwrap();
    if !r7.certified || !(rel(r7.beta, 136.0 / 7.0) <= 1e-9) {
        failures.push(format!("C7: beta {} certified {}", r7.beta, r7.certified));
    }
    if certified < cases.len() {
        failures.push(format!(
            "{} of {} instances not certified",
            cases.len() - certified,
            cases.len()
        ));
    }
    Outcome::new(
        &failures,
        format!(
            "{certified}/{} certified and equal to enumeration, C7 β = {}, {nodes} nodes, {:.2?}",
            cases.len(),
            r7.beta,
            start.elapsed()
        ),
    )
}

fn c11() -> Outcome {
    let mut failures = Vec::new();
    let cases = random_strict(10, 4000, 3..=12);
    for (label, x) in &cases {
        let (_, g, gamma) = gap_of(x);
        let s = g.unwrap().s_star;
        for c in [0.5, 3.0] {
            let (_, gc, gamma_c) = gap_of(&x.scaled(c).unwrap());
            let sc = gc.unwrap().s_star;
            if !(rel(gamma_c, c * gamma) <= 1e-9) || sc != s {
                failures.push(format!("{label}, c = {c}: {gamma_c} vs {}", c * gamma));
            }
        }
    }
    Outcome::new(
        &failures,
        format!("{} instances × c ∈ {{0.5, 3}}", cases.len()),
    )
}

fn c12() -> Outcome {
    let mut failures = Vec::new();
    let x = path_metric(&gen_random_tree(24, (0.1, 10.0), 24).unwrap()).unwrap();
    let b = build_b(&power_matrix(&x, 1.0).unwrap(), &Tolerances::default())
        .unwrap()
        .b;
    let start = Instant::now();
    let seq = beta_hypercube(
        &b,
        &EnumOptions {
            max_n: 24,
            parallel: false,
        },
    )
    .unwrap();
    let t_seq = start.elapsed();
    let start = Instant::now();
    let par = beta_hypercube(
        &b,
        &EnumOptions {
            max_n: 24,
            parallel: true,
        },
    )
    .unwrap();
    let t_par = start.elapsed();
    if t_seq >= Duration::from_secs(120) {
        failures.push(format!("single-threaded run took {t_seq:?}"));
    }
    if seq.0.to_bits() != par.0.to_bits() || seq.1 != par.1 {
        failures.push(format!("parallel {par:?} differs from sequential {seq:?}"));
    }
    Outcome::new(
        &failures,
        format!(
            "n = 24 single-threaded {t_seq:.2?}, parallel {t_par:.2?}, bit-identical β = {}",
            seq.0
        ),
    )
}

fn main() -> ExitCode {
    let trees = random_trees(50);
    let instances = all_instances(&trees);
    let criteria: Vec<Criterion> = vec![
        ("discrete spaces", Box::new(c1)),
        ("cycles", Box::new(c2)),
        ("trees", Box::new(|| c3(&trees))),
        ("tree B is half the Laplacian", Box::new(|| c4(&trees))),
        ("closed-form inverses", Box::new(|| c5(&trees))),
        ("formula equivalence", Box::new(|| c6(&instances))),
        ("witness equality", Box::new(|| c7(&instances))),
        ("randomized gap inequality", Box::new(|| c8(&instances))),
        ("gray code matches naive enumeration", Box::new(c9)),
        ("branch-and-bound", Box::new(c10)),
        ("scale covariance", Box::new(c11)),
        ("performance at n = 24", Box::new(c12)),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        if !out.pass {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {} [{:.2?}]",
            if out.pass { "PASS" } else { "FAIL" },
            k + 1,
            out.detail,
            start.elapsed()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
