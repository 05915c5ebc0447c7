//! Oracle regression suite and enumeration benchmark.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::closed_forms::{gamma_cycle, gamma_discrete, gamma_tree};
use crate::error::{Error, Result};
use crate::gap::{
    analyze, beta_hypercube, beta_hypercube_naive, branch_and_bound, EnumOptions, GapOptions,
};
use crate::linalg::SymMatrix;
use crate::metric::{
    gen_cycle, gen_discrete, gen_random_tree, path_metric, power_matrix, MetricSpace,
};
use crate::negtype::{build_b, Tolerances};

use super::report::sig6;

/// Relative tolerance for pipeline Γ against a closed form.
pub const ORACLE_REL_TOL: f64 = 1e-9;
pub const TREE_WEIGHT_RANGE: (f64, f64) = (0.1, 10.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    All,
    Discrete,
    Cycles,
    Trees,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Family::All),
            "discrete" => Ok(Family::Discrete),
            "cycles" => Ok(Family::Cycles),
            "trees" => Ok(Family::Trees),
            other => Err(Error::Parse(format!("unknown family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOptions {
    pub family: Family,
    pub seed: u64,
    pub discrete_max: usize,
    pub cycle_max: usize,
    pub trees: usize,
    pub tree_max_n: usize,
    /// Add 10⁻³ to one distance of the first instance.
    pub inject_fault: bool,
    pub gap: GapOptions,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            family: Family::All,
            seed: 0,
            discrete_max: 12,
            cycle_max: 15,
            trees: 20,
            tree_max_n: 12,
            inject_fault: false,
            gap: GapOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleEntry {
    pub family: Family,
    pub label: String,
    pub n: usize,
    pub oracle_gamma: f64,
    pub pipeline_gamma: Option<f64>,
    pub rel_error: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSuiteReport {
    pub seed: u64,
    pub tolerance: f64,
    pub entries: Vec<OracleEntry>,
    pub mismatches: usize,
}

impl OracleSuiteReport {
    pub fn to_machine(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            let _ = writeln!(
                s,
                "{} {:<36} n={:<3} oracle={:<10} pipeline={:<10} rel_err={}",
                if e.pass { "PASS" } else { "FAIL" },
                e.label,
                e.n,
                sig6(e.oracle_gamma),
                e.pipeline_gamma.map(sig6).unwrap_or_else(|| "-".into()),
                e.rel_error.map(sig6).unwrap_or_else(|| "-".into()),
            );
        }
        let _ = writeln!(
            s,
            "{} instances, {} mismatches (tolerance {})",
            self.entries.len(),
            self.mismatches,
            sig6(self.tolerance)
        );
        s
    }

    pub fn check(&self) -> Result<()> {
        if self.mismatches == 0 {
            return Ok(());
        }
        let first = self
            .entries
            .iter()
            .find(|e| !e.pass)
            .expect("mismatch present");
        Err(Error::OracleMismatch(format!(
            "{} of {} instances disagree; first: {} (oracle {}, pipeline {:?})",
            self.mismatches,
            self.entries.len(),
            first.label,
            first.oracle_gamma,
            first.pipeline_gamma
        )))
    }
}

/// A seeded random tree with `2 ≤ n ≤ max_n` and weights in
/// [`TREE_WEIGHT_RANGE`].
pub fn seeded_tree(seed: u64, max_n: usize) -> Result<crate::metric::WeightedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_n.max(2));
    gen_random_tree(n, TREE_WEIGHT_RANGE, seed)
}

fn perturb(x: &MetricSpace) -> Result<MetricSpace> {
    let mut d = x.distances().clone();
    d.set(0, 1, d.get(0, 1) + 1e-3);
    crate::metric::validate_metric(&d)
}

pub fn run_oracle_suite(opts: &OracleOptions) -> Result<OracleSuiteReport> {
    let mut cases: Vec<(Family, String, MetricSpace, f64)> = Vec::new();
    let want = |f: Family| opts.family == Family::All || opts.family == f;
    if want(Family::Discrete) {
        for n in 2..=opts.discrete_max {
            cases.push((
                Family::Discrete,
                format!("discrete({n})"),
                gen_discrete(n)?,
                gamma_discrete(n)?.gamma,
            ));
        }
    }
    if want(Family::Cycles) {
        for n in 3..=opts.cycle_max {
            let x = path_metric(&gen_cycle(n)?)?;
            cases.push((
                Family::Cycles,
                format!("cycle({n})"),
                x,
                gamma_cycle(n)?.gamma,
            ));
        }
    }
    if want(Family::Trees) {
        for k in 0..opts.trees as u64 {
            let seed = opts.seed.wrapping_add(k);
            let t = seeded_tree(seed, opts.tree_max_n)?;
            let label = format!("random_tree(n={}, seed={seed})", t.n());
            cases.push((
                Family::Trees,
                label,
                path_metric(&t)?,
                gamma_tree(&t)?.gamma,
            ));
        }
    }
    if opts.inject_fault {
        if let Some(first) = cases.first_mut() {
            first.2 = perturb(&first.2)?;
            first.1.push_str(" [perturbed]");
        }
    }

    let mut entries = Vec::with_capacity(cases.len());
    for (family, label, x, oracle) in cases {
        let analysis = analyze(&power_matrix(&x, 1.0)?, &opts.gap)?;
        let pipeline = analysis.gamma();
        let rel_error = pipeline.map(|g| {
            if oracle == 0.0 {
                g.abs()
            } else {
                (g - oracle).abs() / oracle
            }
        });
        let pass = rel_error.is_some_and(|e| e <= ORACLE_REL_TOL);
        entries.push(OracleEntry {
            family,
            label,
            n: x.n(),
            oracle_gamma: oracle,
            pipeline_gamma: pipeline,
            rel_error,
            pass,
        });
    }
    let mismatches = entries.iter().filter(|e| !e.pass).count();
    Ok(OracleSuiteReport {
        seed: opts.seed,
        tolerance: ORACLE_REL_TOL,
        entries,
        mismatches,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    pub sizes: Vec<usize>,
    pub naive_sizes: Vec<usize>,
    pub seed: u64,
    pub parallel: bool,
    pub bnb_budget: Option<u64>,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            sizes: vec![16, 20, 24],
            naive_sizes: vec![8, 10, 12],
            seed: 0,
            parallel: true,
            bnb_budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub beta: f64,
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveComparison {
    pub n: usize,
    pub gray_beta: f64,
    pub naive_beta: f64,
    pub same_maximizer: bool,
    pub gray_millis: f64,
    pub naive_millis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BnbRow {
    pub n: usize,
    pub budget: u64,
    pub beta: f64,
    pub certified: bool,
    pub nodes_expanded: u64,
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub parallel: bool,
    pub hypercube: Vec<BenchRow>,
    pub naive: Vec<NaiveComparison>,
    pub bnb: Vec<BnbRow>,
}

impl BenchReport {
    pub fn to_machine(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "hypercube enumeration ({})",
            if self.parallel {
                "parallel"
            } else {
                "sequential"
            }
        );
        for r in &self.hypercube {
            let _ = writeln!(
                s,
                "  n={:<3} beta={:<12} {:>10} ms",
                r.n,
                sig6(r.beta),
                sig6(r.millis)
            );
        }
        let _ = writeln!(s, "gray code vs naive");
        for r in &self.naive {
            let _ = writeln!(
                s,
                "  n={:<3} gray={:<12} naive={:<12} same s*={} gray {} ms, naive {} ms",
                r.n,
                sig6(r.gray_beta),
                sig6(r.naive_beta),
                r.same_maximizer,
                sig6(r.gray_millis),
                sig6(r.naive_millis)
            );
        }
        if !self.bnb.is_empty() {
            let _ = writeln!(s, "branch-and-bound");
        }
        for r in &self.bnb {
            let _ = writeln!(
                s,
                "  n={:<3} budget={} beta={} certified={} nodes={} {} ms",
                r.n,
                r.budget,
                sig6(r.beta),
                r.certified,
                r.nodes_expanded,
                sig6(r.millis)
            );
        }
        s
    }
}

/// `B` for a seeded random tree on `n` vertices.
pub fn random_tree_b(n: usize, seed: u64) -> Result<SymMatrix> {
    let x = path_metric(&gen_random_tree(n, TREE_WEIGHT_RANGE, seed)?)?;
    Ok(build_b(&power_matrix(&x, 1.0)?, &Tolerances::default())?.b)
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn run_bench(opts: &BenchOptions) -> Result<BenchReport> {
    let max_n = opts
        .sizes
        .iter()
        .chain(&opts.naive_sizes)
        .copied()
        .max()
        .unwrap_or(0);
    let eo = EnumOptions {
        max_n: max_n.max(crate::gap::DEFAULT_MAX_ENUM_N),
        parallel: opts.parallel,
    };
    let mut hypercube = Vec::new();
    for &n in &opts.sizes {
        let b = random_tree_b(n, opts.seed)?;
        let start = Instant::now();
        let (beta, _) = beta_hypercube(&b, &eo)?;
        hypercube.push(BenchRow {
            n,
            beta,
            millis: millis(start),
        });
    }
    let mut naive = Vec::new();
    for &n in &opts.naive_sizes {
        let b = random_tree_b(n, opts.seed)?;
        let start = Instant::now();
        let (gray_beta, gs) = beta_hypercube(&b, &eo)?;
        let gray_millis = millis(start);
        let start = Instant::now();
        let (naive_beta, ns) = beta_hypercube_naive(&b)?;
        naive.push(NaiveComparison {
            n,
            gray_beta,
            naive_beta,
            same_maximizer: gs == ns,
            gray_millis,
            naive_millis: millis(start),
        });
    }
    let mut bnb = Vec::new();
    if let Some(budget) = opts.bnb_budget {
        for &n in &opts.sizes {
            let b = random_tree_b(n, opts.seed)?;
            let start = Instant::now();
            let r = branch_and_bound(&b, budget)?;
            bnb.push(BnbRow {
                n,
                budget,
                beta: r.beta,
                certified: r.certified,
                nodes_expanded: r.nodes_expanded,
                millis: millis(start),
            });
        }
    }
    Ok(BenchReport {
        parallel: opts.parallel,
        hypercube,
        naive,
        bnb,
    })
}
