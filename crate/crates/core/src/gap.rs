//! The negative type gap `Γ = 2/β`.
//!
//! `β` is computed three ways from `B = (1/M) z zᵀ − A⁻¹`:
//!
//! * the maximum of `(Bs|s)` over sign vectors `s ∈ {−1, 1}ⁿ`,
//! * the `∞ → 1` operator norm `max ‖Bs‖₁`,
//! * four times the maximum of `(Bx|x)` over `x ∈ {0, 1}ⁿ`.
//!
//! The supremum of `(−Ax|x)` over `x ∈ F` with `o(Ax) ≤ 1` is checked through
//! the witness `y₀`, which attains it.
//!
//! Sign vectors are encoded as masks: bit `n − 1 − i` is set iff `sᵢ = −1`, so
//! integer order on masks is lexicographic order with `+1 < −1`. Among
//! maximizers the smallest mask with `s₁ = +1` wins.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, eigenvalues_sym, norm1, SymMatrix};
use crate::metric::{power_matrix, MetricSpace, NegTypeMatrix};
use crate::negtype::{
    classify, gap_matrices, oscillation, GapMatrices, NegTypeReport, Tolerances, Verdict,
};

pub const DEFAULT_MAX_ENUM_N: usize = 24;
pub const DEFAULT_BNB_BUDGET: u64 = 10_000_000;

/// Running values are recomputed from scratch after this many flips.
const RECOMPUTE_INTERVAL: u64 = 1 << 16;
/// Number of leading free bits fixed per enumeration block.
const PARTITION_BITS: usize = 6;
/// Objective values within this fraction of `Σ|Bᵢⱼ|` are ties.
const TIE_REL: f64 = 1e-10;
/// Masks are `u64`.
const MAX_MASK_N: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Enumerate,
    Opnorm,
    Binary,
    All,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "enumerate" => Ok(Method::Enumerate),
            "opnorm" => Ok(Method::Opnorm),
            "binary" => Ok(Method::Binary),
            "all" => Ok(Method::All),
            other => Err(Error::Parse(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumOptions {
    pub max_n: usize,
    pub parallel: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        Self {
            max_n: DEFAULT_MAX_ENUM_N,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapOptions {
    pub method: Method,
    pub enumeration: EnumOptions,
    /// Fall back to branch-and-bound above `enumeration.max_n`.
    pub bnb: bool,
    pub bnb_budget: u64,
    pub tols: Tolerances,
}

impl Default for GapOptions {
    fn default() -> Self {
        Self {
            method: Method::All,
            enumeration: EnumOptions::default(),
            bnb: false,
            bnb_budget: DEFAULT_BNB_BUDGET,
            tols: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapResult {
    pub gamma: f64,
    pub beta: f64,
    pub s_star: Vec<i8>,
    /// Unnormalized: `‖y₀‖₁ = β`.
    pub witness_y0: Vec<f64>,
    pub beta_by_hypercube: Option<f64>,
    pub beta_by_opnorm: Option<f64>,
    pub beta_by_binary: Option<f64>,
    pub beta_by_bnb: Option<f64>,
    /// False only when branch-and-bound ran out of budget.
    pub certified: bool,
    pub method: String,
    pub wall_time: Duration,
}

/// Classification plus, for strict inputs, the gap.
#[derive(Debug, Clone, PartialEq)]
pub struct GapAnalysis {
    pub report: NegTypeReport,
    pub matrices: Option<GapMatrices>,
    pub gap: Option<GapResult>,
}

impl GapAnalysis {
    /// `Γ`: positive when strict, zero when negative type but not strict,
    /// absent otherwise.
    pub fn gamma(&self) -> Option<f64> {
        match self.report.verdict {
            Verdict::NotNegativeType => None,
            Verdict::NegativeTypeNonStrict => Some(0.0),
            Verdict::StrictNegativeType => self.gap.as_ref().map(|g| g.gamma),
        }
    }
}

fn tie_eps(b: &SymMatrix) -> f64 {
    let total: f64 = (0..b.n()).map(|i| norm1(b.row(i))).sum();
    TIE_REL * total.max(f64::MIN_POSITIVE)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Best {
    value: f64,
    mask: u64,
}

impl Best {
    const NONE: Best = Best {
        value: f64::NEG_INFINITY,
        mask: u64::MAX,
    };

    fn offer(&mut self, value: f64, mask: u64, eps: f64) {
        if value > self.value + eps || (value >= self.value - eps && mask < self.mask) {
            *self = Best { value, mask };
        }
    }

    fn merge(mut self, other: Best, eps: f64) -> Best {
        self.offer(other.value, other.mask, eps);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Domain {
    /// `{−1, 1}ⁿ` with `s₁ = +1`.
    Signs,
    /// `{0, 1}ⁿ`.
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Objective {
    Quadratic,
    L1,
}

fn point_from_mask(mask: u64, n: usize, domain: Domain) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let set = (mask >> (n - 1 - i)) & 1 == 1;
            match (domain, set) {
                (Domain::Signs, false) => 1.0,
                (Domain::Signs, true) => -1.0,
                (Domain::Binary, false) => 0.0,
                (Domain::Binary, true) => 1.0,
            }
        })
        .collect()
}

/// Sign vector for a mask.
pub fn signs_from_mask(mask: u64, n: usize) -> Vec<i8> {
    point_from_mask(mask, n, Domain::Signs)
        .into_iter()
        .map(|v| v as i8)
        .collect()
}

pub fn mask_from_signs(s: &[i8]) -> u64 {
    let n = s.len();
    s.iter()
        .enumerate()
        .filter(|(_, &v)| v < 0)
        .fold(0u64, |m, (i, _)| m | 1 << (n - 1 - i))
}

fn objective_value(b: &SymMatrix, x: &[f64], objective: Objective) -> f64 {
    let g = b.mul_vec(x).expect("dimension checked");
    match objective {
        Objective::Quadratic => dot(&g, x),
        Objective::L1 => norm1(&g),
    }
}

/// Gray-code scan of one block: the high bits of the mask are `prefix`, the
/// low `low_bits` bits run through all values.
fn scan_block(
    b: &SymMatrix,
    domain: Domain,
    objective: Objective,
    prefix: u64,
    low_bits: usize,
    eps: f64,
) -> Best {
    let n = b.n();
    let mut mask = prefix << low_bits;
    let mut x = point_from_mask(mask, n, domain);
    let mut g = b.mul_vec(&x).expect("dimension checked");
    let mut quad = dot(&g, &x);
    let value = |g: &[f64], quad: f64| match objective {
        Objective::Quadratic => quad,
        Objective::L1 => norm1(g),
    };
    let mut best = Best::NONE;
    best.offer(value(&g, quad), mask, eps);

    let steps: u64 = 1 << low_bits;
    for t in 1..steps {
        let bit = t.trailing_zeros() as usize;
        mask ^= 1 << bit;
        let i = n - 1 - bit;
        let delta = match domain {
            Domain::Signs => -2.0 * x[i],
            Domain::Binary => 1.0 - 2.0 * x[i],
        };
        quad += delta * (2.0 * g[i] + delta * b.get(i, i));
        x[i] += delta;
        for (gj, bij) in g.iter_mut().zip(b.row(i)) {
            *gj += delta * bij;
        }
        if t % RECOMPUTE_INTERVAL == 0 {
            g = b.mul_vec(&x).expect("dimension checked");
            quad = dot(&g, &x);
        }
        best.offer(value(&g, quad), mask, eps);
    }
    best
}

/// Enumerates the domain in `2^k` independent blocks and reduces them in
/// block order, so the parallel and sequential results agree bit for bit.
fn enumerate(
    b: &SymMatrix,
    domain: Domain,
    objective: Objective,
    opts: &EnumOptions,
) -> Result<(f64, u64)> {
    let n = b.n();
    if n > opts.max_n || n > MAX_MASK_N {
        return Err(Error::TooLarge {
            n,
            max_n: opts.max_n.min(MAX_MASK_N),
        });
    }
    let free = match domain {
        Domain::Signs => n - 1,
        Domain::Binary => n,
    };
    let high = PARTITION_BITS.min(free);
    let low = free - high;
    let eps = tie_eps(b);
    let blocks: Vec<Best> = if opts.parallel {
        (0..1u64 << high)
            .into_par_iter()
            .map(|p| scan_block(b, domain, objective, p, low, eps))
            .collect()
    } else {
        (0..1u64 << high)
            .map(|p| scan_block(b, domain, objective, p, low, eps))
            .collect()
    };
    let best = blocks
        .into_iter()
        .fold(Best::NONE, |acc, blk| acc.merge(blk, eps));
    let x = point_from_mask(best.mask, n, domain);
    Ok((objective_value(b, &x, objective), best.mask))
}

/// `β = max (Bs|s)` over sign vectors, with its tie-broken maximizer.
pub fn beta_hypercube(b: &SymMatrix, opts: &EnumOptions) -> Result<(f64, Vec<i8>)> {
    let (beta, mask) = enumerate(b, Domain::Signs, Objective::Quadratic, opts)?;
    Ok((beta, signs_from_mask(mask, b.n())))
}

/// `β = max ‖Bs‖₁`, the `∞ → 1` operator norm.
pub fn beta_opnorm(b: &SymMatrix, opts: &EnumOptions) -> Result<f64> {
    Ok(enumerate(b, Domain::Signs, Objective::L1, opts)?.0)
}

/// `β = 4 max (Bx|x)` over `x ∈ {0, 1}ⁿ`.
pub fn beta_binary(b: &SymMatrix, opts: &EnumOptions) -> Result<f64> {
    Ok(4.0 * enumerate(b, Domain::Binary, Objective::Quadratic, opts)?.0)
}

/// Maximizer of `(Bx|x)` over `{0, 1}ⁿ` and its value (not scaled by 4).
pub fn binary_argmax(b: &SymMatrix, opts: &EnumOptions) -> Result<(f64, Vec<u8>)> {
    let (v, mask) = enumerate(b, Domain::Binary, Objective::Quadratic, opts)?;
    let x = point_from_mask(mask, b.n(), Domain::Binary)
        .into_iter()
        .map(|v| v as u8)
        .collect();
    Ok((v, x))
}

/// Reference enumeration: every sign vector with `s₁ = +1` in lexicographic
/// order, each evaluated from scratch in `O(n²)`.
pub fn beta_hypercube_naive(b: &SymMatrix) -> Result<(f64, Vec<i8>)> {
    let n = b.n();
    if n > MAX_MASK_N {
        return Err(Error::TooLarge {
            n,
            max_n: MAX_MASK_N,
        });
    }
    let eps = tie_eps(b);
    let mut best = Best::NONE;
    for mask in 0..(1u64 << (n - 1)) {
        let s = point_from_mask(mask, n, Domain::Signs);
        let mut v = 0.0;
        for i in 0..n {
            for j in 0..n {
                v += s[i] * b.get(i, j) * s[j];
            }
        }
        best.offer(v, mask, eps);
    }
    let s = point_from_mask(best.mask, n, Domain::Signs);
    Ok((
        objective_value(b, &s, Objective::Quadratic),
        signs_from_mask(best.mask, n),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BnbResult {
    pub beta: f64,
    pub s_star: Vec<i8>,
    pub certified: bool,
    pub nodes_expanded: u64,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    bound: f64,
    /// Number of fixed leading coordinates.
    depth: usize,
    mask: u64,
    /// `(B_FF f | f)` for the fixed prefix `f`.
    fixed_value: f64,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| other.mask.cmp(&self.mask))
            .then_with(|| self.depth.cmp(&other.depth))
    }
}

/// Greedy completion followed by single-flip ascent; seeds the incumbent.
fn heuristic_incumbent(b: &SymMatrix) -> (f64, u64) {
    let n = b.n();
    let mut s = vec![1.0; n];
    let mut h = b.row(0).to_vec();
    for k in 1..n {
        s[k] = if h[k] >= 0.0 { 1.0 } else { -1.0 };
        for (hj, bkj) in h.iter_mut().zip(b.row(k)) {
            *hj += s[k] * bkj;
        }
    }
    let mut g = b.mul_vec(&s).expect("dimension checked");
    loop {
        // Flipping i changes the value by −4 sᵢ gᵢ + 4 Bᵢᵢ.
        let gain = |i: usize| -4.0 * s[i] * g[i] + 4.0 * b.get(i, i);
        let Some(i) = (0..n)
            .filter(|&i| gain(i) > 1e-12 * (1.0 + g[i].abs()))
            .max_by(|&a, &c| gain(a).total_cmp(&gain(c)))
        else {
            break;
        };
        let delta = -2.0 * s[i];
        s[i] = -s[i];
        for (gj, bij) in g.iter_mut().zip(b.row(i)) {
            *gj += delta * bij;
        }
    }
    if s[0] < 0.0 {
        s.iter_mut().for_each(|v| *v = -*v);
    }
    let signs: Vec<i8> = s.iter().map(|&v| v as i8).collect();
    (
        objective_value(b, &s, Objective::Quadratic),
        mask_from_signs(&signs),
    )
}

/// Best-first branch-and-bound over sign prefixes for `max (Bs|s)`.
///
/// At a node with fixed prefix `f` and free block `r`, the bound is
/// `(B_FF f|f) + 2 Σⱼ |(B_RF f)ⱼ| + λ_max(B_RR) · |r|`. `budget` caps the
/// number of expanded nodes; when it runs out the best vector found so far
/// is returned with `certified = false`.
pub fn branch_and_bound(b: &SymMatrix, budget: u64) -> Result<BnbResult> {
    let n = b.n();
    if n > MAX_MASK_N {
        return Err(Error::TooLarge {
            n,
            max_n: MAX_MASK_N,
        });
    }
    let eps = tie_eps(b);
    // Largest eigenvalue of the trailing block B[k.., k..].
    let tail_lambda: Vec<f64> = (0..=n)
        .map(|k| {
            if k >= n {
                0.0
            } else {
                let idx: Vec<usize> = (k..n).collect();
                eigenvalues_sym(&b.principal(&idx))
                    .last()
                    .copied()
                    .unwrap_or(0.0)
                    .max(0.0)
            }
        })
        .collect();

    let (v0, m0) = heuristic_incumbent(b);
    let mut best = Best {
        value: v0,
        mask: m0,
    };

    let bound_of = |depth: usize, fixed_value: f64, h: &[f64]| -> f64 {
        let cross: f64 = h[depth..].iter().map(|v| v.abs()).sum();
        fixed_value + 2.0 * cross + tail_lambda[depth] * (n - depth) as f64
    };

    let mut heap = BinaryHeap::new();
    let h0 = b.row(0).to_vec();
    let root = Node {
        bound: bound_of(1, b.get(0, 0), &h0),
        depth: 1,
        mask: 0,
        fixed_value: b.get(0, 0),
    };
    heap.push(root);

    let mut expanded = 0u64;
    let mut certified = true;
    while let Some(node) = heap.pop() {
        if node.bound < best.value - eps {
            break;
        }
        if expanded >= budget {
            certified = false;
            break;
        }
        expanded += 1;

        let k = node.depth;
        let mut h = vec![0.0; n];
        for i in 0..k {
            let si = if (node.mask >> (n - 1 - i)) & 1 == 1 {
                -1.0
            } else {
                1.0
            };
            for (hj, bij) in h.iter_mut().zip(b.row(i)) {
                *hj += si * bij;
            }
        }
        for sign in [1.0, -1.0] {
            let mask = if sign < 0.0 {
                node.mask | 1 << (n - 1 - k)
            } else {
                node.mask
            };
            let fixed_value = node.fixed_value + 2.0 * sign * h[k] + b.get(k, k);
            if k + 1 == n {
                best.offer(fixed_value, mask, eps);
                continue;
            }
            let child_h: Vec<f64> = h
                .iter()
                .zip(b.row(k))
                .map(|(hj, bkj)| hj + sign * bkj)
                .collect();
            let bound = bound_of(k + 1, fixed_value, &child_h);
            if bound >= best.value - eps {
                heap.push(Node {
                    bound,
                    depth: k + 1,
                    mask,
                    fixed_value,
                });
            }
        }
    }

    let s = point_from_mask(best.mask, n, Domain::Signs);
    Ok(BnbResult {
        beta: objective_value(b, &s, Objective::Quadratic),
        s_star: signs_from_mask(best.mask, n),
        certified,
        nodes_expanded: expanded,
    })
}

/// `y₀ = ((x|z)/M) z − A⁻¹x` for `x` the projection of `s*` onto `F`. It lies
/// in `F`, has `o(Ay₀) = o(s*) ≤ 1`, and `‖y₀‖₁ = (−Ay₀|y₀) = β`.
pub fn make_witness(gm: &GapMatrices, s_star: &[i8]) -> Result<Vec<f64>> {
    let n = gm.u.len();
    if s_star.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: s_star.len(),
        });
    }
    let s: Vec<f64> = s_star.iter().map(|&v| v as f64).collect();
    let t = dot(&s, &gm.u) / dot(&gm.u, &gm.u);
    let x: Vec<f64> = s.iter().zip(&gm.u).map(|(si, ui)| si - t * ui).collect();
    let xz = dot(&x, &gm.z) / gm.m;
    let ainv_x = gm.a_inv.mul_vec(&x)?;
    Ok(gm
        .z
        .iter()
        .zip(&ainv_x)
        .map(|(zi, ai)| xz * zi - ai)
        .collect())
}

/// Left side of the gap inequality,
/// `(Γ/2)(Σ|αᵢ|)² + Σ αᵢαⱼ A(i, j)`.
pub fn gap_form(a: &SymMatrix, gamma: f64, alpha: &[f64]) -> Result<f64> {
    let l1 = norm1(alpha);
    Ok(0.5 * gamma * l1 * l1 + dot(&a.mul_vec(alpha)?, alpha))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalityCheck {
    pub inflated_gamma: f64,
    /// Gap form at `Γ` on the witness; zero up to rounding.
    pub value_at_gamma: f64,
    /// Gap form at the inflated constant; positive when `Γ` is maximal.
    pub value_at_inflated: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub trials: usize,
    pub passed: usize,
    /// Largest gap form divided by `(Σ|αᵢ|)² · max dᵖ`.
    pub max_scaled_slack: f64,
    pub zero_vector_value: f64,
    pub maximality: Option<MaximalityCheck>,
}

impl InequalityCheck {
    pub fn all_pass(&self) -> bool {
        self.passed == self.trials
            && self.zero_vector_value <= 0.0
            && self.maximality.as_ref().is_none_or(|m| m.violated)
    }
}

pub const INEQUALITY_SLACK: f64 = 1e-9;
pub const MAXIMALITY_INFLATION: f64 = 1e-4;

/// Checks the gap inequality on `trials` random `α` with `Σαᵢ = 0`, and, given
/// the witness, that inflating `Γ` by `1 + 10⁻⁴` breaks it.
pub fn verify_gap_inequality(
    x: &MetricSpace,
    p: f64,
    gamma: f64,
    trials: usize,
    seed: u64,
    witness: Option<&[f64]>,
) -> Result<InequalityCheck> {
    let a = power_matrix(x, p)?.a;
    let n = a.n();
    let scale = a.max_abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    let mut max_scaled_slack = f64::NEG_INFINITY;
    for _ in 0..trials {
        let mut alpha: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mean = alpha.iter().sum::<f64>() / n as f64;
        alpha.iter_mut().for_each(|v| *v -= mean);
        let l1 = norm1(&alpha);
        let value = gap_form(&a, gamma, &alpha)?;
        let scaled = value / (l1 * l1 * scale);
        max_scaled_slack = max_scaled_slack.max(scaled);
        if scaled <= INEQUALITY_SLACK {
            passed += 1;
        }
    }
    let zero_vector_value = gap_form(&a, gamma, &vec![0.0; n])?;
    let maximality = match witness {
        Some(y0) => {
            let inflated_gamma = gamma * (1.0 + MAXIMALITY_INFLATION);
            let value_at_inflated = gap_form(&a, inflated_gamma, y0)?;
            Some(MaximalityCheck {
                inflated_gamma,
                value_at_gamma: gap_form(&a, gamma, y0)?,
                value_at_inflated,
                violated: value_at_inflated > 0.0,
            })
        }
        None => None,
    };
    Ok(InequalityCheck {
        trials,
        passed,
        max_scaled_slack,
        zero_vector_value,
        maximality,
    })
}

/// `β` and `Γ` from the gap matrices of a strict input.
pub fn gap_from_matrices(gm: &GapMatrices, opts: &GapOptions) -> Result<GapResult> {
    let start = Instant::now();
    let b = &gm.b;
    let n = b.n();
    let eo = &opts.enumeration;

    let mut result = GapResult {
        gamma: f64::NAN,
        beta: f64::NAN,
        s_star: Vec::new(),
        witness_y0: Vec::new(),
        beta_by_hypercube: None,
        beta_by_opnorm: None,
        beta_by_binary: None,
        beta_by_bnb: None,
        certified: true,
        method: String::new(),
        wall_time: Duration::ZERO,
    };

    if n > eo.max_n {
        if !opts.bnb {
            return Err(Error::TooLarge { n, max_n: eo.max_n });
        }
        let r = branch_and_bound(b, opts.bnb_budget)?;
        result.beta = r.beta;
        result.s_star = r.s_star;
        result.beta_by_bnb = Some(r.beta);
        result.certified = r.certified;
        result.method = format!(
            "branch-and-bound ({} nodes, {})",
            r.nodes_expanded,
            if r.certified {
                "certified"
            } else {
                "budget exhausted"
            }
        );
    } else {
        let run_hyper = matches!(opts.method, Method::Enumerate | Method::All);
        let run_op = matches!(opts.method, Method::Opnorm | Method::All);
        let run_bin = matches!(opts.method, Method::Binary | Method::All);
        if run_hyper {
            let (beta, s) = beta_hypercube(b, eo)?;
            result.beta = beta;
            result.s_star = s;
            result.beta_by_hypercube = Some(beta);
        }
        if run_op {
            let (value, mask) = enumerate(b, Domain::Signs, Objective::L1, eo)?;
            result.beta_by_opnorm = Some(value);
            if !run_hyper {
                result.beta = value;
                result.s_star = signs_from_mask(mask, n);
            }
        }
        if run_bin {
            let (value, mask) = enumerate(b, Domain::Binary, Objective::Quadratic, eo)?;
            result.beta_by_binary = Some(4.0 * value);
            if !run_hyper && !run_op {
                result.beta = 4.0 * value;
                let s: Vec<i8> = point_from_mask(mask, n, Domain::Binary)
                    .iter()
                    .map(|&x| if x == 1.0 { 1 } else { -1 })
                    .collect();
                result.s_star = if s[0] < 0 {
                    s.iter().map(|v| -v).collect()
                } else {
                    s
                };
            }
        }
        result.method = match opts.method {
            Method::All => "enumerate+opnorm+binary",
            Method::Enumerate => "enumerate",
            Method::Opnorm => "opnorm",
            Method::Binary => "binary",
        }
        .to_string();
    }

    result.gamma = 2.0 / result.beta;
    result.witness_y0 = make_witness(gm, &result.s_star)?;
    result.wall_time = start.elapsed();
    Ok(result)
}

/// Full pipeline on a power matrix: classify, then for strict inputs build
/// `B` and compute the gap.
pub fn analyze(ntm: &NegTypeMatrix, opts: &GapOptions) -> Result<GapAnalysis> {
    let report = classify(ntm, &opts.tols)?;
    if report.verdict != Verdict::StrictNegativeType {
        return Ok(GapAnalysis {
            report,
            matrices: None,
            gap: None,
        });
    }
    let gm = gap_matrices(ntm, &report)?;
    let gap = gap_from_matrices(&gm, opts)?;
    Ok(GapAnalysis {
        report,
        matrices: Some(gm),
        gap: Some(gap),
    })
}

/// Oscillation of `A y₀` with respect to `u`.
pub fn witness_oscillation(ntm: &NegTypeMatrix, y0: &[f64]) -> Result<f64> {
    oscillation(&ntm.a.mul_vec(y0)?, &ntm.u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{gen_cycle, gen_discrete, path_metric};
    use crate::negtype::build_b;

    fn b_of(x: &MetricSpace) -> GapMatrices {
        build_b(&power_matrix(x, 1.0).unwrap(), &Tolerances::default()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    const SEQ: EnumOptions = EnumOptions {
        max_n: DEFAULT_MAX_ENUM_N,
        parallel: false,
    };

    #[test]
    fn mask_round_trip() {
        let s = vec![1, 1, -1, -1];
        assert_eq!(mask_from_signs(&s), 0b0011);
        assert_eq!(signs_from_mask(0b0011, 4), s);
    }

    #[test]
    fn hypercube_discrete_spaces() {
        let b = I_minus_j(4);
        let (beta, s) = beta_hypercube(&b, &SEQ).unwrap();
        assert!(rel(beta, 4.0) < 1e-14);
        assert_eq!(s, vec![1, 1, -1, -1]);

        let b = I_minus_j(3);
        let (beta, _) = beta_hypercube(&b, &SEQ).unwrap();
        assert!(rel(beta, 8.0 / 3.0) < 1e-14);
    }

    #[allow(non_snake_case)]
    fn I_minus_j(n: usize) -> SymMatrix {
        SymMatrix::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 } - 1.0 / n as f64)
    }

    #[test]
    fn c5_binary_value() {
        let gm = b_of(&path_metric(&gen_cycle(5).unwrap()).unwrap());
        let (v, _) = binary_argmax(&gm.b, &SEQ).unwrap();
        assert!(rel(v, 14.0 / 5.0) < 1e-12);
        assert!(rel(beta_binary(&gm.b, &SEQ).unwrap(), 56.0 / 5.0) < 1e-12);
        let (beta, _) = beta_hypercube(&gm.b, &SEQ).unwrap();
        assert!(rel(beta, 56.0 / 5.0) < 1e-12);
        // Extreme binary points give zero.
        let zeros = vec![0.0; 5];
        let ones = vec![1.0; 5];
        assert!(objective_value(&gm.b, &zeros, Objective::Quadratic).abs() < 1e-12);
        assert!(objective_value(&gm.b, &ones, Objective::Quadratic).abs() < 1e-12);
    }

    #[test]
    fn opnorm_examples() {
        assert!(rel(beta_opnorm(&I_minus_j(4), &SEQ).unwrap(), 4.0) < 1e-14);
        let two = b_of(&gen_discrete(2).unwrap());
        assert!(rel(beta_opnorm(&two.b, &SEQ).unwrap(), 2.0) < 1e-14);
        assert_eq!(beta_opnorm(&SymMatrix::zeros(3), &SEQ).unwrap(), 0.0);
        assert!(rel(beta_binary(&two.b, &SEQ).unwrap(), 2.0) < 1e-14);
    }

    #[test]
    fn too_large_is_reported() {
        let opts = EnumOptions {
            max_n: 3,
            parallel: false,
        };
        assert_eq!(
            beta_hypercube(&I_minus_j(4), &opts),
            Err(Error::TooLarge { n: 4, max_n: 3 })
        );
        assert!(beta_opnorm(&I_minus_j(4), &opts).is_err());
        assert!(beta_binary(&I_minus_j(4), &opts).is_err());
    }

    #[test]
    fn witness_two_points() {
        let gm = b_of(&gen_discrete(2).unwrap());
        let y0 = make_witness(&gm, &[1, -1]).unwrap();
        assert!((y0[0] - 1.0).abs() < 1e-14 && (y0[1] + 1.0).abs() < 1e-14);
        let a = power_matrix(&gen_discrete(2).unwrap(), 1.0).unwrap();
        assert!(gap_form(&a.a, 1.0, &y0).unwrap().abs() < 1e-14);
    }

    #[test]
    fn witness_equality_discrete_three() {
        let x = gen_discrete(3).unwrap();
        let ntm = power_matrix(&x, 1.0).unwrap();
        let an = analyze(&ntm, &GapOptions::default()).unwrap();
        let g = an.gap.unwrap();
        assert!(rel(g.gamma, 0.75) < 1e-13);
        let eq = gap_form(&ntm.a, g.gamma, &g.witness_y0).unwrap();
        assert!(eq.abs() < 1e-6 * g.beta);
        // The form is 2-homogeneous, so scaling keeps equality; a larger
        // constant breaks it.
        let y: Vec<f64> = g.witness_y0.iter().map(|v| 0.5 * v).collect();
        assert!(gap_form(&ntm.a, g.gamma, &y).unwrap().abs() < 1e-6 * g.beta);
        assert!(gap_form(&ntm.a, 1.01 * g.gamma, &g.witness_y0).unwrap() > 0.0);
    }

    #[test]
    fn inequality_c5() {
        let x = path_metric(&gen_cycle(5).unwrap()).unwrap();
        let an = analyze(&power_matrix(&x, 1.0).unwrap(), &GapOptions::default()).unwrap();
        let g = an.gap.unwrap();
        assert!(rel(g.gamma, 5.0 / 28.0) < 1e-12);
        let chk = verify_gap_inequality(&x, 1.0, g.gamma, 1000, 3, Some(&g.witness_y0)).unwrap();
        assert_eq!(chk.passed, 1000);
        assert_eq!(chk.zero_vector_value, 0.0);
        assert!(chk.maximality.as_ref().unwrap().violated);
        assert!(chk.all_pass());
    }

    #[test]
    fn bnb_examples() {
        let r = branch_and_bound(&I_minus_j(10), DEFAULT_BNB_BUDGET).unwrap();
        assert!(r.certified);
        assert!(rel(r.beta, 10.0) < 1e-12);

        let gm = b_of(&path_metric(&gen_cycle(7).unwrap()).unwrap());
        let r = branch_and_bound(&gm.b, DEFAULT_BNB_BUDGET).unwrap();
        assert!(r.certified);
        assert!(rel(r.beta, 136.0 / 7.0) < 1e-9);

        let r = branch_and_bound(&gm.b, 0).unwrap();
        assert!(!r.certified);
        assert_eq!(r.nodes_expanded, 0);
    }

    #[test]
    fn non_strict_gamma_is_zero() {
        let x = path_metric(&gen_cycle(6).unwrap()).unwrap();
        let an = analyze(&power_matrix(&x, 1.0).unwrap(), &GapOptions::default()).unwrap();
        assert_eq!(an.report.verdict, Verdict::NegativeTypeNonStrict);
        assert_eq!(an.gamma(), Some(0.0));
        assert!(an.gap.is_none());
    }

    #[test]
    fn single_method_runs() {
        let x = path_metric(&gen_cycle(7).unwrap()).unwrap();
        let ntm = power_matrix(&x, 1.0).unwrap();
        for method in [Method::Enumerate, Method::Opnorm, Method::Binary] {
            let opts = GapOptions {
                method,
                ..Default::default()
            };
            let g = analyze(&ntm, &opts).unwrap().gap.unwrap();
            assert!(rel(g.beta, 136.0 / 7.0) < 1e-10, "{method:?}");
            assert_eq!(g.s_star[0], 1);
            let w = witness_oscillation(&ntm, &g.witness_y0).unwrap();
            assert!(w <= 1.0 + 1e-9);
        }
    }
}
