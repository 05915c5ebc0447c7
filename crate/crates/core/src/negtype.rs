//! Negative type on the hyperplane `F = {x : (x|u) = 0}` and strictness.
//!
//! For a symmetric `A` that is negative semidefinite on `F` but has a
//! positive direction on ℝⁿ, strictness is equivalent to `A` being
//! nonsingular with `(A⁻¹u|u) ≠ 0`. In that case `M = (A⁻¹u|u)⁻¹` is the
//! maximum of `(Ax|x)` over `F₁ = {x : (x|u) = 1}`, attained only at
//! `z = M·A⁻¹u`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, eigenvalues_sym, factor, norm1, SymMatrix};
use crate::metric::NegTypeMatrix;

/// Tolerances for the classification. All are relative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Pivot threshold relative to `max|A|`.
    pub singular: f64,
    /// Projected eigenvalues above `eig · max|A|` count as positive.
    pub eig: f64,
    /// `|(A⁻¹u|u)|` at or below `strict · max|A⁻¹| · ‖u‖₁²` counts as zero.
    pub strict: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            singular: linalg::DEFAULT_SINGULAR_TOL,
            eig: 1e-9,
            strict: 1e-9,
        }
    }
}

impl Tolerances {
    /// Same relative tolerance for every test.
    pub fn uniform(tol: f64) -> Self {
        Self {
            singular: tol,
            eig: tol,
            strict: tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    NotNegativeType,
    NegativeTypeNonStrict,
    StrictNegativeType,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::NotNegativeType => "not of negative type",
            Verdict::NegativeTypeNonStrict => "negative type, not strict",
            Verdict::StrictNegativeType => "strict negative type",
        })
    }
}

/// Quantities that landed within a factor of ten of their threshold.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarginalFlags {
    pub spectrum: bool,
    pub singularity: bool,
    pub strictness: bool,
}

impl MarginalFlags {
    pub fn any(&self) -> bool {
        self.spectrum || self.singularity || self.strictness
    }
}

fn near_threshold(value: f64, threshold: f64) -> bool {
    value > threshold / 10.0 && value <= threshold * 10.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct NegTypeReport {
    pub verdict: Verdict,
    /// Spectrum of `A` restricted to `F`, ascending.
    pub projected_spectrum: Vec<f64>,
    pub has_positive_direction: bool,
    pub min_pivot_ratio: f64,
    pub ainv_u: Option<Vec<f64>>,
    pub ainv_u_dot_u: Option<f64>,
    pub m: Option<f64>,
    pub z: Option<Vec<f64>>,
    pub marginal: MarginalFlags,
    /// `A⁻¹` when `A` is nonsingular.
    pub a_inv: Option<SymMatrix>,
}

/// The matrices built from a strict classification.
#[derive(Debug, Clone, PartialEq)]
pub struct GapMatrices {
    /// `(1/M) z zᵀ − A⁻¹`, PSD with kernel `[u]`.
    pub b: SymMatrix,
    /// `M u uᵀ − A`, PSD with kernel `[z]`.
    pub c: SymMatrix,
    pub m: f64,
    pub z: Vec<f64>,
    pub u: Vec<f64>,
    pub a_inv: SymMatrix,
}

/// Householder reflector `H = I − 2vvᵀ/(vᵀv)` with `H e₁ ∝ u`. Columns
/// `1..n` of `H` are an orthonormal basis of `u^⊥`.
fn householder_for(u: &[f64]) -> Result<Vec<f64>> {
    let norm = linalg::norm2(u);
    if norm == 0.0 {
        return Err(Error::ZeroFunctional);
    }
    let mut v = u.to_vec();
    v[0] += if u[0] >= 0.0 { norm } else { -norm };
    Ok(v)
}

/// Orthonormal basis of `F`, as `n − 1` vectors of length `n`.
pub fn basis_of_f(u: &[f64]) -> Result<Vec<Vec<f64>>> {
    let v = householder_for(u)?;
    let n = u.len();
    let tau = 2.0 / dot(&v, &v);
    Ok((1..n)
        .map(|c| {
            (0..n)
                .map(|r| (if r == c { 1.0 } else { 0.0 }) - tau * v[r] * v[c])
                .collect()
        })
        .collect())
}

/// `QᵀAQ` for an orthonormal basis `Q` of `F`.
pub fn project_to_f(a: &SymMatrix, u: &[f64]) -> Result<SymMatrix> {
    let n = a.n();
    if u.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.len(),
        });
    }
    let v = householder_for(u)?;
    if n == 1 {
        return Err(Error::InvalidSize("F is zero-dimensional for n = 1".into()));
    }
    // H A H = A − τ v wᵀ − τ w vᵀ + τ² (vᵀAv) v vᵀ with w = A v.
    let tau = 2.0 / dot(&v, &v);
    let w = a.mul_vec(&v)?;
    let vav = dot(&v, &w);
    Ok(SymMatrix::from_fn(n - 1, |i, j| {
        let (r, c) = (i + 1, j + 1);
        a.get(r, c) - tau * (v[r] * w[c] + w[r] * v[c]) + tau * tau * vav * v[r] * v[c]
    }))
}

/// Classifies `A` by negative type on `F` and decides strictness.
pub fn classify(ntm: &NegTypeMatrix, tols: &Tolerances) -> Result<NegTypeReport> {
    let a = &ntm.a;
    let u = &ntm.u;
    let scale = a.max_abs();

    let full = eigenvalues_sym(a);
    let lambda_max = *full.last().expect("n >= 1");
    let has_positive_direction = lambda_max > tols.eig * scale;
    if !has_positive_direction {
        return Err(Error::PositiveDirectionMissing(lambda_max));
    }

    let projected_spectrum = eigenvalues_sym(&project_to_f(a, u)?);
    let proj_max = *projected_spectrum.last().expect("n >= 2");
    let eig_threshold = tols.eig * scale;
    let mut marginal = MarginalFlags {
        spectrum: near_threshold(proj_max, eig_threshold),
        ..Default::default()
    };

    let f = factor(a, tols.singular);
    let min_pivot_ratio = f.min_pivot_ratio();
    marginal.singularity = near_threshold(min_pivot_ratio, tols.singular);

    let mut report = NegTypeReport {
        verdict: Verdict::NotNegativeType,
        projected_spectrum,
        has_positive_direction,
        min_pivot_ratio,
        ainv_u: None,
        ainv_u_dot_u: None,
        m: None,
        z: None,
        marginal,
        a_inv: None,
    };

    if !f.is_singular() {
        let a_inv = f.invert()?;
        let ainv_u = a_inv.mul_vec(u)?;
        let s = dot(&ainv_u, u);
        report.ainv_u_dot_u = Some(s);
        report.ainv_u = Some(ainv_u);
        report.a_inv = Some(a_inv);
    }

    if proj_max > eig_threshold {
        return Ok(report);
    }

    report.verdict = Verdict::NegativeTypeNonStrict;
    let (Some(a_inv), Some(ainv_u), Some(s)) = (&report.a_inv, &report.ainv_u, report.ainv_u_dot_u)
    else {
        return Ok(report);
    };
    let strict_threshold = tols.strict * a_inv.max_abs() * norm1(u).powi(2);
    report.marginal.strictness = near_threshold(s.abs(), strict_threshold);
    if s.abs() <= strict_threshold {
        return Ok(report);
    }
    let m = 1.0 / s;
    report.z = Some(ainv_u.iter().map(|v| m * v).collect());
    report.m = Some(m);
    report.verdict = Verdict::StrictNegativeType;
    Ok(report)
}

/// `M` and `z`, requiring a strict verdict.
pub fn compute_m_z(ntm: &NegTypeMatrix, tols: &Tolerances) -> Result<(f64, Vec<f64>)> {
    let report = classify(ntm, tols)?;
    match (report.verdict, report.m, report.z) {
        (Verdict::StrictNegativeType, Some(m), Some(z)) => Ok((m, z)),
        _ => Err(Error::NotStrict),
    }
}

/// Builds `B` and `C` from an existing strict report.
pub fn gap_matrices(ntm: &NegTypeMatrix, report: &NegTypeReport) -> Result<GapMatrices> {
    let (Verdict::StrictNegativeType, Some(m), Some(z), Some(a_inv)) =
        (report.verdict, report.m, &report.z, &report.a_inv)
    else {
        return Err(Error::NotStrict);
    };
    let b = SymMatrix::outer(z).scale(1.0 / m).add_scaled(-1.0, a_inv)?;
    let c = SymMatrix::outer(&ntm.u).scale(m).add_scaled(-1.0, &ntm.a)?;
    Ok(GapMatrices {
        b,
        c,
        m,
        z: z.clone(),
        u: ntm.u.clone(),
        a_inv: a_inv.clone(),
    })
}

pub fn build_b(ntm: &NegTypeMatrix, tols: &Tolerances) -> Result<GapMatrices> {
    gap_matrices(ntm, &classify(ntm, tols)?)
}

/// Oscillation of `x` with respect to `u`: the largest of
/// `|uᵢxⱼ − uⱼxᵢ| / (|uᵢ| + |uⱼ|)` over `i, j ∈ supp u` and `|xᵢ|` over
/// `i ∉ supp u`. For `u = 1` this is `maxᵢⱼ |xᵢ − xⱼ| / 2`.
pub fn oscillation(x: &[f64], u: &[f64]) -> Result<f64> {
    if x.len() != u.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: x.len(),
        });
    }
    if u.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroFunctional);
    }
    if u.iter().all(|&v| v == 1.0) {
        let (lo, hi) = x
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        return Ok((hi - lo) / 2.0);
    }
    let support: Vec<usize> = (0..u.len()).filter(|&i| u[i] != 0.0).collect();
    let mut o: f64 = 0.0;
    for (a, &i) in support.iter().enumerate() {
        for &j in &support[a + 1..] {
            o = o.max((u[i] * x[j] - u[j] * x[i]).abs() / (u[i].abs() + u[j].abs()));
        }
    }
    for (i, &ui) in u.iter().enumerate() {
        if ui == 0.0 {
            o = o.max(x[i].abs());
        }
    }
    Ok(o)
}
