//! Dense symmetric linear algebra sized for a few hundred rows.
//!
//! Distance matrices are indefinite with a zero diagonal, so the factorization
//! is a Bunch–Kaufman `P A Pᵀ = L D Lᵀ` with 1×1 and 2×2 pivots rather than a
//! Cholesky. Eigenvalues come from cyclic Jacobi sweeps.

use crate::error::{Error, Result};

/// Default singularity threshold, relative to the max-entry norm.
pub const DEFAULT_SINGULAR_TOL: f64 = 1e-10;

/// Jacobi stops once the off-diagonal Frobenius norm drops below this
/// fraction of the full Frobenius norm.
const JACOBI_REL_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Symmetric `n × n` matrix with full row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "SymMatrix needs n >= 1");
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from `f(i, j)` evaluated on the upper triangle and
    /// mirrored, so the result is exactly symmetric.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    /// Builds a matrix from rows, rejecting ragged or asymmetric input.
    /// Symmetry is checked exactly.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidSize("matrix has no rows".into()));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    row: r,
                    len: row.len(),
                    n,
                });
            }
        }
        for (i, row) in rows.iter().enumerate() {
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteEntry { i, j });
            }
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, other) in rows.iter().enumerate().skip(i + 1) {
                if row[j] != other[i] {
                    return Err(Error::AsymmetricInput {
                        i,
                        j,
                        a: row[j],
                        b: other[i],
                    });
                }
            }
        }
        Ok(Self {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Rank-one matrix `x xᵀ`.
    pub fn outer(x: &[f64]) -> Self {
        Self::from_fn(x.len(), |i, j| x[i] * x[j])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// `self + c · other`.
    pub fn add_scaled(&self, c: f64, other: &SymMatrix) -> Result<Self> {
        check_dim(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + c * b)
                .collect(),
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, x.len())?;
        Ok((0..self.n).map(|i| dot(self.row(i), x)).collect())
    }

    /// Dense product `self · other`, row-major. The product of two symmetric
    /// matrices is generally not symmetric.
    pub fn mul_dense(&self, other: &SymMatrix) -> Result<Vec<Vec<f64>>> {
        check_dim(self.n, other.n)?;
        let n = self.n;
        let mut out = vec![vec![0.0; n]; n];
        for (i, out_row) in out.iter_mut().enumerate() {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Principal submatrix on `idx`.
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |a, b| self.get(idx[a], idx[b]))
    }

    /// Symmetric permutation `P A Pᵀ` with `(P A Pᵀ)(i, j) = A(perm[i], perm[j])`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        self.principal(perm)
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// `(m x | y)`.
pub fn quad_form(m: &SymMatrix, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(m.n, x.len())?;
    check_dim(m.n, y.len())?;
    Ok(dot(&m.mul_vec(x)?, y))
}

/// Largest absolute entry of `product − I`.
pub fn identity_error(product: &[Vec<f64>]) -> f64 {
    let mut err: f64 = 0.0;
    for (i, row) in product.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            err = err.max((v - target).abs());
        }
    }
    err
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Pivot {
    One,
    Two,
}

/// Bunch–Kaufman factorization `P A Pᵀ = L D Lᵀ`.
#[derive(Debug, Clone)]
pub struct Factorization {
    n: usize,
    /// Row `r` of the permuted system is row `perm[r]` of the original.
    perm: Vec<usize>,
    /// Unit lower triangular factor, row-major; the diagonal is implicit.
    l: Vec<f64>,
    /// Block diagonal `D`: diagonal and first subdiagonal.
    d_diag: Vec<f64>,
    d_sub: Vec<f64>,
    pivots: Vec<(usize, Pivot)>,
    singular: bool,
    min_pivot_ratio: f64,
}

impl Factorization {
    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Smallest pivot magnitude divided by the max-entry norm of the input.
    /// A 2×2 pivot contributes its smaller eigenvalue magnitude.
    pub fn min_pivot_ratio(&self) -> f64 {
        self.min_pivot_ratio
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if self.singular {
            return Err(Error::SingularSystem);
        }
        check_dim(self.n, b.len())?;
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();

        // L y = b'
        for i in 0..n {
            let mut s = y[i];
            for (k, yk) in y.iter().enumerate().take(i) {
                s -= self.l[i * n + k] * yk;
            }
            y[i] = s;
        }
        // D w = y
        for &(k, kind) in &self.pivots {
            match kind {
                Pivot::One => y[k] /= self.d_diag[k],
                Pivot::Two => {
                    let (a, b2, c) = (self.d_diag[k], self.d_sub[k], self.d_diag[k + 1]);
                    let det = a * c - b2 * b2;
                    let (r0, r1) = (y[k], y[k + 1]);
                    y[k] = (c * r0 - b2 * r1) / det;
                    y[k + 1] = (a * r1 - b2 * r0) / det;
                }
            }
        }
        // Lᵀ v = w
        for i in (0..n).rev() {
            let mut s = y[i];
            for (k, yk) in y.iter().enumerate().skip(i + 1) {
                s -= self.l[k * n + i] * yk;
            }
            y[i] = s;
        }
        let mut x = vec![0.0; n];
        for (r, &p) in self.perm.iter().enumerate() {
            x[p] = y[r];
        }
        Ok(x)
    }

    /// Inverse of the factored matrix, symmetrized.
    pub fn invert(&self) -> Result<SymMatrix> {
        if self.singular {
            return Err(Error::SingularSystem);
        }
        let n = self.n;
        let mut cols = Vec::with_capacity(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            cols.push(self.solve(&e)?);
            e[j] = 0.0;
        }
        Ok(SymMatrix::from_fn(n, |i, j| {
            0.5 * (cols[j][i] + cols[i][j])
        }))
    }
}

/// Factors `m`; singularity is reported through the result, not an error.
pub fn factor(m: &SymMatrix, tol: f64) -> Factorization {
    let n = m.n;
    let alpha = (1.0 + 17f64.sqrt()) / 8.0;
    let scale = m.max_abs();
    // Working array: columns < k hold L multipliers below the diagonal,
    // the trailing block holds the current Schur complement.
    let mut a = m.data.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut d_diag = vec![0.0; n];
    let mut d_sub = vec![0.0; n];
    let mut pivots = Vec::new();
    let mut min_pivot = f64::INFINITY;

    let at = |a: &Vec<f64>, i: usize, j: usize| a[i * n + j];

    let mut k = 0;
    while k < n {
        let absakk = at(&a, k, k).abs();
        let (mut imax, mut colmax) = (k, 0.0);
        for i in (k + 1)..n {
            let v = at(&a, i, k).abs();
            if v > colmax {
                colmax = v;
                imax = i;
            }
        }

        if absakk.max(colmax) == 0.0 {
            // Zero column: 1×1 zero pivot, nothing to eliminate.
            d_diag[k] = 0.0;
            min_pivot = 0.0;
            pivots.push((k, Pivot::One));
            k += 1;
            continue;
        }

        let (kp, kstep) = if absakk >= alpha * colmax {
            (k, 1)
        } else {
            let mut rowmax: f64 = 0.0;
            for j in k..n {
                if j != imax {
                    rowmax = rowmax.max(at(&a, imax, j).abs());
                }
            }
            if absakk * rowmax >= alpha * colmax * colmax {
                (k, 1)
            } else if at(&a, imax, imax).abs() >= alpha * rowmax {
                (imax, 1)
            } else {
                (imax, 2)
            }
        };

        let kk = k + kstep - 1;
        if kp != kk {
            swap_sym(&mut a, n, kk, kp);
            perm.swap(kk, kp);
        }

        if kstep == 1 {
            let d = at(&a, k, k);
            d_diag[k] = d;
            min_pivot = min_pivot.min(d.abs());
            pivots.push((k, Pivot::One));
            if d != 0.0 {
                let col: Vec<f64> = ((k + 1)..n).map(|i| at(&a, i, k)).collect();
                for (ii, i) in ((k + 1)..n).enumerate() {
                    let li = col[ii] / d;
                    for (jj, j) in ((k + 1)..n).enumerate() {
                        a[i * n + j] -= li * col[jj];
                    }
                    a[i * n + k] = li;
                }
            }
        } else {
            let (d11, d21, d22) = (at(&a, k, k), at(&a, k + 1, k), at(&a, k + 1, k + 1));
            d_diag[k] = d11;
            d_diag[k + 1] = d22;
            d_sub[k] = d21;
            let half_tr = 0.5 * (d11 + d22);
            let rad = (0.25 * (d11 - d22) * (d11 - d22) + d21 * d21).sqrt();
            let small = (half_tr.abs() - rad).abs();
            min_pivot = min_pivot.min(small);
            pivots.push((k, Pivot::Two));
            let det = d11 * d22 - d21 * d21;
            if det != 0.0 {
                let rows: Vec<(f64, f64)> = ((k + 2)..n)
                    .map(|i| (at(&a, i, k), at(&a, i, k + 1)))
                    .collect();
                // Multipliers: (c0, c1) · D⁻¹
                let mults: Vec<(f64, f64)> = rows
                    .iter()
                    .map(|&(c0, c1)| ((c0 * d22 - c1 * d21) / det, (c1 * d11 - c0 * d21) / det))
                    .collect();
                for (ii, i) in ((k + 2)..n).enumerate() {
                    let (l0, l1) = mults[ii];
                    for (jj, j) in ((k + 2)..n).enumerate() {
                        let (c0, c1) = rows[jj];
                        a[i * n + j] -= l0 * c0 + l1 * c1;
                    }
                    a[i * n + k] = l0;
                    a[i * n + k + 1] = l1;
                }
            }
        }
        k += kstep;
    }

    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..i {
            l[i * n + j] = a[i * n + j];
        }
    }
    // The (k+1, k) entry of a 2×2 block belongs to D, not L.
    for &(k, kind) in &pivots {
        if kind == Pivot::Two {
            l[(k + 1) * n + k] = 0.0;
        }
    }

    let min_pivot_ratio = if scale > 0.0 { min_pivot / scale } else { 0.0 };
    Factorization {
        n,
        perm,
        l,
        d_diag,
        d_sub,
        pivots,
        singular: scale == 0.0 || min_pivot < tol * scale,
        min_pivot_ratio,
    }
}

/// Swaps rows and columns `p` and `q` of a full square array.
fn swap_sym(a: &mut [f64], n: usize, p: usize, q: usize) {
    for j in 0..n {
        a.swap(p * n + j, q * n + j);
    }
    for i in 0..n {
        a.swap(i * n + p, i * n + q);
    }
}

pub fn solve(f: &Factorization, b: &[f64]) -> Result<Vec<f64>> {
    f.solve(b)
}

pub fn invert(f: &Factorization) -> Result<SymMatrix> {
    f.invert()
}

/// Full spectrum in ascending order by cyclic Jacobi rotations.
pub fn eigenvalues_sym(m: &SymMatrix) -> Vec<f64> {
    let n = m.n;
    let mut a = m.data.clone();
    let total = m.frobenius();
    if total == 0.0 {
        return vec![0.0; n];
    }
    let threshold = JACOBI_REL_TOL * total;

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = {
            let mut s = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    s += 2.0 * a[i * n + j] * a[i * n + j];
                }
            }
            s.sqrt()
        };
        if off < threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    eig
}

/// Largest eigenvalue, via [`eigenvalues_sym`].
pub fn lambda_max(m: &SymMatrix) -> f64 {
    *eigenvalues_sym(m).last().expect("n >= 1")
}
