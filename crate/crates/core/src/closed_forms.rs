//! Closed forms for discrete spaces, cycles and weighted trees. These are the
//! ground truth the generic pipeline is checked against.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::metric::WeightedGraph;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OracleResult {
    pub gamma: f64,
    /// Absent when `Γ = 0`.
    pub beta: Option<f64>,
    pub a_inv: Option<SymMatrix>,
    pub b: Option<SymMatrix>,
    pub laplacian: Option<SymMatrix>,
    /// Explicit maximizer: a 0/1 vector for cycles, a ±1 colouring for trees.
    pub maximizer: Option<Vec<i8>>,
    /// `max (Bx|x)` over `{0, 1}ⁿ` where given in closed form.
    pub binary_max: Option<f64>,
}

/// `Γ = ½ (1/⌊n/2⌋ + 1/⌈n/2⌉)`; `β = n` for even `n`, `n − 1/n` for odd.
pub fn gamma_discrete(n: usize) -> Result<OracleResult> {
    if n < 2 {
        return Err(Error::InvalidSize(format!(
            "discrete space needs n >= 2, got {n}"
        )));
    }
    let (lo, hi) = ((n / 2) as f64, n.div_ceil(2) as f64);
    let nf = n as f64;
    let a_inv = SymMatrix::from_fn(n, |i, j| 1.0 / (nf - 1.0) - if i == j { 1.0 } else { 0.0 });
    let b = SymMatrix::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 } - 1.0 / nf);
    Ok(OracleResult {
        gamma: 0.5 * (1.0 / lo + 1.0 / hi),
        beta: Some(if n.is_multiple_of(2) {
            nf
        } else {
            nf - 1.0 / nf
        }),
        a_inv: Some(a_inv),
        b: Some(b),
        ..Default::default()
    })
}

/// Matrix of `Cᵐ` where `C` maps `(x₁, …, xₙ)` to `(x₂, …, xₙ, x₁)`.
fn shift_power(n: usize, m: usize) -> impl Fn(usize, usize) -> f64 {
    move |i, j| if j == (i + m) % n { 1.0 } else { 0.0 }
}

/// Positions (1-based) of the ones in the cycle maximizer for `k`.
fn cycle_maximizer_support(k: usize) -> Vec<usize> {
    let m = k / 2;
    let (from, to) = if k.is_multiple_of(2) {
        (2 * m + 1, 3 * m + 1)
    } else {
        (2 * m + 2, 3 * m + 2)
    };
    (1..=m).chain(from..=to).collect()
}

/// Gap of the unit cycle `Cₙ`: zero for even `n`, `½ n/(n² − 2n − 1)` for odd.
pub fn gamma_cycle(n: usize) -> Result<OracleResult> {
    if n < 3 {
        return Err(Error::InvalidSize(format!("cycle needs n >= 3, got {n}")));
    }
    if n.is_multiple_of(2) {
        return Ok(OracleResult::default());
    }
    let k = (n - 1) / 2;
    let nf = n as f64;
    let kf = k as f64;
    let (ck, ck1) = (shift_power(n, k), shift_power(n, k + 1));
    let b = SymMatrix::from_fn(n, |i, j| {
        2.0 * if i == j { 1.0 } else { 0.0 } + ck(i, j) + ck1(i, j) - 4.0 / nf
    });
    let support = cycle_maximizer_support(k);
    let maximizer = (1..=n).map(|i| support.contains(&i) as i8).collect();
    Ok(OracleResult {
        gamma: 0.5 * nf / (nf * nf - 2.0 * nf - 1.0),
        beta: Some(4.0 * (4.0 * kf * kf - 2.0) / (2.0 * kf + 1.0)),
        a_inv: Some(inverse_cycle(n)?),
        b: Some(b),
        maximizer: Some(maximizer),
        binary_max: Some((4.0 * kf * kf - 2.0) / (2.0 * kf + 1.0)),
        ..Default::default()
    })
}

/// `A⁻¹ = −2I − Cᵏ − Cᵏ⁺¹ + (2k+1)/(k(k+1)) 11ᵀ` for the distance matrix of
/// `C₂ₖ₊₁`.
pub fn inverse_cycle(n: usize) -> Result<SymMatrix> {
    if n < 3 {
        return Err(Error::InvalidSize(format!("cycle needs n >= 3, got {n}")));
    }
    if n.is_multiple_of(2) {
        return Err(Error::EvenCycle(n));
    }
    let k = (n - 1) / 2;
    let kf = k as f64;
    let c = (2.0 * kf + 1.0) / (kf * (kf + 1.0));
    let (ck, ck1) = (shift_power(n, k), shift_power(n, k + 1));
    // Cᵏ + Cᵏ⁺¹ is symmetric because Cᵏ⁺¹ = (Cᵏ)ᵀ when n = 2k + 1.
    Ok(SymMatrix::from_fn(n, |i, j| {
        -2.0 * if i == j { 1.0 } else { 0.0 } - ck(i, j) - ck1(i, j) + c
    }))
}

fn require_tree(t: &WeightedGraph) -> Result<()> {
    if !t.is_tree() {
        return Err(Error::NotATree(format!(
            "{} vertices but {} edges",
            t.n(),
            t.edges().len()
        )));
    }
    Ok(())
}

/// Laplacian of the tree with every weight replaced by its reciprocal.
pub fn reciprocal_laplacian(t: &WeightedGraph) -> SymMatrix {
    let mut l = SymMatrix::zeros(t.n());
    for e in t.edges() {
        let c = 1.0 / e.w;
        l.set(e.i, e.j, l.get(e.i, e.j) - c);
        l.set(e.i, e.i, l.get(e.i, e.i) + c);
        l.set(e.j, e.j, l.get(e.j, e.j) + c);
    }
    l
}

/// `δᵢ = 2 − deg(i)`.
pub fn degree_defect(t: &WeightedGraph) -> Vec<f64> {
    (0..t.n()).map(|v| 2.0 - t.degree(v) as f64).collect()
}

/// Proper 2-colouring by breadth-first parity from vertex 0 (`+1` at even
/// depth).
pub fn two_colouring(t: &WeightedGraph) -> Result<Vec<i8>> {
    require_tree(t)?;
    let mut adj = vec![Vec::new(); t.n()];
    for e in t.edges() {
        adj[e.i].push(e.j);
        adj[e.j].push(e.i);
    }
    let mut colour = vec![0i8; t.n()];
    colour[0] = 1;
    let mut queue = VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if colour[u] == 0 {
                colour[u] = -colour[v];
                queue.push_back(u);
            }
        }
    }
    Ok(colour)
}

/// `A⁻¹ = −½ L + (2 Σ w(e))⁻¹ δ δᵀ`.
pub fn inverse_tree(t: &WeightedGraph) -> Result<SymMatrix> {
    require_tree(t)?;
    let l = reciprocal_laplacian(t);
    let delta = degree_defect(t);
    let total: f64 = t.edges().iter().map(|e| e.w).sum();
    SymMatrix::outer(&delta)
        .scale(1.0 / (2.0 * total))
        .add_scaled(-0.5, &l)
}

/// `B = ½ L`.
pub fn b_tree(t: &WeightedGraph) -> Result<SymMatrix> {
    require_tree(t)?;
    Ok(reciprocal_laplacian(t).scale(0.5))
}

/// `Γ = (Σ 1/w(e))⁻¹`, `β = 2 Σ 1/w(e)`.
pub fn gamma_tree(t: &WeightedGraph) -> Result<OracleResult> {
    require_tree(t)?;
    let s: f64 = t.edges().iter().map(|e| 1.0 / e.w).sum();
    Ok(OracleResult {
        gamma: 1.0 / s,
        beta: Some(2.0 * s),
        a_inv: Some(inverse_tree(t)?),
        b: Some(b_tree(t)?),
        laplacian: Some(reciprocal_laplacian(t)),
        maximizer: Some(two_colouring(t)?),
        binary_max: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{factor, identity_error, quad_form, DEFAULT_SINGULAR_TOL};
    use crate::metric::{gen_cycle, gen_path, gen_tree, gen_unit_path, path_metric, Edge};

    fn dist(g: &WeightedGraph) -> SymMatrix {
        path_metric(g).unwrap().distances().clone()
    }

    #[test]
    fn discrete_values() {
        assert_eq!(gamma_discrete(2).unwrap().gamma, 1.0);
        assert_eq!(gamma_discrete(4).unwrap().gamma, 0.5);
        assert!((gamma_discrete(5).unwrap().gamma - 5.0 / 12.0).abs() < 1e-15);
        assert_eq!(gamma_discrete(5).unwrap().beta, Some(5.0 - 0.2));
        assert!(gamma_discrete(1).is_err());
        for n in 2..20 {
            let r = gamma_discrete(n).unwrap();
            assert!((r.gamma * r.beta.unwrap() - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn cycle_values() {
        assert_eq!(gamma_cycle(3).unwrap().gamma, 0.75);
        assert_eq!(
            gamma_cycle(3).unwrap().gamma,
            gamma_discrete(3).unwrap().gamma
        );
        let c4 = gamma_cycle(4).unwrap();
        assert_eq!((c4.gamma, c4.beta), (0.0, None));
        assert!((gamma_cycle(5).unwrap().gamma - 5.0 / 28.0).abs() < 1e-15);
        assert!(gamma_cycle(2).is_err());
    }

    #[test]
    fn cycle_maximizer_attains_binary_max() {
        for k in 1..=7 {
            let n = 2 * k + 1;
            let r = gamma_cycle(n).unwrap();
            let x: Vec<f64> = r.maximizer.unwrap().iter().map(|&v| v as f64).collect();
            let v = quad_form(r.b.as_ref().unwrap(), &x, &x).unwrap();
            assert!((v - r.binary_max.unwrap()).abs() < 1e-12, "k = {k}");
        }
        // k = 2 (m = 1): ones at {1, 3, 4}.
        assert_eq!(cycle_maximizer_support(2), vec![1, 3, 4]);
        // k = 3 (m = 1): ones at {1, 4, 5}.
        assert_eq!(cycle_maximizer_support(3), vec![1, 4, 5]);
    }

    #[test]
    fn inverse_cycle_examples() {
        let inv5 = inverse_cycle(5).unwrap();
        assert!((inv5.get(0, 0) + 7.0 / 6.0).abs() < 1e-15);
        let inv3 = inverse_cycle(3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = 0.5 - if i == j { 1.0 } else { 0.0 };
                assert!((inv3.get(i, j) - want).abs() < 1e-15);
            }
        }
        for n in (3..=15).step_by(2) {
            let inv = inverse_cycle(n).unwrap();
            let k = ((n - 1) / 2) as f64;
            for v in inv.mul_vec(&vec![1.0; n]).unwrap() {
                assert!((v - 1.0 / (k * (k + 1.0))).abs() < 1e-13);
            }
            let d = dist(&gen_cycle(n).unwrap());
            assert!(identity_error(&d.mul_dense(&inv).unwrap()) < 1e-10);
        }
        assert_eq!(inverse_cycle(6), Err(Error::EvenCycle(6)));
    }

    #[test]
    fn inverse_tree_examples() {
        for w in [1.0, 0.3, 7.5] {
            let t = gen_path(2, &[w]).unwrap();
            let inv = inverse_tree(&t).unwrap();
            let numeric = factor(&dist(&t), DEFAULT_SINGULAR_TOL).invert().unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    assert!((inv.get(i, j) - numeric.get(i, j)).abs() < 1e-12);
                }
            }
        }
        let t = gen_unit_path(3).unwrap();
        let inv = inverse_tree(&t).unwrap();
        let numeric = factor(&dist(&t), DEFAULT_SINGULAR_TOL).invert().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((inv.get(i, j) - numeric.get(i, j)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn degree_defect_on_star() {
        let star = gen_tree(vec![
            Edge { i: 0, j: 1, w: 1.0 },
            Edge { i: 0, j: 2, w: 2.0 },
            Edge { i: 0, j: 3, w: 4.0 },
        ])
        .unwrap();
        assert_eq!(degree_defect(&star), vec![-1.0, 1.0, 1.0, 1.0]);
        assert!((gamma_tree(&star).unwrap().gamma - 4.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn tree_gamma_examples() {
        assert_eq!(
            gamma_tree(&gen_path(2, &[1.0]).unwrap()).unwrap().gamma,
            1.0
        );
        assert!((gamma_tree(&gen_unit_path(4).unwrap()).unwrap().gamma - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            gamma_tree(&gen_cycle(5).unwrap()),
            Err(Error::NotATree(_))
        ));
    }

    #[test]
    fn b_tree_examples() {
        let b = b_tree(&gen_path(2, &[1.0]).unwrap()).unwrap();
        assert_eq!(b.to_rows(), vec![vec![0.5, -0.5], vec![-0.5, 0.5]]);

        let t = gen_tree(vec![
            Edge { i: 0, j: 1, w: 0.5 },
            Edge { i: 1, j: 2, w: 3.0 },
            Edge { i: 1, j: 3, w: 1.5 },
            Edge { i: 3, j: 4, w: 2.0 },
        ])
        .unwrap();
        let b = b_tree(&t).unwrap();
        let x: Vec<f64> = two_colouring(&t)
            .unwrap()
            .iter()
            .map(|&v| v as f64)
            .collect();
        let s: f64 = t.edges().iter().map(|e| 1.0 / e.w).sum();
        assert!((quad_form(&b, &x, &x).unwrap() - 2.0 * s).abs() < 1e-13);
        assert!(b
            .mul_vec(&[1.0; 5])
            .unwrap()
            .iter()
            .all(|v| v.abs() < 1e-15));
    }
}
