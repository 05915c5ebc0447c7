//! Finite metric spaces, weighted graphs and their path metrics, and the
//! p-power matrix `A = (d(xᵢ, xⱼ)ᵖ)`.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

/// Triangle violations below this fraction of the largest distance are
/// treated as rounding.
pub const TRIANGLE_REL_TOL: f64 = 1e-12;

/// A validated finite metric space with pairwise distinct points.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpace {
    d: SymMatrix,
    /// For every point of the input, the index of the point representing it
    /// after duplicate collapse.
    representative: Vec<usize>,
    warnings: Vec<String>,
}

impl MetricSpace {
    pub fn n(&self) -> usize {
        self.d.n()
    }

    pub fn distances(&self) -> &SymMatrix {
        &self.d
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.d.get(i, j)
    }

    pub fn max_distance(&self) -> f64 {
        self.d.max_abs()
    }

    /// Maps each input point to its index in the collapsed space.
    pub fn representative(&self) -> &[usize] {
        &self.representative
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        validate_metric(&SymMatrix::from_rows(rows)?)
    }

    /// The space with every distance multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidSize(format!(
                "scale factor must be positive, got {c}"
            )));
        }
        Ok(Self {
            d: self.d.scale(c),
            representative: self.representative.clone(),
            warnings: self.warnings.clone(),
        })
    }

    /// Relabels points so that new point `i` is old point `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: perm.len(),
            });
        }
        validate_metric(&self.d.permuted(perm))
    }
}

/// Checks the metric axioms and collapses points at distance zero onto the
/// lowest-indexed member of their class.
pub fn validate_metric(raw: &SymMatrix) -> Result<MetricSpace> {
    let n = raw.n();
    for i in 0..n {
        let v = raw.get(i, i);
        if !v.is_finite() {
            return Err(Error::NonFiniteEntry { i, j: i });
        }
        if v != 0.0 {
            return Err(Error::NonzeroDiagonal { i, value: v });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let v = raw.get(i, j);
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry { i, j });
            }
            if v < 0.0 {
                return Err(Error::NegativeDistance { i, j, value: v });
            }
        }
    }
    let slack = TRIANGLE_REL_TOL * raw.max_abs();
    for i in 0..n {
        for j in (i + 1)..n {
            let dij = raw.get(i, j);
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let via = raw.get(i, k) + raw.get(k, j);
                if dij > via + slack {
                    return Err(Error::TriangleViolation { i, j, k, dij, via });
                }
            }
        }
    }

    // The triangle inequality makes zero distance an equivalence relation.
    let mut representative: Vec<usize> = (0..n).collect();
    let mut keep = Vec::new();
    let mut warnings = Vec::new();
    for i in 0..n {
        match (0..i).find(|&j| representative[j] == j && raw.get(i, j) == 0.0) {
            Some(j) => {
                representative[i] = j;
                warnings.push(format!(
                    "point {} duplicates point {} (distance 0); collapsed",
                    i + 1,
                    j + 1
                ));
            }
            None => keep.push(i),
        }
    }
    if keep.len() < 2 {
        return Err(Error::InvalidSize(
            "a metric space needs at least two distinct points".into(),
        ));
    }
    let position: Vec<usize> = {
        let mut pos = vec![usize::MAX; n];
        for (new, &old) in keep.iter().enumerate() {
            pos[old] = new;
        }
        pos
    };
    let representative = representative.iter().map(|&r| position[r]).collect();
    let d = if keep.len() == n {
        raw.clone()
    } else {
        raw.principal(&keep)
    };
    Ok(MetricSpace {
        d,
        representative,
        warnings,
    })
}

/// One weighted edge, 0-based endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

/// Connected simple graph with positive edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!(
                "graph needs at least 2 vertices, got {n}"
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &edges {
            let bad = |reason| Error::InvalidEdge {
                i: e.i,
                j: e.j,
                w: e.w,
                reason,
            };
            if e.i >= n || e.j >= n {
                return Err(bad("endpoint out of range"));
            }
            if e.i == e.j {
                return Err(bad("self-loop"));
            }
            if !(e.w > 0.0 && e.w.is_finite()) {
                return Err(bad("weight must be positive and finite"));
            }
            if !seen.insert((e.i.min(e.j), e.i.max(e.j))) {
                return Err(bad("duplicate edge"));
            }
        }
        let g = Self { n, edges };
        let depth = g.bfs_depth();
        if let Some(v) = depth.iter().position(|d| d.is_none()) {
            return Err(Error::DisconnectedGraph(v));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.n
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.i == v || e.j == v).count()
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        adj
    }

    /// Breadth-first depth (edge count) from vertex 0.
    pub fn bfs_depth(&self) -> Vec<Option<usize>> {
        let adj = self.adjacency();
        let mut depth = vec![None; self.n];
        depth[0] = Some(0);
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            let dv = depth[v].unwrap_or(0);
            for &u in &adj[v] {
                if depth[u].is_none() {
                    depth[u] = Some(dv + 1);
                    queue.push_back(u);
                }
            }
        }
        depth
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.n,
            self.edges
                .iter()
                .map(|e| Edge { w: c * e.w, ..*e })
                .collect(),
        )
    }
}

/// Shortest-path metric by Floyd–Warshall.
pub fn path_metric(g: &WeightedGraph) -> Result<MetricSpace> {
    let n = g.n();
    let mut d = vec![f64::INFINITY; n * n];
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    for e in g.edges() {
        d[e.i * n + e.j] = d[e.i * n + e.j].min(e.w);
        d[e.j * n + e.i] = d[e.j * n + e.i].min(e.w);
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if dik.is_infinite() {
                continue;
            }
            for j in 0..n {
                let via = dik + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    if let Some(j) = (0..n).find(|&j| d[j].is_infinite()) {
        return Err(Error::DisconnectedGraph(j));
    }
    // Mirror the upper triangle so rounding cannot break exact symmetry.
    validate_metric(&SymMatrix::from_fn(n, |i, j| d[i * n + j]))
}

/// The functional `u` is all-ones for metric spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct NegTypeMatrix {
    pub a: SymMatrix,
    pub p: f64,
    pub u: Vec<f64>,
}

impl NegTypeMatrix {
    /// Raw-matrix mode: an arbitrary symmetric matrix with a caller-chosen
    /// functional `u`.
    pub fn from_raw(a: SymMatrix, u: Vec<f64>) -> Result<Self> {
        if u.len() != a.n() {
            return Err(Error::DimensionMismatch {
                expected: a.n(),
                found: u.len(),
            });
        }
        Ok(Self { a, p: f64::NAN, u })
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }
}

/// `A(i, j) = d(i, j)ᵖ` with `d⁰ = 1` off the diagonal and 0 on it.
pub fn power_matrix(x: &MetricSpace, p: f64) -> Result<NegTypeMatrix> {
    if !(p >= 0.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    let a = SymMatrix::from_fn(x.n(), |i, j| {
        if i == j {
            0.0
        } else if p == 0.0 {
            1.0
        } else if p == 1.0 {
            x.d(i, j)
        } else {
            x.d(i, j).powf(p)
        }
    });
    Ok(NegTypeMatrix {
        a,
        p,
        u: vec![1.0; x.n()],
    })
}

/// Discrete metric on `n` points.
pub fn gen_discrete(n: usize) -> Result<MetricSpace> {
    if n < 2 {
        return Err(Error::InvalidSize(format!(
            "discrete space needs n >= 2, got {n}"
        )));
    }
    validate_metric(&SymMatrix::from_fn(
        n,
        |i, j| if i == j { 0.0 } else { 1.0 },
    ))
}

/// Unit-weight cycle `1 – 2 – … – n – 1`.
pub fn gen_cycle(n: usize) -> Result<WeightedGraph> {
    if n < 3 {
        return Err(Error::InvalidSize(format!("cycle needs n >= 3, got {n}")));
    }
    WeightedGraph::new(
        n,
        (0..n)
            .map(|i| Edge {
                i,
                j: (i + 1) % n,
                w: 1.0,
            })
            .collect(),
    )
}

/// Path on `n` vertices; `weights[k]` sits on edge `k – k+1`.
pub fn gen_path(n: usize, weights: &[f64]) -> Result<WeightedGraph> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("path needs n >= 2, got {n}")));
    }
    if weights.len() != n - 1 {
        return Err(Error::InvalidSize(format!(
            "path on {n} vertices needs {} weights, got {}",
            n - 1,
            weights.len()
        )));
    }
    WeightedGraph::new(
        n,
        weights
            .iter()
            .enumerate()
            .map(|(k, &w)| Edge { i: k, j: k + 1, w })
            .collect(),
    )
}

pub fn gen_unit_path(n: usize) -> Result<WeightedGraph> {
    gen_path(n, &vec![1.0; n.saturating_sub(1)])
}

/// Tree from an edge list; the vertex count is one more than the edge count.
pub fn gen_tree(edges: Vec<Edge>) -> Result<WeightedGraph> {
    let n = edges.len() + 1;
    if let Some(e) = edges.iter().find(|e| e.i >= n || e.j >= n) {
        return Err(Error::NotATree(format!(
            "vertex {} out of range for {} edges",
            e.i.max(e.j),
            edges.len()
        )));
    }
    match WeightedGraph::new(n, edges) {
        Ok(g) => Ok(g),
        Err(Error::DisconnectedGraph(_)) => {
            Err(Error::NotATree("edge list contains a cycle".into()))
        }
        Err(e) => Err(e),
    }
}

/// Random recursive tree: vertex `v` attaches to a uniform earlier vertex with
/// a uniform weight from `weight_range`. Deterministic in `seed`.
pub fn gen_random_tree(n: usize, weight_range: (f64, f64), seed: u64) -> Result<WeightedGraph> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("tree needs n >= 2, got {n}")));
    }
    let (lo, hi) = weight_range;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::InvalidSize(format!(
            "weight range must satisfy 0 < lo <= hi, got [{lo}, {hi}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = (1..n)
        .map(|v| {
            let parent = rng.gen_range(0..v);
            let w = if hi > lo { rng.gen_range(lo..hi) } else { lo };
            Edge { i: parent, j: v, w }
        })
        .collect();
    gen_tree(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(r: &[&[f64]]) -> Vec<Vec<f64>> {
        r.iter().map(|x| x.to_vec()).collect()
    }

    #[test]
    fn validate_two_points() {
        let x = MetricSpace::from_rows(&rows(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert_eq!(x.n(), 2);
        assert!(x.warnings().is_empty());
    }

    #[test]
    fn validate_reports_triangle_violation() {
        let err = MetricSpace::from_rows(&rows(&[
            &[0.0, 1.0, 3.0],
            &[1.0, 0.0, 1.0],
            &[3.0, 1.0, 0.0],
        ]))
        .unwrap_err();
        assert_eq!(
            err,
            Error::TriangleViolation {
                i: 0,
                j: 2,
                k: 1,
                dij: 3.0,
                via: 2.0
            }
        );
    }

    #[test]
    fn validate_collapses_duplicates() {
        let x = MetricSpace::from_rows(&rows(&[
            &[0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0],
            &[1.0, 1.0, 0.0],
        ]))
        .unwrap();
        assert_eq!(x.n(), 2);
        assert_eq!(x.representative(), &[0, 0, 1]);
        assert_eq!(x.warnings().len(), 1);
        assert_eq!(x.d(0, 1), 1.0);
    }

    #[test]
    fn validate_error_kinds() {
        assert!(matches!(
            MetricSpace::from_rows(&rows(&[&[0.0, 1.0], &[2.0, 0.0]])),
            Err(Error::AsymmetricInput { .. })
        ));
        assert!(matches!(
            MetricSpace::from_rows(&rows(&[&[0.0, -1.0], &[-1.0, 0.0]])),
            Err(Error::NegativeDistance { .. })
        ));
        assert!(matches!(
            MetricSpace::from_rows(&rows(&[&[1.0, 1.0], &[1.0, 0.0]])),
            Err(Error::NonzeroDiagonal { i: 0, .. })
        ));
        assert!(matches!(
            MetricSpace::from_rows(&rows(&[&[0.0, 0.0], &[0.0, 0.0]])),
            Err(Error::InvalidSize(_))
        ));
    }

    #[test]
    fn power_matrix_examples() {
        let a = power_matrix(&gen_discrete(3).unwrap(), 1.0).unwrap();
        assert_eq!(
            a.a.to_rows(),
            rows(&[&[0.0, 1.0, 1.0], &[1.0, 0.0, 1.0], &[1.0, 1.0, 0.0]])
        );
        let x = MetricSpace::from_rows(&rows(&[&[0.0, 3.0], &[3.0, 0.0]])).unwrap();
        assert_eq!(
            power_matrix(&x, 2.0).unwrap().a.to_rows(),
            rows(&[&[0.0, 9.0], &[9.0, 0.0]])
        );
        let x = path_metric(&gen_path(3, &[2.0, 5.0]).unwrap()).unwrap();
        let a0 = power_matrix(&x, 0.0).unwrap();
        assert_eq!(a0.a, gen_discrete(3).unwrap().distances().clone());
        assert_eq!(a0.u, vec![1.0; 3]);
        assert_eq!(power_matrix(&x, -1.0), Err(Error::InvalidExponent(-1.0)));
    }

    #[test]
    fn path_metric_examples() {
        let c5 = path_metric(&gen_cycle(5).unwrap()).unwrap();
        assert_eq!(c5.distances().row(0), &[0.0, 1.0, 2.0, 2.0, 1.0]);
        let p = path_metric(&gen_path(3, &[2.0, 5.0]).unwrap()).unwrap();
        assert_eq!(p.d(0, 2), 7.0);
        let star = gen_tree(vec![
            Edge { i: 0, j: 1, w: 1.0 },
            Edge { i: 0, j: 2, w: 1.0 },
            Edge { i: 0, j: 3, w: 1.0 },
        ])
        .unwrap();
        assert_eq!(path_metric(&star).unwrap().d(1, 3), 2.0);
    }

    #[test]
    fn generator_examples() {
        let d4 = gen_discrete(4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(d4.d(i, j), if i == j { 0.0 } else { 1.0 });
            }
        }
        let c4 = path_metric(&gen_cycle(4).unwrap()).unwrap();
        assert_eq!(c4.max_distance(), 2.0);
        let edge = gen_tree(vec![Edge { i: 0, j: 1, w: 1.0 }]).unwrap();
        let x = path_metric(&edge).unwrap();
        assert_eq!((x.n(), x.d(0, 1)), (2, 1.0));

        assert!(matches!(gen_discrete(1), Err(Error::InvalidSize(_))));
        assert!(matches!(gen_cycle(2), Err(Error::InvalidSize(_))));
        assert!(matches!(
            gen_tree(vec![
                Edge { i: 0, j: 1, w: 1.0 },
                Edge { i: 1, j: 0, w: 2.0 },
            ]),
            Err(Error::InvalidEdge { .. })
        ));
        assert!(matches!(
            gen_tree(vec![
                Edge { i: 0, j: 1, w: 1.0 },
                Edge { i: 1, j: 2, w: 1.0 },
                Edge { i: 2, j: 0, w: 1.0 },
            ]),
            Err(Error::NotATree(_))
        ));
    }

    #[test]
    fn disconnected_graph_rejected() {
        let err = WeightedGraph::new(
            4,
            vec![Edge { i: 0, j: 1, w: 1.0 }, Edge { i: 2, j: 3, w: 1.0 }],
        )
        .unwrap_err();
        assert_eq!(err, Error::DisconnectedGraph(2));
    }

    #[test]
    fn random_tree_is_deterministic() {
        let a = gen_random_tree(12, (0.1, 10.0), 42).unwrap();
        let b = gen_random_tree(12, (0.1, 10.0), 42).unwrap();
        assert_eq!(a, b);
        assert!(a.is_tree());
        assert!(a.edges().iter().all(|e| (0.1..10.0).contains(&e.w)));
        assert_ne!(a, gen_random_tree(12, (0.1, 10.0), 43).unwrap());
    }
}
