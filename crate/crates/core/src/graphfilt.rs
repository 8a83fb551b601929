//! Graph filtrations of weighted networks.
//!
//! Thresholding a weighted graph at increasing values removes edges one at a
//! time, so β0 can only grow and β1 can only shrink. Over a complete graph
//! with distinct weights, the edge set splits into the maximum spanning tree
//! (the 0D births) and everything else (the 1D deaths).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::unionfind::UnionFind;

/// A weighted network on `p` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph(SymmetricMatrix);

impl WeightedGraph {
    pub fn new(w: SymmetricMatrix) -> Self {
        Self(w)
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Ok(Self(SymmetricMatrix::from_rows(rows)?))
    }

    pub fn p(&self) -> usize {
        self.0.n()
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn matrix(&self) -> &SymmetricMatrix {
        &self.0
    }

    /// `(weight, i, j)` for every pair `i < j`.
    pub fn edges(&self) -> Vec<(f64, usize, usize)> {
        let p = self.p();
        let mut out = Vec::with_capacity(p * p.saturating_sub(1) / 2);
        for i in 0..p {
            for j in i + 1..p {
                out.push((self.weight(i, j), i, j));
            }
        }
        out
    }

    pub fn max_weight(&self) -> f64 {
        self.0
            .upper_triangle()
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Which side of the threshold keeps an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    /// Keep `w_ij > ε`; connectivity-strength convention.
    #[default]
    Above,
    /// Keep `w_ij <= ε`; distance (Rips) convention.
    Below,
}

impl Direction {
    #[inline]
    pub fn keeps(self, weight: f64, eps: f64) -> bool {
        match self {
            Direction::Above => weight > eps,
            Direction::Below => weight <= eps,
        }
    }
}

/// Binary graph produced by thresholding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryGraph {
    p: usize,
    adj: Vec<bool>,
}

impl BinaryGraph {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.p + j]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.p {
            for j in i + 1..self.p {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// 0/1 adjacency rows.
    pub fn adjacency(&self) -> Vec<Vec<u8>> {
        self.adj
            .chunks(self.p.max(1))
            .map(|r| r.iter().map(|&b| b as u8).collect())
            .collect()
    }

    pub fn components(&self) -> usize {
        let mut uf = UnionFind::new(self.p);
        for (i, j) in self.edges() {
            uf.union(i, j);
        }
        uf.components()
    }
}

fn check_finite(eps: f64) -> Result<()> {
    if eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "threshold must be finite, got {eps}"
        )))
    }
}

/// Binary graph with `a_ij = 1` iff `w_ij > ε`.
pub fn threshold_graph(g: &WeightedGraph, eps: f64) -> Result<BinaryGraph> {
    threshold_graph_with(g, eps, Direction::Above)
}

pub fn threshold_graph_with(
    g: &WeightedGraph,
    eps: f64,
    direction: Direction,
) -> Result<BinaryGraph> {
    check_finite(eps)?;
    let p = g.p();
    let mut adj = vec![false; p * p];
    for (w, i, j) in g.edges() {
        if direction.keeps(w, eps) {
            adj[i * p + j] = true;
            adj[j * p + i] = true;
        }
    }
    Ok(BinaryGraph { p, adj })
}

/// β0 and β1 of a graph filtration sampled at a grid of thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BettiCurve {
    pub thresholds: Vec<f64>,
    pub beta0: Vec<usize>,
    pub beta1: Vec<usize>,
}

impl BettiCurve {
    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }
}

pub fn betti_curve(g: &WeightedGraph, thresholds: &[f64]) -> Result<BettiCurve> {
    betti_curve_with(g, thresholds, Direction::Above)
}

/// Betti curve by incremental union-find.
///
/// Edges are inserted in the order they appear as the threshold moves
/// toward the dense end of the filtration, so the whole curve costs one sort
/// plus near-linear union-find work. β1 comes from the Euler relation
/// `β0 - β1 = p - q_ε`.
pub fn betti_curve_with(
    g: &WeightedGraph,
    thresholds: &[f64],
    direction: Direction,
) -> Result<BettiCurve> {
    for &t in thresholds {
        check_finite(t)?;
    }
    if thresholds.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter(
            "thresholds must be in ascending order".into(),
        ));
    }
    let p = g.p();
    let mut edges = g.edges();
    let n = thresholds.len();
    let mut beta0 = vec![0usize; n];
    let mut beta1 = vec![0usize; n];
    let mut uf = UnionFind::new(p);
    let mut q = 0usize;
    let mut next = 0usize;
    let mut record = |idx: usize, uf: &UnionFind, q: usize| {
        let b0 = uf.components();
        beta0[idx] = b0;
        beta1[idx] = b0 + q - p;
    };
    match direction {
        Direction::Above => {
            edges.sort_by(|a, b| b.0.total_cmp(&a.0));
            for idx in (0..n).rev() {
                while next < edges.len() && edges[next].0 > thresholds[idx] {
                    uf.union(edges[next].1, edges[next].2);
                    q += 1;
                    next += 1;
                }
                record(idx, &uf, q);
            }
        }
        Direction::Below => {
            edges.sort_by(|a, b| a.0.total_cmp(&b.0));
            for (idx, &eps) in thresholds.iter().enumerate() {
                while next < edges.len() && edges[next].0 <= eps {
                    uf.union(edges[next].1, edges[next].2);
                    q += 1;
                    next += 1;
                }
                record(idx, &uf, q);
            }
        }
    }
    Ok(BettiCurve {
        thresholds: thresholds.to_vec(),
        beta0,
        beta1,
    })
}

/// Thresholds of the maximal filtration: a value below every weight
/// followed by the sorted distinct weights `w_(1) < ... < w_(q)`.
pub fn maximal_thresholds(g: &WeightedGraph) -> Vec<f64> {
    let mut w = g.matrix().upper_triangle();
    w.sort_by(f64::total_cmp);
    w.dedup();
    let floor = match w.first() {
        Some(&lo) if lo > 0.0 => 0.0,
        Some(&lo) => lo - 1.0,
        None => 0.0,
    };
    std::iter::once(floor).chain(w).collect()
}

/// Birth set (maximum spanning tree weights) and death set (the rest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirthDeathSets {
    /// Sorted ascending, `p - 1` values.
    pub births: Vec<f64>,
    /// Sorted ascending.
    pub deaths: Vec<f64>,
    /// Tree edges realising `births`, in Kruskal order (heaviest first).
    #[serde(rename = "mst")]
    pub mst_edges: Vec<(usize, usize)>,
}

impl BirthDeathSets {
    /// 0D diagram `(b_i, c)` with every death placed at the sentinel `c`
    /// (default: largest birth + 1).
    pub fn zero_dim_diagram(&self, sentinel: Option<f64>) -> Vec<(f64, f64)> {
        let c = sentinel.unwrap_or_else(|| self.births.last().map_or(1.0, |b| b + 1.0));
        self.births.iter().map(|&b| (b, c)).collect()
    }
}

/// Splits the positive edge weights into births and deaths.
///
/// The births are the weights of the maximum spanning tree, found by Kruskal
/// on descending weights. Zero weights are treated as absent edges. Weights
/// must be distinct: ties make the split ambiguous, and the usual remedy is to
/// add tiny Gaussian noise before calling.
pub fn birth_death_decompose(g: &WeightedGraph) -> Result<BirthDeathSets> {
    let p = g.p();
    let mut edges: Vec<(f64, usize, usize)> = Vec::new();
    for (w, i, j) in g.edges() {
        if w < 0.0 {
            return Err(Error::InvalidInput(format!(
                "negative weight {w} on edge ({i},{j}); shift or transform weights first"
            )));
        }
        if w > 0.0 {
            edges.push((w, i, j));
        }
    }
    edges.sort_by(|a, b| b.0.total_cmp(&a.0));
    if let Some(pair) = edges.windows(2).find(|e| e[0].0 == e[1].0) {
        return Err(Error::Degenerate(format!(
            "edges ({},{}) and ({},{}) share weight {}; add small Gaussian noise to break ties",
            pair[0].1, pair[0].2, pair[1].1, pair[1].2, pair[0].0
        )));
    }
    let mut uf = UnionFind::new(p);
    let mut births = Vec::with_capacity(p.saturating_sub(1));
    let mut deaths = Vec::with_capacity(edges.len());
    let mut mst_edges = Vec::with_capacity(p.saturating_sub(1));
    for &(w, i, j) in &edges {
        if uf.union(i, j) {
            births.push(w);
            mst_edges.push((i, j));
        } else {
            deaths.push(w);
        }
    }
    if p > 0 && uf.components() != 1 {
        return Err(Error::InvalidInput(format!(
            "graph is not connected: {} components remain after all positive edges",
            uf.components()
        )));
    }
    births.reverse();
    deaths.reverse();
    Ok(BirthDeathSets {
        births,
        deaths,
        mst_edges,
    })
}

/// Corner points of the β0 curve of a tree with `p` nodes:
/// `(0, 1), (w_(1), 2), ..., (w_(p-1), p), (∞, p)`.
pub fn tree_betti_coordinates(tree_weights: &[f64], p: usize) -> Result<Vec<(f64, usize)>> {
    if p == 0 || tree_weights.len() != p - 1 {
        return Err(Error::InvalidInput(format!(
            "a tree on {p} nodes has {} edges, got {} weights",
            p.saturating_sub(1),
            tree_weights.len()
        )));
    }
    let mut w = tree_weights.to_vec();
    w.sort_by(f64::total_cmp);
    if w.iter().any(|&x| !x.is_finite() || x <= 0.0) {
        return Err(Error::InvalidInput(
            "tree weights must be finite and positive".into(),
        ));
    }
    if w.windows(2).any(|x| x[0] == x[1]) {
        return Err(Error::Degenerate("tree weights must be distinct".into()));
    }
    let mut out = Vec::with_capacity(p + 1);
    out.push((0.0, 1));
    out.extend(w.iter().enumerate().map(|(i, &x)| (x, i + 2)));
    out.push((f64::INFINITY, p));
    Ok(out)
}
