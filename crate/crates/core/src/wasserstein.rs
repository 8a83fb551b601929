//! Wasserstein distances between persistence diagrams.
//!
//! Graph filtrations produce diagrams that are effectively one-dimensional
//! (all 0D deaths and all 1D births sit at a common sentinel), so the optimal
//! matching pairs the i-th smallest value with the i-th smallest value. The
//! general assignment solver is kept for arbitrary diagrams and as a check.

use serde::{Deserialize, Serialize};

use crate::assignment;
use crate::error::{Error, Result};
use crate::graphfilt::{birth_death_decompose, BirthDeathSets, WeightedGraph};
use crate::matrix::SymmetricMatrix;
use crate::par::Execution;

/// Sorted birth (0D) or death (1D) values of a graph filtration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GraphDiagram {
    values: Vec<f64>,
}

impl GraphDiagram {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("diagram values must be finite".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Points `(v, c)`: a 0D diagram with every death at the sentinel.
    pub fn embed_as_births(&self, sentinel: f64) -> Diagram {
        Diagram {
            points: self.values.iter().map(|&v| (v, sentinel)).collect(),
        }
    }

    /// Points `(c, v)`: a 1D diagram with every birth at the sentinel.
    pub fn embed_as_deaths(&self, sentinel: f64) -> Diagram {
        Diagram {
            points: self.values.iter().map(|&v| (sentinel, v)).collect(),
        }
    }
}

/// 0D and 1D diagrams of one weighted graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDiagrams {
    pub zero: GraphDiagram,
    pub one: GraphDiagram,
}

impl GraphDiagrams {
    pub fn from_sets(sets: &BirthDeathSets) -> Result<Self> {
        Ok(Self {
            zero: GraphDiagram::new(sets.births.clone())?,
            one: GraphDiagram::new(sets.deaths.clone())?,
        })
    }

    pub fn from_graph(g: &WeightedGraph) -> Result<Self> {
        Self::from_sets(&birth_death_decompose(g)?)
    }

    /// `(D0, D1)` against another pair.
    pub fn distance(&self, other: &Self, r: f64) -> Result<(f64, f64)> {
        Ok((
            wasserstein_graph(&self.zero, &other.zero, r)?,
            wasserstein_graph(&other.one, &self.one, r)?,
        ))
    }
}

fn check_order(r: f64) -> Result<()> {
    if r >= 1.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "Wasserstein order must be >= 1, got {r}"
        )))
    }
}

#[inline]
fn pow_r(x: f64, r: f64) -> f64 {
    if r == 2.0 {
        x * x
    } else if r == 1.0 {
        x.abs()
    } else {
        x.abs().powf(r)
    }
}

#[inline]
fn root_r(x: f64, r: f64) -> f64 {
    if r == 2.0 {
        x.sqrt()
    } else if r == 1.0 {
        x
    } else {
        x.powf(1.0 / r)
    }
}

/// r-Wasserstein distance between two graph diagrams of equal size:
/// `(Σ |a_(i) - b_(i)|^r)^(1/r)` over sorted values.
pub fn wasserstein_graph(a: &GraphDiagram, b: &GraphDiagram, r: f64) -> Result<f64> {
    check_order(r)?;
    if a.len() != b.len() {
        return Err(Error::IncompatibleDiagrams {
            left: a.len(),
            right: b.len(),
        });
    }
    let s: f64 = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| pow_r(x - y, r))
        .sum();
    Ok(root_r(s, r))
}

/// A general persistence diagram with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagram {
    pub points: Vec<(f64, f64)>,
}

impl Diagram {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.iter().any(|(b, d)| !b.is_finite() || !d.is_finite()) {
            return Err(Error::InvalidInput(
                "diagram points must be finite; substitute a sentinel for essential classes".into(),
            ));
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Exact r-Wasserstein distance over all bijections, solved as an assignment
/// problem with cost `‖x - y‖^r` (Euclidean norm).
pub fn wasserstein_assignment(p1: &Diagram, p2: &Diagram, r: f64) -> Result<f64> {
    check_order(r)?;
    let q = p1.len();
    if q != p2.len() {
        return Err(Error::IncompatibleDiagrams {
            left: q,
            right: p2.len(),
        });
    }
    let mut cost = Vec::with_capacity(q * q);
    for &(b1, d1) in &p1.points {
        for &(b2, d2) in &p2.points {
            cost.push(pow_r((b1 - b2).hypot(d1 - d2), r));
        }
    }
    let a = assignment::solve_min(&cost, q, q)?;
    Ok(root_r(a.cost.max(0.0), r))
}

/// Pairwise topological losses over a collection of graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub struct LossMatrix {
    pub d0: SymmetricMatrix,
    pub d1: SymmetricMatrix,
    pub d01: SymmetricMatrix,
}

impl LossMatrix {
    pub fn n(&self) -> usize {
        self.d0.n()
    }

    pub fn channel(&self, c: LossChannel) -> &SymmetricMatrix {
        match c {
            LossChannel::D0 => &self.d0,
            LossChannel::D1 => &self.d1,
            LossChannel::D01 => &self.d01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LossChannel {
    D0,
    D1,
    #[default]
    D01,
}

/// [`pairwise_loss_with`] at `r = 2` with the default execution policy.
pub fn pairwise_loss(graphs: &[WeightedGraph]) -> Result<LossMatrix> {
    pairwise_loss_with(graphs, 2.0, Execution::default())
}

/// Decomposes every graph once, then fills the `n(n-1)/2` distance cells.
pub fn pairwise_loss_with(graphs: &[WeightedGraph], r: f64, exec: Execution) -> Result<LossMatrix> {
    check_order(r)?;
    if let Some(first) = graphs.first() {
        let p = first.p();
        if let Some((i, g)) = graphs.iter().enumerate().find(|(_, g)| g.p() != p) {
            return Err(Error::IncompatibleCollection(format!(
                "graph {i} has {} nodes, graph 0 has {p}",
                g.p()
            )));
        }
    }
    let diagrams = exec.try_map_slice(graphs, GraphDiagrams::from_graph)?;
    loss_from_diagrams(&diagrams, r, exec)
}

/// Loss matrix from precomputed diagrams.
pub fn loss_from_diagrams(
    diagrams: &[GraphDiagrams],
    r: f64,
    exec: Execution,
) -> Result<LossMatrix> {
    check_order(r)?;
    let n = diagrams.len();
    let rows: Vec<Result<Vec<(f64, f64)>>> = exec.map_range(n, |i| {
        (i + 1..n)
            .map(|j| diagrams[i].distance(&diagrams[j], r))
            .collect()
    });
    let mut d0 = SymmetricMatrix::zeros(n);
    let mut d1 = SymmetricMatrix::zeros(n);
    let mut d01 = SymmetricMatrix::zeros(n);
    for (i, row) in rows.into_iter().enumerate() {
        for (off, (a, b)) in row?.into_iter().enumerate() {
            let j = i + 1 + off;
            d0.set(i, j, a);
            d1.set(i, j, b);
            d01.set(i, j, a + b);
        }
    }
    Ok(LossMatrix { d0, d1, d01 })
}
