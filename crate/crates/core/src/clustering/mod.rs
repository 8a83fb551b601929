//! Topological clustering of graph collections.
//!
//! Each graph is summarised by its sorted birth and death vectors. For
//! equal-size one-dimensional diagrams the 2-Wasserstein barycenter is the
//! coordinate-wise mean of the sorted vectors, so Wasserstein k-means reduces
//! to alternating exact means and nearest-mean reassignment.

mod baseline;
mod sim;

pub use baseline::{baseline_hierarchical, baseline_kmeans, vectorize};
pub use sim::{simulate_circles, Pattern, SimulatedData, SimulationParams};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assignment;
use crate::error::{Error, Result};
use crate::graphfilt::WeightedGraph;
use crate::par::Execution;
use crate::wasserstein::{GraphDiagram, GraphDiagrams};

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn mean_vector<'a>(vs: impl Iterator<Item = &'a [f64]>, len: usize) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; len];
    let mut count = 0usize;
    for v in vs {
        if v.len() != len {
            return Err(Error::IncompatibleCollection(format!(
                "diagram of size {} among diagrams of size {len}",
                v.len()
            )));
        }
        acc.iter_mut().zip(v).for_each(|(a, x)| *a += x);
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptyCluster);
    }
    let c = count as f64;
    acc.iter_mut().for_each(|a| *a /= c);
    Ok(acc)
}

/// Wasserstein barycenter of equal-size graph diagrams: the coordinate-wise
/// mean of the sorted birth vectors and of the sorted death vectors.
pub fn cluster_mean<'a, I>(members: I) -> Result<GraphDiagrams>
where
    I: IntoIterator<Item = &'a GraphDiagrams>,
    I::IntoIter: Clone,
{
    let it = members.into_iter();
    let first = it.clone().next().ok_or(Error::EmptyCluster)?;
    let (n0, n1) = (first.zero.len(), first.one.len());
    let zero = mean_vector(it.clone().map(|d| d.zero.values()), n0)?;
    let one = mean_vector(it.map(|d| d.one.values()), n1)?;
    // Averages of sorted vectors stay sorted, so no re-sorting happens here.
    Ok(GraphDiagrams {
        zero: GraphDiagram::new(zero)?,
        one: GraphDiagram::new(one)?,
    })
}

/// Squared topological distance `D0² + D1²` at order 2.
pub fn squared_distance(a: &GraphDiagrams, b: &GraphDiagrams) -> f64 {
    let sq = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>();
    sq(a.zero.values(), b.zero.values()) + sq(a.one.values(), b.one.values())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeansParams {
    pub k: usize,
    pub n_seeds: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl KMeansParams {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            n_seeds: 100,
            max_iter: 100,
            seed,
        }
    }
}

/// One k-means run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterState {
    /// Cluster ids in `1..=k`.
    pub assignment: Vec<usize>,
    pub means: Vec<GraphDiagrams>,
    /// `l_W = Σ_j Σ_{X ∈ C_j} (D0² + D1²)(X, μ_j)`.
    pub objective: f64,
    /// Objective after every mean update and every reassignment.
    pub history: Vec<f64>,
    pub iterations: usize,
    /// False when the run stopped at `max_iter`.
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    /// Run with the smallest objective; ties go to the earliest seed.
    pub best: ClusterState,
    pub runs: Vec<ClusterState>,
}

fn objective(diagrams: &[GraphDiagrams], assign: &[usize], means: &[GraphDiagrams]) -> f64 {
    diagrams
        .iter()
        .zip(assign)
        .map(|(d, &a)| squared_distance(d, &means[a]))
        .sum()
}

fn compute_means(
    diagrams: &[GraphDiagrams],
    assign: &[usize],
    k: usize,
) -> Vec<Option<GraphDiagrams>> {
    (0..k)
        .map(|j| {
            let members: Vec<&GraphDiagrams> = diagrams
                .iter()
                .zip(assign)
                .filter(|(_, &a)| a == j)
                .map(|(d, _)| d)
                .collect();
            cluster_mean(members.iter().copied()).ok()
        })
        .collect()
}

/// Mean update with empty-cluster repair: each empty cluster receives the
/// point farthest from its own mean among clusters with at least two members
/// (lowest index on ties).
fn update_means(diagrams: &[GraphDiagrams], assign: &mut [usize], k: usize) -> Vec<GraphDiagrams> {
    loop {
        let means = compute_means(diagrams, assign, k);
        let Some(empty) = means.iter().position(Option::is_none) else {
            return means.into_iter().map(Option::unwrap).collect();
        };
        let mut sizes = vec![0usize; k];
        assign.iter().for_each(|&a| sizes[a] += 1);
        let mut far = None;
        let mut far_cost = f64::NEG_INFINITY;
        for (i, d) in diagrams.iter().enumerate() {
            let a = assign[i];
            if sizes[a] < 2 {
                continue;
            }
            let c = squared_distance(d, means[a].as_ref().expect("nonempty cluster"));
            if c > far_cost {
                far_cost = c;
                far = Some(i);
            }
        }
        assign[far.expect("n >= k guarantees a cluster with two members")] = empty;
    }
}

fn nearest(d: &GraphDiagrams, means: &[GraphDiagrams]) -> usize {
    let mut best = 0;
    let mut best_cost = f64::INFINITY;
    for (j, m) in means.iter().enumerate() {
        let c = squared_distance(d, m);
        if c < best_cost {
            best_cost = c;
            best = j;
        }
    }
    best
}

fn single_run(
    diagrams: &[GraphDiagrams],
    k: usize,
    max_iter: usize,
    rng: &mut impl Rng,
) -> ClusterState {
    let n = diagrams.len();
    let mut assign: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    let mut history = Vec::new();
    let mut prev: Option<Vec<GraphDiagrams>> = None;
    let mut iterations = 0;
    let mut converged = false;
    let means = loop {
        let means = update_means(diagrams, &mut assign, k);
        history.push(objective(diagrams, &assign, &means));
        if prev.as_ref() == Some(&means) {
            converged = true;
            break means;
        }
        if iterations == max_iter {
            break means;
        }
        iterations += 1;
        for (a, d) in assign.iter_mut().zip(diagrams) {
            *a = nearest(d, &means);
        }
        history.push(objective(diagrams, &assign, &means));
        prev = Some(means);
    };
    ClusterState {
        assignment: assign.iter().map(|a| a + 1).collect(),
        objective: objective(diagrams, &assign, &means),
        means,
        history,
        iterations,
        converged,
    }
}

/// Wasserstein k-means over `n_seeds` uniformly random initial assignments.
pub fn ws_kmeans(
    diagrams: &[GraphDiagrams],
    params: &KMeansParams,
    exec: Execution,
) -> Result<KMeansResult> {
    let n = diagrams.len();
    let k = params.k;
    if k < 2 || n < k {
        return Err(Error::InvalidParameter(format!(
            "need 2 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    if params.n_seeds == 0 {
        return Err(Error::InvalidParameter("n_seeds must be at least 1".into()));
    }
    let (n0, n1) = (diagrams[0].zero.len(), diagrams[0].one.len());
    if let Some(i) = diagrams
        .iter()
        .position(|d| d.zero.len() != n0 || d.one.len() != n1)
    {
        return Err(Error::IncompatibleCollection(format!(
            "item {i} has diagram sizes ({}, {}), item 0 has ({n0}, {n1})",
            diagrams[i].zero.len(),
            diagrams[i].one.len()
        )));
    }
    let runs = exec.map_range(params.n_seeds, |s| {
        let mut rng = stream_rng(params.seed, s as u64);
        single_run(diagrams, k, params.max_iter, &mut rng)
    });
    let best_idx = (0..runs.len())
        .min_by(|&a, &b| {
            runs[a]
                .objective
                .total_cmp(&runs[b].objective)
                .then(a.cmp(&b))
        })
        .expect("at least one run");
    Ok(KMeansResult {
        best: runs[best_idx].clone(),
        runs,
    })
}

/// Decomposes each graph, then runs [`ws_kmeans`].
pub fn ws_kmeans_graphs(
    graphs: &[WeightedGraph],
    params: &KMeansParams,
    exec: Execution,
) -> Result<KMeansResult> {
    if let Some(first) = graphs.first() {
        if let Some(i) = graphs.iter().position(|g| g.p() != first.p()) {
            return Err(Error::IncompatibleCollection(format!(
                "graph {i} has {} nodes, graph 0 has {}",
                graphs[i].p(),
                first.p()
            )));
        }
    }
    let diagrams = exec.try_map_slice(graphs, GraphDiagrams::from_graph)?;
    ws_kmeans(&diagrams, params, exec)
}

/// `f[i][j]` counts items with true label `i + 1` predicted as `j + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }
}

/// Best-matching accuracy: `max_Q tr(QF) / n` over permutation matrices,
/// solved as a linear sum assignment.
pub fn cluster_accuracy(
    y_true: &[usize],
    y_pred: &[usize],
    k: usize,
) -> Result<(f64, ConfusionMatrix)> {
    if y_true.len() != y_pred.len() {
        return Err(Error::InvalidInput(format!(
            "label lists differ in length: {} vs {}",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() || k == 0 {
        return Err(Error::InvalidInput(
            "need at least one label and k >= 1".into(),
        ));
    }
    let mut counts = vec![vec![0usize; k]; k];
    for (i, (&t, &p)) in y_true.iter().zip(y_pred).enumerate() {
        if !(1..=k).contains(&t) || !(1..=k).contains(&p) {
            return Err(Error::InvalidInput(format!(
                "labels at position {i} are ({t}, {p}); expected values in 1..={k}"
            )));
        }
        counts[t - 1][p - 1] += 1;
    }
    let weights: Vec<f64> = counts.iter().flatten().map(|&c| c as f64).collect();
    let a = assignment::solve_max(&weights, k, k)?;
    Ok((a.cost / y_true.len() as f64, ConfusionMatrix { counts }))
}
