//! Geometric baselines on vectorized weight matrices.

use rand::Rng;

use super::stream_rng;
use crate::error::{Error, Result};
use crate::graphfilt::WeightedGraph;

const LLOYD_MAX_ITER: usize = 100;

/// Upper-triangular weights of a graph, row by row.
pub fn vectorize(g: &WeightedGraph) -> Vec<f64> {
    g.matrix().upper_triangle()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn vectors(graphs: &[WeightedGraph], k: usize) -> Result<Vec<Vec<f64>>> {
    let n = graphs.len();
    if k < 2 || n < k {
        return Err(Error::InvalidParameter(format!(
            "need 2 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let p = graphs[0].p();
    if let Some(i) = graphs.iter().position(|g| g.p() != p) {
        return Err(Error::IncompatibleCollection(format!(
            "graph {i} has {} nodes, graph 0 has {p}",
            graphs[i].p()
        )));
    }
    Ok(graphs.iter().map(vectorize).collect())
}

fn nearest(x: &[f64], centers: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, c) in centers.iter().enumerate() {
        let d = sq_dist(x, c);
        if d < best_d {
            best_d = d;
            best = j;
        }
    }
    best
}

/// Euclidean k-means with k-means++ seeding and a single Lloyd run.
/// Returns labels in `1..=k`.
pub fn baseline_kmeans(graphs: &[WeightedGraph], k: usize, seed: u64) -> Result<Vec<usize>> {
    let xs = vectors(graphs, k)?;
    let n = xs.len();
    let mut rng = stream_rng(seed, 0);
    let mut centers = vec![xs[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = xs.iter().map(|x| sq_dist(x, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut idx = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if u < w {
                    idx = i;
                    break;
                }
                u -= w;
            }
            idx
        } else {
            rng.random_range(0..n)
        };
        centers.push(xs[pick].clone());
        for (d, x) in d2.iter_mut().zip(&xs) {
            *d = d.min(sq_dist(x, centers.last().unwrap()));
        }
    }
    let mut assign: Vec<usize> = xs.iter().map(|x| nearest(x, &centers)).collect();
    for _ in 0..LLOYD_MAX_ITER {
        for (j, c) in centers.iter_mut().enumerate() {
            let members: Vec<&Vec<f64>> = xs
                .iter()
                .zip(&assign)
                .filter(|(_, &a)| a == j)
                .map(|(x, _)| x)
                .collect();
            if members.is_empty() {
                continue;
            }
            c.iter_mut().for_each(|v| *v = 0.0);
            for m in &members {
                c.iter_mut().zip(m.iter()).for_each(|(v, x)| *v += x);
            }
            let cnt = members.len() as f64;
            c.iter_mut().for_each(|v| *v /= cnt);
        }
        let next: Vec<usize> = xs.iter().map(|x| nearest(x, &centers)).collect();
        if next == assign {
            break;
        }
        assign = next;
    }
    Ok(assign.into_iter().map(|a| a + 1).collect())
}

/// Average-linkage agglomerative clustering on Euclidean distances between
/// vectorized graphs, cut at `k` clusters. Clusters are numbered by their
/// smallest member.
pub fn baseline_hierarchical(graphs: &[WeightedGraph], k: usize) -> Result<Vec<usize>> {
    let xs = vectors(graphs, k)?;
    let n = xs.len();
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = sq_dist(&xs[i], &xs[j]).sqrt();
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    let mut active: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    let mut owner: Vec<usize> = (0..n).collect();
    while active.len() > k {
        let mut best = (f64::INFINITY, 0, 0);
        for (ai, &a) in active.iter().enumerate() {
            for &b in &active[ai + 1..] {
                if dist[a][b] < best.0 {
                    best = (dist[a][b], a, b);
                }
            }
        }
        let (_, a, b) = best;
        for &c in &active {
            if c != a && c != b {
                let d = (size[a] as f64 * dist[a][c] + size[b] as f64 * dist[b][c])
                    / (size[a] + size[b]) as f64;
                dist[a][c] = d;
                dist[c][a] = d;
            }
        }
        size[a] += size[b];
        active.retain(|&c| c != b);
        owner.iter_mut().filter(|o| **o == b).for_each(|o| *o = a);
    }
    // Representatives are the smallest member of each cluster, so sorting
    // them numbers clusters by first appearance.
    Ok(owner
        .iter()
        .map(|o| active.iter().position(|a| a == o).unwrap() + 1)
        .collect())
}
