//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use topostat::complex::PointCloud;
use topostat::graphfilt::WeightedGraph;
use topostat::SymmetricMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_cloud(rng: &mut impl Rng, p: usize, d: usize) -> PointCloud {
    let coords = (0..p * d).map(|_| rng.random::<f64>()).collect();
    PointCloud::new(d, coords).unwrap()
}

/// Complete graph with i.i.d. uniform weights in (0, 1], all distinct.
pub fn random_graph(rng: &mut impl Rng, p: usize) -> WeightedGraph {
    loop {
        let m = SymmetricMatrix::from_upper_fn(p, |_, _| 1.0 - rng.random::<f64>());
        let mut w = m.upper_triangle();
        w.sort_by(f64::total_cmp);
        if w.windows(2).all(|x| x[0] < x[1]) {
            return WeightedGraph::new(m);
        }
    }
}

/// Connected components by depth-first search over an edge list.
pub fn dfs_components(p: usize, edges: &[(usize, usize)]) -> usize {
    let mut adj = vec![Vec::new(); p];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; p];
    let mut count = 0;
    for s in 0..p {
        if seen[s] {
            continue;
        }
        count += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
    }
    count
}

/// Numerical rank by SVD with tolerance `max(m, n) · eps · σ_max`.
pub fn svd_rank(rows: usize, cols: usize, dense: &[i64]) -> usize {
    if rows == 0 || cols == 0 {
        return 0;
    }
    let m = DMatrix::from_row_iterator(rows, cols, dense.iter().map(|&x| x as f64));
    let sv = m.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let tol = rows.max(cols) as f64 * f64::EPSILON * smax;
    sv.iter().filter(|&&s| s > tol).count()
}

/// Every vertex subset of size `k + 1` whose pairwise distances are all
/// within `eps`, in lexicographic order.
pub fn enumerate_cliques(dist: &SymmetricMatrix, k: usize, eps: f64) -> Vec<Vec<usize>> {
    let p = dist.n();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        dist: &SymmetricMatrix,
        p: usize,
        size: usize,
        eps: f64,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for v in start..p {
            if cur.iter().all(|&u| dist.get(u, v) <= eps) {
                cur.push(v);
                rec(dist, p, size, eps, v + 1, cur, out);
                cur.pop();
            }
        }
    }
    rec(dist, p, k + 1, eps, 0, &mut cur, &mut out);
    out
}

/// Visits every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Minimum of `Σ |a_i - b_π(i)|^r` over all bijections, then the r-th root.
pub fn brute_force_wasserstein(a: &[f64], b: &[f64], r: f64) -> f64 {
    let mut best = f64::INFINITY;
    for_each_permutation(a.len(), |pi| {
        let s: f64 = a
            .iter()
            .enumerate()
            .map(|(i, x)| (x - b[pi[i]]).abs().powf(r))
            .sum();
        best = best.min(s);
    });
    best.powf(1.0 / r)
}

/// Maximum spanning tree weight set by enumerating every labelled tree on
/// `p` nodes through Prüfer sequences.
pub fn exhaustive_max_spanning_tree(g: &WeightedGraph) -> Vec<f64> {
    let p = g.p();
    if p == 2 {
        return vec![g.weight(0, 1)];
    }
    let len = p - 2;
    let mut seq = vec![0usize; len];
    let mut best = (f64::NEG_INFINITY, Vec::new());
    loop {
        let edges = prufer_decode(&seq, p);
        let total: f64 = edges.iter().map(|&(a, b)| g.weight(a, b)).sum();
        if total > best.0 {
            best = (total, edges);
        }
        // Odometer increment.
        let mut i = 0;
        loop {
            if i == len {
                let mut w: Vec<f64> = best.1.iter().map(|&(a, b)| g.weight(a, b)).collect();
                w.sort_by(f64::total_cmp);
                return w;
            }
            seq[i] += 1;
            if seq[i] < p {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
    }
}

fn prufer_decode(seq: &[usize], p: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; p];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(p - 1);
    for &s in seq {
        let leaf = (0..p).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..p).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Maximum spanning tree total by Prim's algorithm.
pub fn prim_max_total(g: &WeightedGraph) -> f64 {
    let p = g.p();
    let mut in_tree = vec![false; p];
    let mut best: Vec<f64> = (0..p)
        .map(|v| {
            if v == 0 {
                f64::NEG_INFINITY
            } else {
                g.weight(0, v)
            }
        })
        .collect();
    in_tree[0] = true;
    let mut total = 0.0;
    for _ in 1..p {
        let v = (0..p)
            .filter(|&v| !in_tree[v])
            .max_by(|&a, &b| best[a].total_cmp(&best[b]))
            .unwrap();
        in_tree[v] = true;
        total += best[v];
        for u in 0..p {
            if !in_tree[u] {
                best[u] = best[u].max(g.weight(v, u));
            }
        }
    }
    total
}

/// Loss-matrix sums by direct summation over ordered pairs, halved.
pub fn naive_group_sums(loss: &SymmetricMatrix, labels: &[u8]) -> (f64, f64) {
    let n = labels.len();
    let (mut w, mut b) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                w += loss.get(i, j);
            } else {
                b += loss.get(i, j);
            }
        }
    }
    (w / 2.0, b / 2.0)
}

/// Five points whose Rips complexes at radius 0.5, 0.6 and 1.0 match the
/// worked boundary-matrix listings.
pub fn five_point_cloud() -> PointCloud {
    PointCloud::from_rows(&[
        vec![0.07, 1.15],
        vec![0.5, 0.09],
        vec![0.15, 0.97],
        vec![0.51, 0.82],
        vec![0.23, 0.09],
    ])
    .unwrap()
}

/// Converts 1-based index tuples to 0-based.
pub fn zero_based(rows: &[&[usize]]) -> Vec<Vec<usize>> {
    rows.iter()
        .map(|r| r.iter().map(|v| v - 1).collect())
        .collect()
}

/// Filled triangle v1v2v3 plus edges v2v4, v4v1 and v4v5 (1-based names).
pub fn triangle_with_tail() -> topostat::complex::SimplicialComplex {
    topostat::complex::SimplicialComplex::from_levels(vec![
        (0..5).map(|v| vec![v]).collect(),
        zero_based(&[&[1, 2], &[1, 3], &[1, 4], &[2, 3], &[2, 4], &[4, 5]]),
        zero_based(&[&[1, 2, 3]]),
    ])
    .unwrap()
}
