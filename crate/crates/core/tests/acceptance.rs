//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p topostat --test acceptance` (add `--release` for
//! timings closer to a production build).

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use common::*;
use topostat::clustering::*;
use topostat::complex::*;
use topostat::graphfilt::*;
use topostat::inference::*;
use topostat::morse1d::*;
use topostat::wasserstein::*;
use topostat::Execution;

type Outcome = Result<String, String>;
type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn within(elapsed: Duration, limit: Duration) -> Outcome {
    if elapsed < limit {
        Ok(String::new())
    } else {
        Err(format!("took {elapsed:?}, limit {limit:?}"))
    }
}

fn dense(b: &BoundaryMatrix) -> Vec<Vec<i64>> {
    b.to_dense()
        .chunks(b.cols().max(1))
        .map(<[i64]>::to_vec)
        .take(b.rows())
        .collect()
}

fn rips(cloud: &PointCloud, k: usize, eps: f64) -> SimplicialComplex {
    rips_complex(&cloud.distances(), &RipsParams::new(k, eps)).unwrap()
}

fn c1_worked_example() -> Outcome {
    let start = Instant::now();
    let c = triangle_with_tail();
    let b = boundary_matrices(&c).map_err(|e| e.to_string())?;
    let betti = betti_from_boundaries(&b, 5).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let got = (b[0].rank(), b[0].nullity(), b[1].rank());
    ensure!(got == (4, 2, 1), "rank/nullity/rank = {got:?}");
    ensure!(betti.as_slice() == [1, 1], "betti = {:?}", betti.as_slice());
    within(elapsed, Duration::from_millis(1))?;
    Ok(format!(
        "rank ∂1 = 4, nullity ∂1 = 2, rank ∂2 = 1, β = (1, 1) in {elapsed:?}"
    ))
}

fn c2_listings() -> Outcome {
    let x = five_point_cloud();

    let c = rips(&x, 3, 0.5);
    ensure!(
        c.simplices(0).to_vecs() == zero_based(&[&[1], &[2], &[3], &[4], &[5]]),
        "S{{1}} at 0.5"
    );
    ensure!(
        c.simplices(1).to_vecs() == zero_based(&[&[1, 3], &[2, 5], &[3, 4]]),
        "S{{2}} at 0.5"
    );
    let b = boundary_matrices(&c).unwrap();
    ensure!(
        dense(&b[0])
            == vec![
                vec![-1, 0, 0],
                vec![0, -1, 0],
                vec![1, 0, -1],
                vec![0, 0, 1],
                vec![0, 1, 0]
            ],
        "B{{1}} at 0.5"
    );

    let c = rips(&x, 3, 0.6);
    ensure!(
        c.simplices(1).to_vecs() == zero_based(&[&[1, 3], &[1, 4], &[2, 5], &[3, 4]]),
        "S{{2}} at 0.6"
    );
    ensure!(
        c.simplices(2).to_vecs() == zero_based(&[&[1, 3, 4]]),
        "S{{3}} at 0.6"
    );
    let b = boundary_matrices(&c).unwrap();
    ensure!(
        dense(&b[0])
            == vec![
                vec![-1, -1, 0, 0],
                vec![0, 0, -1, 0],
                vec![1, 0, 0, -1],
                vec![0, 1, 0, 1],
                vec![0, 0, 1, 0]
            ],
        "B{{1}} at 0.6"
    );
    ensure!(
        dense(&b[1]) == vec![vec![1], vec![-1], vec![0], vec![1]],
        "B{{2}} at 0.6"
    );

    let c = rips(&x, 3, 1.0);
    ensure!(
        c.simplices(2).to_vecs()
            == zero_based(&[&[1, 3, 4], &[2, 3, 4], &[2, 3, 5], &[2, 4, 5], &[3, 4, 5]]),
        "S{{3}} at 1.0"
    );
    ensure!(
        c.simplices(3).to_vecs() == zero_based(&[&[2, 3, 4, 5]]),
        "S{{4}} at 1.0"
    );
    let b = boundary_matrices(&c).unwrap();
    ensure!(
        dense(&b[2]) == vec![vec![0], vec![-1], vec![1], vec![-1], vec![1]],
        "B{{3}} at 1.0"
    );
    Ok("S{1..4} and B{1..3} match at ε = 0.5, 0.6, 1.0".into())
}

/// Random Rips complexes shared by criteria 3 and 4.
fn random_complexes() -> Vec<SimplicialComplex> {
    let mut r = rng(2024);
    (0..240)
        .map(|_| {
            let p = r.random_range(3..=12);
            let d = r.random_range(1..=3);
            let k = r.random_range(1..=3);
            let eps = r.random_range(0.0..1.0);
            rips(&random_cloud(&mut r, p, d), k, eps)
        })
        .collect()
}

fn c3_betti_cross_oracle(complexes: &[SimplicialComplex]) -> Outcome {
    let start = Instant::now();
    let mut mismatches = 0;
    for c in complexes {
        let p = c.n_vertices();
        let b = boundary_matrices(c).map_err(|e| e.to_string())?;
        let from_b = betti_from_boundaries(&b, p).map_err(|e| e.to_string())?;
        let from_h = betti_from_hodge(&hodge_laplacians(&b, p).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        // Components by DFS; β1 from Euler on the 1-skeleton minus the
        // floating-point rank of ∂2.
        let edges: Vec<(usize, usize)> = c.simplices(1).iter().map(|e| (e[0], e[1])).collect();
        let beta0 = dfs_components(p, &edges);
        let rank2 = b
            .get(1)
            .map_or(0, |m| svd_rank(m.rows(), m.cols(), &m.to_dense()));
        let beta1 = edges.len() + beta0 - p - rank2;
        let s = from_b.as_slice();
        if from_b != from_h || s[0] != beta0 || s.get(1).is_some_and(|&b1| b1 != beta1) {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(mismatches == 0, "{mismatches} mismatches");
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!(
        "{} complexes, 0 mismatches in {elapsed:.2?}",
        complexes.len()
    ))
}

fn c4_chain_complex(complexes: &[SimplicialComplex]) -> Outcome {
    let mut products = 0;
    for c in complexes {
        let b = boundary_matrices(c).map_err(|e| e.to_string())?;
        for w in b.windows(2) {
            let prod = w[0].compose(&w[1]).map_err(|e| e.to_string())?;
            ensure!(
                prod.iter().all(|&x| x == 0),
                "nonzero ∂∂ in dimension {}",
                w[1].dim()
            );
            products += 1;
        }
    }
    Ok(format!("{products} products ∂_(k-1)∂_k, all exactly zero"))
}

/// Random complete graphs shared by criteria 5 and 6.
fn random_graphs() -> Vec<WeightedGraph> {
    let mut r = rng(77);
    (0..510).map(|i| random_graph(&mut r, 4 + i % 17)).collect()
}

fn c5_decomposition(graphs: &[WeightedGraph]) -> Outcome {
    let start = Instant::now();
    let mut exhaustive = 0;
    for g in graphs {
        let p = g.p();
        let d = birth_death_decompose(g).map_err(|e| e.to_string())?;
        ensure!(
            d.births.len() == p - 1,
            "p = {p}: {} births",
            d.births.len()
        );
        ensure!(
            d.deaths.len() == (p - 1) * (p - 2) / 2,
            "p = {p}: {} deaths",
            d.deaths.len()
        );
        let mut all: Vec<f64> = d.births.iter().chain(&d.deaths).copied().collect();
        all.sort_by(f64::total_cmp);
        let mut w = g.matrix().upper_triangle();
        w.sort_by(f64::total_cmp);
        ensure!(
            all == w,
            "p = {p}: births and deaths do not partition the weights"
        );
        if p <= 8 {
            ensure!(
                d.births == exhaustive_max_spanning_tree(g),
                "p = {p}: births differ from exhaustive MST"
            );
            exhaustive += 1;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!(
        "{} graphs (p = 4..20), {exhaustive} checked exhaustively, in {elapsed:.2?}",
        graphs.len()
    ))
}

fn c6_monotone_curves(graphs: &[WeightedGraph]) -> Outcome {
    for g in graphs {
        let p = g.p();
        let t = maximal_thresholds(g);
        let c = betti_curve(g, &t).map_err(|e| e.to_string())?;
        for (i, &eps) in t.iter().enumerate() {
            let q = threshold_graph(g, eps)
                .map_err(|e| e.to_string())?
                .edge_count();
            ensure!(
                c.beta0[i] as i64 - c.beta1[i] as i64 == p as i64 - q as i64,
                "p = {p}: Euler fails at ε = {eps}"
            );
            if i + 1 < c.len() {
                ensure!(c.beta0[i + 1] >= c.beta0[i], "β0 decreases");
                ensure!(c.beta1[i + 1] <= c.beta1[i], "β1 increases");
                ensure!(c.beta0[i + 1] - c.beta0[i] <= 1, "β0 jumps by more than 1");
                ensure!(c.beta1[i] - c.beta1[i + 1] <= 1, "β1 drops by more than 1");
            }
        }
    }
    Ok(format!(
        "{} maximal filtrations monotone, unit steps, Euler exact",
        graphs.len()
    ))
}

fn c7_wasserstein() -> Outcome {
    let start = Instant::now();
    let mut r = rng(7);
    let pairs = 1200;
    let mut worst = 0.0f64;
    for i in 0..pairs {
        let q = 1 + i % 7;
        let a: Vec<f64> = (0..q).map(|_| r.random_range(-5.0..5.0)).collect();
        let b: Vec<f64> = (0..q).map(|_| r.random_range(-5.0..5.0)).collect();
        let (ga, gb) = (
            GraphDiagram::new(a.clone()).unwrap(),
            GraphDiagram::new(b.clone()).unwrap(),
        );
        let closed = wasserstein_graph(&ga, &gb, 2.0).map_err(|e| e.to_string())?;
        let brute = brute_force_wasserstein(&a, &b, 2.0);
        let hung =
            wasserstein_assignment(&ga.embed_as_births(10.0), &gb.embed_as_births(10.0), 2.0)
                .map_err(|e| e.to_string())?;
        worst = worst.max((closed - brute).abs()).max((closed - hung).abs());
    }
    let elapsed = start.elapsed();
    ensure!(worst < 1e-9, "max deviation {worst:e}");
    within(elapsed, Duration::from_secs(20))?;
    Ok(format!(
        "{pairs} pairs (q ≤ 7), max deviation {worst:.1e}, in {elapsed:.2?}"
    ))
}

fn c8_transpositions() -> Outcome {
    let mut r = rng(8);
    let graphs: Vec<WeightedGraph> = (0..20).map(|_| random_graph(&mut r, 10)).collect();
    let loss = pairwise_loss(&graphs).map_err(|e| e.to_string())?.d01;
    let labels = GroupLabels::from_sizes(10, 10).unwrap();
    let total = loss.total();

    let mut chain = TranspositionChain::new(&loss, &labels, 8, 0).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let mut drift = 0.0f64;
    for step in 1..=10_000usize {
        if step % DEFAULT_INTERVAL == 0 {
            chain.resample();
        } else {
            chain.random_transposition();
        }
        let (w, b) = naive_group_sums(&loss, chain.labels());
        let (cw, cb) = chain.sums();
        worst = worst.max((cw - w).abs()).max((cb - b).abs());
        drift = drift.max((2.0 * cw + 2.0 * cb - total).abs());
    }
    ensure!(worst <= 1e-9, "incremental sums off by {worst:e}");
    ensure!(drift <= 1e-9, "2L_W + 2L_B drifts by {drift:e}");

    // Per-step cost, best of several repetitions to damp timer noise.
    let per_step = |steps: usize, reps: usize| {
        (0..reps)
            .map(|rep| {
                let mut c = TranspositionChain::new(&loss, &labels, 9, rep as u64).unwrap();
                let t = Instant::now();
                let (out, _) = c.run(steps, usize::MAX);
                std::hint::black_box(out);
                t.elapsed().as_secs_f64() / steps as f64
            })
            .fold(f64::INFINITY, f64::min)
    };
    let small = per_step(10_000, 50);
    let large = per_step(1_000_000, 3);
    let ratio = large / small;
    ensure!(
        (0.5..=2.0).contains(&ratio),
        "per-step cost ratio 10⁶/10⁴ = {ratio:.2}"
    );
    Ok(format!(
        "10⁴ steps within {worst:.1e}, conservation within {drift:.1e}; {:.0} ns/step at 10⁴, {:.0} ns/step at 10⁶ (ratio {ratio:.2})",
        small * 1e9,
        large * 1e9
    ))
}

fn c9_exhaustive_null() -> Outcome {
    let m = 20_000;
    let labels = GroupLabels::from_sizes(5, 5).unwrap();
    let mut worst = 0.0f64;
    for i in 0..10u64 {
        let mut r = rng(900 + i);
        let loss = topostat::SymmetricMatrix::from_upper_fn(10, |_, _| r.random::<f64>());
        let exact = exhaustive_null(&loss, &labels).map_err(|e| e.to_string())?;
        ensure!(
            exact.n_perms == 252,
            "exhaustive null used {} relabelings",
            exact.n_perms
        );
        let mc = permutation_test(&loss, &labels, m, i).map_err(|e| e.to_string())?;
        let se = (exact.p_value * (1.0 - exact.p_value) / m as f64).sqrt();
        let z = (mc.p_value - exact.p_value).abs() / se;
        ensure!(
            z <= 3.0,
            "matrix {i}: exhaustive {:.4}, Monte Carlo {:.4}, {z:.2} SE",
            exact.p_value,
            mc.p_value
        );
        worst = worst.max(z);
    }
    Ok(format!(
        "10 matrices, {m} permutations each, max deviation {worst:.2} SE"
    ))
}

fn simulation_accuracy(pattern: Pattern) -> Result<(f64, f64, Duration), String> {
    let start = Instant::now();
    let mut ws = Vec::new();
    let mut km = Vec::new();
    for s in 0..100u64 {
        let data = simulate_circles(pattern, &SimulationParams::default(), s)
            .map_err(|e| e.to_string())?;
        let res = ws_kmeans_graphs(&data.graphs, &KMeansParams::new(4, s), Execution::Parallel)
            .map_err(|e| e.to_string())?;
        ws.push(
            cluster_accuracy(&data.labels, &res.best.assignment, 4)
                .map_err(|e| e.to_string())?
                .0,
        );
        let base = baseline_kmeans(&data.graphs, 4, s).map_err(|e| e.to_string())?;
        km.push(
            cluster_accuracy(&data.labels, &base, 4)
                .map_err(|e| e.to_string())?
                .0,
        );
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok((mean(&ws), mean(&km), start.elapsed()))
}

fn c10_topology_difference() -> Outcome {
    let (ws, km, elapsed) = simulation_accuracy(Pattern::Different)?;
    ensure!(ws >= 0.85, "Wasserstein accuracy {ws:.3} < 0.85");
    within(elapsed, Duration::from_secs(300))?;
    Ok(format!(
        "Wasserstein accuracy {ws:.3} (baseline k-means {km:.3}) over 100 seeds in {elapsed:.1?}"
    ))
}

fn c11_topology_equivalence() -> Outcome {
    let (ws, km, elapsed) = simulation_accuracy(Pattern::Equivalent)?;
    ensure!(ws <= 0.70, "Wasserstein accuracy {ws:.3} > 0.70");
    ensure!(km >= 0.80, "baseline k-means accuracy {km:.3} < 0.80");
    within(elapsed, Duration::from_secs(300))?;
    Ok(format!(
        "Wasserstein accuracy {ws:.3}, baseline k-means {km:.3} over 100 seeds in {elapsed:.1?}"
    ))
}

/// Elder rule on a spatially ordered list of (position, value, is_min),
/// by explicit component bookkeeping.
fn elder_pairs(crit: &[(f64, f64, bool)]) -> Vec<((f64, f64), (f64, f64))> {
    let n = crit.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| crit[a].1.total_cmp(&crit[b].1));
    // comp[i] = index of the minimum owning point i, once swept.
    let mut comp: Vec<Option<usize>> = vec![None; n];
    let mut pairs = Vec::new();
    for &i in &order {
        if crit[i].2 {
            comp[i] = Some(i);
            continue;
        }
        let left = (i > 0).then(|| comp[i - 1]).flatten();
        let right = (i + 1 < n).then(|| comp[i + 1]).flatten();
        match (left, right) {
            (Some(a), Some(b)) => {
                let (old, young) = if crit[a].1 <= crit[b].1 {
                    (a, b)
                } else {
                    (b, a)
                };
                pairs.push(((crit[young].0, crit[young].1), (crit[i].0, crit[i].1)));
                for c in comp.iter_mut() {
                    if *c == Some(young) {
                        *c = Some(old);
                    }
                }
                comp[i] = Some(old);
            }
            (a, b) => comp[i] = a.or(b),
        }
    }
    pairs
}

fn c12_morse_pairs() -> Outcome {
    let f = |t: f64| t + 7.0 * (t - 0.5).powi(2) + (8.0 * PI * t).cos() / 2.0;
    let df = |t: f64| 1.0 + 14.0 * (t - 0.5) - 4.0 * PI * (8.0 * PI * t).sin();
    let n = 501;
    let step = 1.0 / (n - 1) as f64;

    // Analytic critical points: boundary values plus bisected roots of f'.
    let mut analytic = vec![(0.0, f(0.0), df(0.0) > 0.0)];
    let m = 200_000;
    for i in 0..m {
        let (mut a, mut b) = (i as f64 / m as f64, (i + 1) as f64 / m as f64);
        if (df(a) > 0.0) != (df(b) > 0.0) {
            let rising = df(b) > 0.0;
            for _ in 0..60 {
                let c = 0.5 * (a + b);
                if (df(a) > 0.0) == (df(c) > 0.0) {
                    a = c
                } else {
                    b = c
                }
            }
            let t = 0.5 * (a + b);
            analytic.push((t, f(t), rising));
        }
    }
    analytic.push((1.0, f(1.0), df(1.0) < 0.0));
    let expected = elder_pairs(&analytic);

    let s = Signal1D::uniform(n, f).map_err(|e| e.to_string())?;
    let got =
        morse_pairs(&critical_points(&s).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure!(
        got.pairs.len() == expected.len(),
        "{} pairs, expected {}",
        got.pairs.len(),
        expected.len()
    );
    let mut got_sorted = got.pairs.clone();
    got_sorted.sort_by(|a, b| a.birth_position.total_cmp(&b.birth_position));
    let mut exp_sorted = expected.clone();
    exp_sorted.sort_by(|a, b| a.0 .0.total_cmp(&b.0 .0));
    for (g, e) in got_sorted.iter().zip(&exp_sorted) {
        ensure!(
            (g.birth_position - e.0 .0).abs() <= step && (g.death_position - e.1 .0).abs() <= step,
            "pair at ({:.4}, {:.4}) vs analytic ({:.4}, {:.4})",
            g.birth_position,
            g.death_position,
            e.0 .0,
            e.1 .0
        );
    }
    Ok(format!(
        "{} pairs match the analytic Elder-rule pairing within one grid step",
        expected.len()
    ))
}

fn main() -> ExitCode {
    let complexes = random_complexes();
    let graphs = random_graphs();
    let criteria: Vec<(&str, Check)> = vec![
        ("worked boundary example", Box::new(c1_worked_example)),
        ("boundary-matrix listings", Box::new(c2_listings)),
        (
            "Betti cross-oracle",
            Box::new(|| c3_betti_cross_oracle(&complexes)),
        ),
        (
            "chain-complex identity",
            Box::new(|| c4_chain_complex(&complexes)),
        ),
        (
            "birth-death decomposition",
            Box::new(|| c5_decomposition(&graphs)),
        ),
        (
            "monotone Betti curves",
            Box::new(|| c6_monotone_curves(&graphs)),
        ),
        ("Wasserstein closed form", Box::new(c7_wasserstein)),
        ("transposition correctness", Box::new(c8_transpositions)),
        ("exhaustive null", Box::new(c9_exhaustive_null)),
        (
            "clustering, topology difference",
            Box::new(c10_topology_difference),
        ),
        (
            "clustering, topological equivalence",
            Box::new(c11_topology_equivalence),
        ),
        ("Morse pairing", Box::new(c12_morse_pairs)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
