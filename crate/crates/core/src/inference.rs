//! Two-group inference with the between/within ratio statistic.
//!
//! Every test works on a fixed loss matrix. Relabelings only move entries
//! between the within-group sum `L_W` and the between-group sum `L_B`, whose
//! total is constant, so a single transposition can be scored in `O(n)`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::par::Execution;

/// Permutations drawn from one RNG stream.
const BLOCK: usize = 1024;

/// Relative tolerance when counting null samples at least as large as the
/// observed value, so recomputed ties are not lost to rounding.
const TIE_RTOL: f64 = 1e-10;

/// Largest relabeling count [`exhaustive_null`] will enumerate.
pub const MAX_EXHAUSTIVE: usize = 10_000_000;

/// Membership of `n` items in groups 1 and 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct GroupLabels {
    labels: Vec<u8>,
    n1: usize,
}

impl GroupLabels {
    pub fn new(labels: Vec<u8>) -> Result<Self> {
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l != 1 && l != 2) {
            return Err(Error::InvalidInput(format!(
                "label {l} at position {i}; expected 1 or 2"
            )));
        }
        let n1 = labels.iter().filter(|&&l| l == 1).count();
        let n2 = labels.len() - n1;
        if n1 < 2 || n2 < 2 {
            return Err(Error::InvalidInput(format!(
                "each group needs at least 2 members, got n1 = {n1}, n2 = {n2}"
            )));
        }
        Ok(Self { labels, n1 })
    }

    /// First `n1` items in group 1, the next `n2` in group 2.
    pub fn from_sizes(n1: usize, n2: usize) -> Result<Self> {
        let mut l = vec![1u8; n1];
        l.resize(n1 + n2, 2);
        Self::new(l)
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.labels.len() - self.n1
    }

    pub fn members(&self, group: u8) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.labels[i] == group).collect()
    }
}

impl TryFrom<Vec<u8>> for GroupLabels {
    type Error = Error;

    fn try_from(v: Vec<u8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<GroupLabels> for Vec<u8> {
    fn from(g: GroupLabels) -> Self {
        g.labels
    }
}

fn check_size(loss: &SymmetricMatrix, n: usize) -> Result<()> {
    if loss.n() != n {
        return Err(Error::InvalidInput(format!(
            "loss matrix is {0}x{0} but there are {n} labels",
            loss.n()
        )));
    }
    Ok(())
}

fn sums(loss: &SymmetricMatrix, labels: &[u8]) -> (f64, f64) {
    let n = labels.len();
    let (mut w, mut b) = (0.0, 0.0);
    for i in 0..n {
        let row = loss.row(i);
        for j in i + 1..n {
            if labels[i] == labels[j] {
                w += row[j];
            } else {
                b += row[j];
            }
        }
    }
    (w, b)
}

/// `(L_W, L_B)`: sums over unordered within-group and between-group pairs.
pub fn group_distances(loss: &SymmetricMatrix, labels: &GroupLabels) -> Result<(f64, f64)> {
    check_size(loss, labels.n())?;
    Ok(sums(loss, &labels.labels))
}

/// `φ = L_B / L_W`.
pub fn ratio_statistic(loss: &SymmetricMatrix, labels: &GroupLabels) -> Result<f64> {
    let (w, b) = group_distances(loss, labels)?;
    if w > 0.0 {
        Ok(b / w)
    } else {
        Err(Error::Degenerate(
            "within-group distance is zero; the ratio statistic is undefined".into(),
        ))
    }
}

/// Ratio with `L_W = 0 < L_B` mapped to `+∞`; `None` when both vanish.
fn guarded_ratio(w: f64, b: f64) -> Option<f64> {
    if w > 0.0 {
        Some(b / w)
    } else if b > 0.0 {
        Some(f64::INFINITY)
    } else {
        None
    }
}

fn observed_ratio(loss: &SymmetricMatrix, labels: &GroupLabels) -> Result<f64> {
    let (w, b) = group_distances(loss, labels)?;
    guarded_ratio(w, b).ok_or_else(|| Error::Degenerate("all pairwise distances are zero".into()))
}

fn at_least(x: f64, observed: f64) -> bool {
    if observed.is_infinite() {
        x == observed
    } else {
        x >= observed - TIE_RTOL * observed.abs()
    }
}

/// Outcome of a permutation-type test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioResult {
    pub observed: f64,
    pub p_value: f64,
    pub null_samples: Vec<f64>,
    /// Null samples used, i.e. `null_samples.len()`.
    pub n_perms: usize,
    /// Relabelings dropped because both sums were zero.
    pub skipped: usize,
}

impl RatioResult {
    fn smoothed(observed: f64, null_samples: Vec<f64>, skipped: usize) -> Self {
        let hits = null_samples
            .iter()
            .filter(|&&x| at_least(x, observed))
            .count();
        let n_perms = null_samples.len();
        Self {
            observed,
            p_value: (hits + 1) as f64 / (n_perms + 1) as f64,
            null_samples,
            n_perms,
            skipped,
        }
    }

    /// Equal-width histogram of the finite null samples as
    /// `(bin centre, count)`; infinite samples land in the last bin.
    pub fn histogram(&self, bins: usize) -> Vec<(f64, usize)> {
        let finite = self.null_samples.iter().copied().filter(|x| x.is_finite());
        let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
            (a.min(x), b.max(x))
        });
        if bins == 0 || self.null_samples.is_empty() {
            return vec![];
        }
        if !lo.is_finite() {
            return vec![(f64::INFINITY, self.null_samples.len())];
        }
        let width = if hi > lo {
            (hi - lo) / bins as f64
        } else {
            1.0
        };
        let mut counts = vec![0usize; bins];
        for &x in &self.null_samples {
            let k = if x.is_finite() {
                ((x - lo) / width) as usize
            } else {
                bins - 1
            };
            counts[k.min(bins - 1)] += 1;
        }
        counts
            .into_iter()
            .enumerate()
            .map(|(k, c)| (lo + (k as f64 + 0.5) * width, c))
            .collect()
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// [`permutation_test_with`] under the default execution policy.
pub fn permutation_test(
    loss: &SymmetricMatrix,
    labels: &GroupLabels,
    n_perms: usize,
    seed: u64,
) -> Result<RatioResult> {
    permutation_test_with(loss, labels, n_perms, seed, Execution::default())
}

/// Monte Carlo null of φ under uniform relabelings that keep group sizes.
///
/// Permutations are drawn in fixed blocks, each from its own RNG stream, so
/// the result depends only on `seed`.
pub fn permutation_test_with(
    loss: &SymmetricMatrix,
    labels: &GroupLabels,
    n_perms: usize,
    seed: u64,
    exec: Execution,
) -> Result<RatioResult> {
    if n_perms == 0 {
        return Err(Error::InvalidParameter("n_perms must be at least 1".into()));
    }
    let observed = observed_ratio(loss, labels)?;
    let blocks = n_perms.div_ceil(BLOCK);
    let per_block = exec.map_range(blocks, |blk| {
        let mut rng = stream_rng(seed, blk as u64);
        let mut l = labels.labels.clone();
        let count = BLOCK.min(n_perms - blk * BLOCK);
        (0..count)
            .map(|_| {
                l.shuffle(&mut rng);
                let (w, b) = sums(loss, &l);
                guarded_ratio(w, b)
            })
            .collect::<Vec<_>>()
    });
    let mut samples = Vec::with_capacity(n_perms);
    let mut skipped = 0;
    for v in per_block.into_iter().flatten() {
        match v {
            Some(x) => samples.push(x),
            None => skipped += 1,
        }
    }
    Ok(RatioResult::smoothed(observed, samples, skipped))
}

/// Exact null over all `C(n, n1)` relabelings, the observed one included.
/// The p-value is the plain tail fraction without smoothing.
pub fn exhaustive_null(loss: &SymmetricMatrix, labels: &GroupLabels) -> Result<RatioResult> {
    let observed = observed_ratio(loss, labels)?;
    let (n, n1) = (labels.n(), labels.n1());
    let total = binomial(n, n1);
    if total > MAX_EXHAUSTIVE {
        return Err(Error::ResourceLimit {
            what: "relabeling count",
            cap: MAX_EXHAUSTIVE,
        });
    }
    let mut samples = Vec::with_capacity(total);
    let mut skipped = 0;
    let mut l = vec![2u8; n];
    let mut choose: Vec<usize> = (0..n1).collect();
    loop {
        l.iter_mut().for_each(|x| *x = 2);
        for &c in &choose {
            l[c] = 1;
        }
        let (w, b) = sums(loss, &l);
        match guarded_ratio(w, b) {
            Some(x) => samples.push(x),
            None => skipped += 1,
        }
        // Next combination in lexicographic order.
        let mut i = n1;
        loop {
            if i == 0 {
                let hits = samples.iter().filter(|&&x| at_least(x, observed)).count();
                let n_perms = samples.len();
                return Ok(RatioResult {
                    observed,
                    p_value: hits as f64 / n_perms as f64,
                    null_samples: samples,
                    n_perms,
                    skipped,
                });
            }
            i -= 1;
            if choose[i] != i + n - n1 {
                break;
            }
        }
        choose[i] += 1;
        for j in i + 1..n1 {
            choose[j] = choose[j - 1] + 1;
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// A relabeling chain that swaps one member of each group per step.
#[derive(Debug, Clone)]
pub struct TranspositionChain<'a> {
    loss: &'a SymmetricMatrix,
    labels: Vec<u8>,
    g1: Vec<usize>,
    g2: Vec<usize>,
    lw: f64,
    lb: f64,
    rng: ChaCha8Rng,
}

impl<'a> TranspositionChain<'a> {
    pub fn new(
        loss: &'a SymmetricMatrix,
        labels: &GroupLabels,
        seed: u64,
        stream: u64,
    ) -> Result<Self> {
        check_size(loss, labels.n())?;
        let mut c = Self {
            loss,
            labels: labels.labels.clone(),
            g1: labels.members(1),
            g2: labels.members(2),
            lw: 0.0,
            lb: 0.0,
            rng: stream_rng(seed, stream),
        };
        c.resync();
        Ok(c)
    }

    pub fn sums(&self) -> (f64, f64) {
        (self.lw, self.lb)
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn ratio(&self) -> Option<f64> {
        guarded_ratio(self.lw, self.lb)
    }

    fn resync(&mut self) {
        (self.lw, self.lb) = sums(self.loss, &self.labels);
    }

    /// Swaps the `a`-th member of group 1 with the `b`-th member of group 2.
    pub fn transpose(&mut self, a: usize, b: usize) {
        let (k, l) = (self.g1[a], self.g2[b]);
        let (rk, rl) = (self.loss.row(k), self.loss.row(l));
        let mut delta = 0.0;
        for &i in &self.g1 {
            if i != k {
                delta += rl[i] - rk[i];
            }
        }
        for &i in &self.g2 {
            if i != l {
                delta += rk[i] - rl[i];
            }
        }
        self.lw += delta;
        self.lb -= delta;
        self.g1[a] = l;
        self.g2[b] = k;
        self.labels[k] = 2;
        self.labels[l] = 1;
    }

    /// One uniformly chosen transposition; returns the pair of positions.
    pub fn random_transposition(&mut self) -> (usize, usize) {
        let a = self.rng.random_range(0..self.g1.len());
        let b = self.rng.random_range(0..self.g2.len());
        self.transpose(a, b);
        (a, b)
    }

    /// Full uniform relabeling followed by exact recomputation of the sums.
    pub fn resample(&mut self) {
        self.labels.shuffle(&mut self.rng);
        self.g1.clear();
        self.g2.clear();
        for (i, &l) in self.labels.iter().enumerate() {
            if l == 1 {
                self.g1.push(i);
            } else {
                self.g2.push(i);
            }
        }
        self.resync();
    }

    /// Runs `steps` steps; every `interval`-th step is a full relabeling.
    /// Returns the ratio after each step and the number of skipped steps.
    pub fn run(&mut self, steps: usize, interval: usize) -> (Vec<f64>, usize) {
        let mut out = Vec::with_capacity(steps);
        let mut skipped = 0;
        for s in 1..=steps {
            if s % interval == 0 {
                self.resample();
            } else {
                self.random_transposition();
            }
            match self.ratio() {
                Some(x) => out.push(x),
                None => skipped += 1,
            }
        }
        (out, skipped)
    }
}

/// Default gap between full relabelings in a transposition chain.
pub const DEFAULT_INTERVAL: usize = 1000;

/// Single-chain transposition test.
pub fn transposition_test(
    loss: &SymmetricMatrix,
    labels: &GroupLabels,
    n_transpositions: usize,
    full_perm_interval: usize,
    seed: u64,
) -> Result<RatioResult> {
    transposition_test_chains(
        loss,
        labels,
        n_transpositions,
        full_perm_interval,
        1,
        seed,
        Execution::Sequential,
    )
}

/// Runs `chains` independent chains of `n_transpositions` steps each, on
/// separate RNG streams, and pools their samples in chain order.
pub fn transposition_test_chains(
    loss: &SymmetricMatrix,
    labels: &GroupLabels,
    n_transpositions: usize,
    full_perm_interval: usize,
    chains: usize,
    seed: u64,
    exec: Execution,
) -> Result<RatioResult> {
    if n_transpositions == 0 || full_perm_interval == 0 || chains == 0 {
        return Err(Error::InvalidParameter(
            "steps, interval and chain count must all be at least 1".into(),
        ));
    }
    let observed = observed_ratio(loss, labels)?;
    let runs: Vec<Result<(Vec<f64>, usize)>> = exec.map_range(chains, |c| {
        let mut chain = TranspositionChain::new(loss, labels, seed, c as u64)?;
        Ok(chain.run(n_transpositions, full_perm_interval))
    });
    let mut samples = Vec::with_capacity(chains * n_transpositions);
    let mut skipped = 0;
    for r in runs {
        let (s, k) = r?;
        samples.extend(s);
        skipped += k;
    }
    Ok(RatioResult::smoothed(observed, samples, skipped))
}
