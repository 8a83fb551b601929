//! Noisy circle networks for clustering experiments.
//!
//! Nodes are split into contiguous blocks, one block per circle, and sit at
//! equally spaced angles measured in a fixed frame. Node `i` therefore has
//! the same nominal angle in every graph, which gives node-indexed distance
//! matrices a meaningful correspondence across graphs.

use std::f64::consts::PI;
use std::str::FromStr;

use rand_distr::{Distribution, Normal};

use super::stream_rng;
use crate::complex::PointCloud;
use crate::error::{Error, Result};
use crate::graphfilt::WeightedGraph;

/// Circle radius used by every pattern.
pub const RADIUS: f64 = 1.0;
/// Distance between adjacent circle centers.
pub const SPACING: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    /// Group `g` is a two-circle motif rotated by `g·π/4`.
    Equivalent,
    /// Group `g` has `g + 1` circles in a row.
    Different,
}

impl Pattern {
    pub const MAX_GROUPS: usize = 4;

    /// Circle centers for group `g` (0-based).
    pub fn centers(self, g: usize) -> Vec<(f64, f64)> {
        match self {
            Pattern::Equivalent => {
                let th = g as f64 * PI / 4.0;
                let h = SPACING / 2.0;
                vec![(-h * th.cos(), -h * th.sin()), (h * th.cos(), h * th.sin())]
            }
            Pattern::Different => {
                let m = g + 1;
                let mid = (m as f64 - 1.0) / 2.0;
                (0..m).map(|c| (SPACING * (c as f64 - mid), 0.0)).collect()
            }
        }
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equiv" | "equivalent" => Ok(Pattern::Equivalent),
            "diff" | "different" => Ok(Pattern::Different),
            other => Err(Error::InvalidParameter(format!(
                "unknown pattern '{other}'; expected 'equiv' or 'diff'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationParams {
    pub n_nodes: usize,
    pub noise_sd: f64,
    pub per_group: usize,
    pub groups: usize,
}

impl Default for SimulationParams {
    fn default() -> Self {
        Self {
            n_nodes: 60,
            noise_sd: 0.3,
            per_group: 5,
            groups: 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulatedData {
    pub points: Vec<PointCloud>,
    pub graphs: Vec<WeightedGraph>,
    /// Group ids in `1..=groups`, grouped contiguously.
    pub labels: Vec<usize>,
}

fn noiseless(pattern: Pattern, g: usize, n_nodes: usize) -> Vec<(f64, f64)> {
    let centers = pattern.centers(g);
    let m = centers.len();
    let mut out = Vec::with_capacity(n_nodes);
    for (c, &(cx, cy)) in centers.iter().enumerate() {
        let start = c * n_nodes / m;
        let count = (c + 1) * n_nodes / m - start;
        for j in 0..count {
            let phi = 2.0 * PI * j as f64 / count as f64;
            out.push((cx + RADIUS * phi.cos(), cy + RADIUS * phi.sin()));
        }
    }
    out
}

/// Generates `groups × per_group` graphs whose weights are pairwise
/// Euclidean distances between noisy circle samples. Graph `i` draws its
/// noise from RNG stream `i`.
pub fn simulate_circles(
    pattern: Pattern,
    params: &SimulationParams,
    seed: u64,
) -> Result<SimulatedData> {
    if params.n_nodes < 3 {
        return Err(Error::InvalidParameter("need at least 3 nodes".into()));
    }
    if !(params.noise_sd >= 0.0 && params.noise_sd.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise sd must be finite and nonnegative, got {}",
            params.noise_sd
        )));
    }
    if params.groups == 0 || params.groups > Pattern::MAX_GROUPS || params.per_group == 0 {
        return Err(Error::InvalidParameter(format!(
            "need 1..={} groups and at least one graph per group",
            Pattern::MAX_GROUPS
        )));
    }
    if pattern == Pattern::Different && params.n_nodes < 3 * params.groups {
        return Err(Error::InvalidParameter(
            "too few nodes for the number of circles".into(),
        ));
    }
    let noise =
        Normal::new(0.0, params.noise_sd).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut out = SimulatedData {
        points: vec![],
        graphs: vec![],
        labels: vec![],
    };
    for g in 0..params.groups {
        let base = noiseless(pattern, g, params.n_nodes);
        for r in 0..params.per_group {
            let idx = (g * params.per_group + r) as u64;
            let mut rng = stream_rng(seed, idx);
            let coords: Vec<f64> = base
                .iter()
                .flat_map(|&(x, y)| [x + noise.sample(&mut rng), y + noise.sample(&mut rng)])
                .collect();
            let cloud = PointCloud::new(2, coords)?;
            out.graphs
                .push(WeightedGraph::new(cloud.distances().matrix().clone()));
            out.points.push(cloud);
            out.labels.push(g + 1);
        }
    }
    Ok(out)
}
