use super::{DistanceMatrix, SimplexList, SimplicialComplex};
use crate::error::{Error, Result};

/// Default cap on the total number of simplices materialised.
pub const DEFAULT_MAX_SIMPLICES: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RipsParams {
    pub max_dim: usize,
    pub radius: f64,
    pub max_simplices: usize,
}

impl RipsParams {
    pub fn new(max_dim: usize, radius: f64) -> Self {
        Self {
            max_dim,
            radius,
            max_simplices: DEFAULT_MAX_SIMPLICES,
        }
    }
}

struct Bitset(Vec<u64>);

impl Bitset {
    fn words(n: usize) -> usize {
        n.div_ceil(64)
    }
}

/// Rips k-skeleton at scale `radius`: a tuple of vertices is a simplex iff
/// all its pairwise distances are `<= radius`.
///
/// Built by clique expansion: every (j-1)-simplex is extended by each
/// higher-indexed vertex adjacent to all of its members, which yields each
/// level already in lexicographic order.
pub fn rips_complex(dist: &DistanceMatrix, params: &RipsParams) -> Result<SimplicialComplex> {
    let eps = params.radius;
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "radius must be finite and nonnegative, got {eps}"
        )));
    }
    let p = dist.n();
    if p == 0 {
        return Err(Error::InvalidInput("no points".into()));
    }
    let words = Bitset::words(p);
    let adjacency: Vec<Bitset> = (0..p)
        .map(|i| {
            let mut b = vec![0u64; words];
            for j in 0..p {
                if j != i && dist.get(i, j) <= eps {
                    b[j / 64] |= 1 << (j % 64);
                }
            }
            Bitset(b)
        })
        .collect();

    let mut total = p;
    if total > params.max_simplices {
        return Err(Error::ResourceLimit {
            what: "simplex count",
            cap: params.max_simplices,
        });
    }
    let mut vertices = SimplexList::empty(1);
    for v in 0..p {
        vertices.push(&[v]);
    }
    let mut levels = vec![vertices];
    let mut common = vec![0u64; words];
    let mut simplex = Vec::with_capacity(params.max_dim + 1);
    for j in 1..=params.max_dim {
        let prev = &levels[j - 1];
        let mut next = SimplexList::empty(j + 1);
        for s in prev.iter() {
            common.copy_from_slice(&adjacency[s[0]].0);
            for &v in &s[1..] {
                for (c, a) in common.iter_mut().zip(&adjacency[v].0) {
                    *c &= a;
                }
            }
            let last = s[s.len() - 1];
            for (w, &word) in common.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let v = w * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    if v <= last {
                        continue;
                    }
                    total += 1;
                    if total > params.max_simplices {
                        return Err(Error::ResourceLimit {
                            what: "simplex count",
                            cap: params.max_simplices,
                        });
                    }
                    simplex.clear();
                    simplex.extend_from_slice(s);
                    simplex.push(v);
                    next.push(&simplex);
                }
            }
        }
        levels.push(next);
    }
    Ok(SimplicialComplex::from_sorted_levels(levels))
}
