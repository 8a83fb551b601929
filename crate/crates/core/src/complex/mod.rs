//! Simplicial complexes, Rips construction, boundary matrices and Betti
//! numbers.
//!
//! Simplices are stored as strictly increasing vertex tuples; the orientation
//! of every simplex is the one induced by that order. Each dimension keeps its
//! simplices in lexicographic order, so face lookup is a binary search.

mod boundary;
mod hodge;
pub mod rank;
mod rips;

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;

pub use boundary::{betti_from_boundaries, boundary_matrices, BettiVector, BoundaryMatrix};
pub use hodge::{betti_from_hodge, hodge_laplacians, IntMatrix};
pub use rips::{rips_complex, RipsParams, DEFAULT_MAX_SIMPLICES};

/// `p` points in `R^d`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput(
                "points need at least one coordinate".into(),
            ));
        }
        if coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidInput(format!(
                "{} coordinates do not form points of dimension {dim}",
                coords.len()
            )));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::InvalidInput(format!(
                "point {i} has {} coordinates, expected {dim}",
                rows[i].len()
            )));
        }
        Self::new(dim, rows.concat())
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Pairwise Euclidean distances.
    pub fn distances(&self) -> DistanceMatrix {
        let m = SymmetricMatrix::from_upper_fn(self.len(), |i, j| {
            self.point(i)
                .iter()
                .zip(self.point(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        });
        DistanceMatrix(m)
    }
}

/// Symmetric, nonnegative, zero-diagonal distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix(SymmetricMatrix);

impl DistanceMatrix {
    pub fn new(m: SymmetricMatrix) -> Result<Self> {
        if let Some(v) = m.as_slice().iter().find(|v| **v < 0.0) {
            return Err(Error::InvalidInput(format!("negative distance {v}")));
        }
        Ok(Self(m))
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(SymmetricMatrix::from_rows(rows)?)
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn matrix(&self) -> &SymmetricMatrix {
        &self.0
    }
}

/// Simplices of one dimension: `len()` tuples of `width` sorted vertices,
/// in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexList {
    width: usize,
    verts: Vec<usize>,
}

impl SimplexList {
    pub(crate) fn empty(width: usize) -> Self {
        Self {
            width,
            verts: Vec::new(),
        }
    }

    /// Canonicalises arbitrary tuples: sorts each, then sorts and dedups the list.
    fn from_tuples(width: usize, tuples: Vec<Vec<usize>>) -> Result<Self> {
        let mut rows = Vec::with_capacity(tuples.len());
        for mut t in tuples {
            if t.len() != width {
                return Err(Error::InvalidComplex(format!(
                    "simplex {t:?} has {} vertices, expected {width}",
                    t.len()
                )));
            }
            t.sort_unstable();
            if t.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidComplex(format!(
                    "simplex {t:?} repeats a vertex"
                )));
            }
            rows.push(t);
        }
        rows.sort_unstable();
        rows.dedup();
        Ok(Self {
            width,
            verts: rows.concat(),
        })
    }

    pub(crate) fn push(&mut self, simplex: &[usize]) {
        debug_assert_eq!(simplex.len(), self.width);
        self.verts.extend_from_slice(simplex);
    }

    /// Number of vertices per simplex (dimension + 1).
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.verts.len().checked_div(self.width).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn get(&self, i: usize) -> &[usize] {
        &self.verts[i * self.width..(i + 1) * self.width]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.verts.chunks_exact(self.width.max(1))
    }

    /// Row index of `simplex` (which must be sorted), by binary search.
    pub fn index_of(&self, simplex: &[usize]) -> Option<usize> {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.get(mid).cmp(simplex) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn to_vecs(&self) -> Vec<Vec<usize>> {
        self.iter().map(<[usize]>::to_vec).collect()
    }
}

/// A k-skeleton: dimensions `0..=max_dim`, any of which may be empty above 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    levels: Vec<SimplexList>,
}

impl SimplicialComplex {
    pub(crate) fn from_sorted_levels(levels: Vec<SimplexList>) -> Self {
        Self { levels }
    }

    /// Builds a complex from explicit per-dimension simplex lists
    /// (`levels[j]` holds j-simplices). Tuples are canonicalised; every face
    /// of every simplex must be listed.
    pub fn from_levels(levels: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidComplex(
                "a complex needs a vertex level".into(),
            ));
        }
        let levels = levels
            .into_iter()
            .enumerate()
            .map(|(j, t)| SimplexList::from_tuples(j + 1, t))
            .collect::<Result<Vec<_>>>()?;
        let c = Self { levels };
        c.check_closed()?;
        Ok(c)
    }

    /// Smallest complex of dimension `max_dim` containing `simplices` and all
    /// their faces.
    pub fn closure(simplices: &[Vec<usize>], max_dim: usize) -> Result<Self> {
        let mut levels: Vec<Vec<Vec<usize>>> = vec![Vec::new(); max_dim + 1];
        for s in simplices {
            if s.is_empty() || s.len() > max_dim + 1 {
                return Err(Error::InvalidComplex(format!(
                    "simplex {s:?} does not fit in dimension {max_dim}"
                )));
            }
            let m = s.len();
            for mask in 1u64..(1u64 << m) {
                let face: Vec<usize> = (0..m)
                    .filter(|b| mask >> b & 1 == 1)
                    .map(|b| s[b])
                    .collect();
                levels[face.len() - 1].push(face);
            }
        }
        Self::from_levels(levels)
    }

    fn check_closed(&self) -> Result<()> {
        for j in 1..self.levels.len() {
            let lower = &self.levels[j - 1];
            let mut face = Vec::with_capacity(j);
            for s in self.levels[j].iter() {
                for skip in 0..s.len() {
                    face.clear();
                    face.extend(
                        s.iter()
                            .enumerate()
                            .filter(|(i, _)| *i != skip)
                            .map(|(_, v)| *v),
                    );
                    if lower.index_of(&face).is_none() {
                        return Err(Error::InvalidComplex(format!(
                            "face {face:?} of simplex {s:?} is missing"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn max_dim(&self) -> usize {
        self.levels.len() - 1
    }

    /// j-simplices.
    pub fn simplices(&self, j: usize) -> &SimplexList {
        &self.levels[j]
    }

    pub fn n_vertices(&self) -> usize {
        self.levels[0].len()
    }

    /// `n_0, n_1, ..., n_maxdim`.
    pub fn counts(&self) -> Vec<usize> {
        self.levels.iter().map(SimplexList::len).collect()
    }

    pub fn total(&self) -> usize {
        self.counts().iter().sum()
    }

    /// Whether every simplex of `self` also belongs to `other`.
    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.levels.iter().enumerate().all(|(j, lvl)| {
            lvl.iter()
                .all(|s| other.levels.get(j).is_some_and(|o| o.index_of(s).is_some()))
        })
    }

    /// Renames vertex `v` to `perm[v]` and re-canonicalises.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let levels = self
            .levels
            .iter()
            .map(|l| {
                l.iter()
                    .map(|s| s.iter().map(|&v| perm[v]).collect())
                    .collect()
            })
            .collect();
        Self::from_levels(levels)
    }
}

impl Serialize for SimplicialComplex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.levels.len()))?;
        for (j, level) in self.levels.iter().enumerate() {
            map.serialize_entry(&format!("dim{j}"), &level.to_vecs())?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for SimplicialComplex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw: BTreeMap<String, Vec<Vec<usize>>> = BTreeMap::deserialize(deserializer)?;
        let mut levels: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
        for (key, simplices) in raw {
            let dim = key
                .strip_prefix("dim")
                .and_then(|d| d.parse::<usize>().ok())
                .ok_or_else(|| D::Error::custom(format!("unexpected key {key:?}")))?;
            levels.insert(dim, simplices);
        }
        let max = levels.keys().next_back().copied().unwrap_or(0);
        let levels: Vec<Vec<Vec<usize>>> = (0..=max)
            .map(|d| {
                levels
                    .remove(&d)
                    .ok_or_else(|| D::Error::custom(format!("missing key \"dim{d}\"")))
            })
            .collect::<Result<_, _>>()?;
        SimplicialComplex::from_levels(levels).map_err(D::Error::custom)
    }
}
