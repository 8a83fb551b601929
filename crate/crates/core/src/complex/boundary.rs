use serde::{Deserialize, Serialize};

use super::rank::exact_rank;
use super::SimplicialComplex;
use crate::error::{Error, Result};

/// Signed matrix of the boundary map from k-simplices to (k-1)-simplices.
///
/// Column `j` holds the `k + 1` faces of the j-th k-simplex; the face that
/// omits vertex `i` of the sorted tuple carries sign `(-1)^i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMatrix {
    dim: usize,
    rows: usize,
    cols: usize,
    // `dim + 1` (row, sign) entries per column, rows ascending within a column.
    entries: Vec<(usize, i8)>,
}

impl BoundaryMatrix {
    /// Assembles a matrix from explicit columns of `(row, sign)` entries.
    pub fn from_columns(dim: usize, rows: usize, columns: Vec<Vec<(usize, i8)>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput(
                "boundary matrices start at dimension 1".into(),
            ));
        }
        let cols = columns.len();
        let mut entries = Vec::with_capacity(cols * (dim + 1));
        for (j, mut col) in columns.into_iter().enumerate() {
            col.sort_unstable();
            let bad_row = col.iter().any(|&(r, _)| r >= rows);
            let bad_sign = col.iter().any(|&(_, s)| s != 1 && s != -1);
            if col.len() != dim + 1
                || bad_row
                || bad_sign
                || col.windows(2).any(|w| w[0].0 == w[1].0)
            {
                return Err(Error::InvalidInput(format!(
                    "column {j} of a dimension-{dim} boundary matrix must hold {} distinct +-1 entries",
                    dim + 1
                )));
            }
            entries.extend(col);
        }
        Ok(Self {
            dim,
            rows,
            cols,
            entries,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of (k-1)-simplices.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of k-simplices.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[(usize, i8)] {
        let w = self.dim + 1;
        &self.entries[j * w..(j + 1) * w]
    }

    /// `(row, col, sign)` in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, i8)> + '_ {
        (0..self.cols).flat_map(move |j| self.column(j).iter().map(move |&(r, s)| (r, j, s)))
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<i64> {
        let mut d = vec![0i64; self.rows * self.cols];
        for (r, c, s) in self.triplets() {
            d[r * self.cols + c] = s as i64;
        }
        d
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        exact_rank(self.rows, self.cols, &self.to_dense())
    }

    /// Dimension of the kernel, `cols - rank`.
    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// Integer product `self * rhs`, row-major `rows x rhs.cols`.
    pub fn compose(&self, rhs: &BoundaryMatrix) -> Result<Vec<i64>> {
        if self.cols != rhs.rows {
            return Err(Error::InvalidInput(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = vec![0i64; self.rows * rhs.cols];
        for j in 0..rhs.cols {
            for &(mid, s1) in rhs.column(j) {
                for &(r, s2) in self.column(mid) {
                    out[r * rhs.cols + j] += (s1 as i64) * (s2 as i64);
                }
            }
        }
        Ok(out)
    }
}

/// Boundary matrices `∂_1 .. ∂_maxdim` of a complex. Dimensions with no
/// simplices give matrices with zero columns.
pub fn boundary_matrices(complex: &SimplicialComplex) -> Result<Vec<BoundaryMatrix>> {
    (1..=complex.max_dim())
        .map(|k| {
            let faces = complex.simplices(k - 1);
            let simplices = complex.simplices(k);
            let mut entries = Vec::with_capacity(simplices.len() * (k + 1));
            let mut face = Vec::with_capacity(k);
            let mut col = Vec::with_capacity(k + 1);
            for s in simplices.iter() {
                col.clear();
                for omit in 0..=k {
                    face.clear();
                    face.extend_from_slice(&s[..omit]);
                    face.extend_from_slice(&s[omit + 1..]);
                    let row = faces.index_of(&face).ok_or_else(|| {
                        Error::InvalidComplex(format!("face {face:?} of simplex {s:?} is missing"))
                    })?;
                    col.push((row, if omit % 2 == 0 { 1 } else { -1 }));
                }
                col.sort_unstable();
                entries.extend_from_slice(&col);
            }
            Ok(BoundaryMatrix {
                dim: k,
                rows: faces.len(),
                cols: simplices.len(),
                entries,
            })
        })
        .collect()
}

/// Betti numbers `β_0, β_1, ...` over the rationals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BettiVector(pub Vec<usize>);

impl BettiVector {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, k: usize) -> Option<usize> {
        self.0.get(k).copied()
    }
}

impl std::ops::Index<usize> for BettiVector {
    type Output = usize;
    fn index(&self, k: usize) -> &usize {
        &self.0[k]
    }
}

/// Checks that `∂_1 .. ∂_K` chain together on `p` vertices.
pub(super) fn check_chain(boundaries: &[BoundaryMatrix], p: usize) -> Result<()> {
    let mut expected_rows = p;
    for (i, b) in boundaries.iter().enumerate() {
        if b.dim != i + 1 {
            return Err(Error::InvalidInput(format!(
                "boundary matrix {i} has dimension {}, expected {}",
                b.dim,
                i + 1
            )));
        }
        if b.rows != expected_rows {
            return Err(Error::InvalidInput(format!(
                "∂_{} has {} rows but there are {expected_rows} {}-simplices",
                b.dim, b.rows, i
            )));
        }
        expected_rows = b.cols;
    }
    Ok(())
}

/// `β_k = nullity(∂_k) - rank(∂_{k+1})`, with `nullity(∂_0) = p`.
///
/// For boundaries `∂_1 .. ∂_K` of a K-skeleton this reports `β_0 .. β_{K-1}`,
/// the numbers that do not depend on the missing (K+1)-simplices. A bare
/// vertex set (K = 0) reports `β_0 = p`.
pub fn betti_from_boundaries(boundaries: &[BoundaryMatrix], p: usize) -> Result<BettiVector> {
    check_chain(boundaries, p)?;
    let ranks: Vec<usize> = boundaries.iter().map(BoundaryMatrix::rank).collect();
    let count = boundaries.len().max(1);
    let betti = (0..count)
        .map(|k| {
            let nullity = if k == 0 {
                p
            } else {
                boundaries[k - 1].cols - ranks[k - 1]
            };
            nullity - ranks.get(k).copied().unwrap_or(0)
        })
        .collect();
    Ok(BettiVector(betti))
}
