use super::boundary::check_chain;
use super::rank::exact_rank;
use super::{BettiVector, BoundaryMatrix};
use crate::error::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    fn add(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn rank(&self) -> usize {
        exact_rank(self.rows, self.cols, &self.data)
    }
}

/// Adds `∂ ∂^T` (the up part of the Laplacian on the row space of `∂`).
fn add_up(lap: &mut IntMatrix, b: &BoundaryMatrix) {
    for j in 0..b.cols() {
        let col = b.column(j);
        for &(r1, s1) in col {
            for &(r2, s2) in col {
                lap.add(r1, r2, (s1 as i64) * (s2 as i64));
            }
        }
    }
}

/// Adds `∂^T ∂` (the down part of the Laplacian on the column space of `∂`).
fn add_down(lap: &mut IntMatrix, b: &BoundaryMatrix) {
    let mut by_row: Vec<Vec<(usize, i8)>> = vec![Vec::new(); b.rows()];
    for (r, c, s) in b.triplets() {
        by_row[r].push((c, s));
    }
    for row in by_row {
        for &(c1, s1) in &row {
            for &(c2, s2) in &row {
                lap.add(c1, c2, (s1 as i64) * (s2 as i64));
            }
        }
    }
}

/// Hodge Laplacians `Δ_k = ∂_{k+1} ∂_{k+1}^T + ∂_k^T ∂_k` for the same range
/// of `k` that [`super::betti_from_boundaries`] reports.
pub fn hodge_laplacians(boundaries: &[BoundaryMatrix], p: usize) -> Result<Vec<IntMatrix>> {
    check_chain(boundaries, p)?;
    let count = boundaries.len().max(1);
    Ok((0..count)
        .map(|k| {
            let n = if k == 0 { p } else { boundaries[k - 1].cols() };
            let mut lap = IntMatrix::zeros(n, n);
            if let Some(up) = boundaries.get(k) {
                add_up(&mut lap, up);
            }
            if k > 0 {
                add_down(&mut lap, &boundaries[k - 1]);
            }
            lap
        })
        .collect())
}

/// `β_k = dim ker Δ_k = n_k - rank(Δ_k)`.
pub fn betti_from_hodge(laplacians: &[IntMatrix]) -> Result<BettiVector> {
    laplacians
        .iter()
        .enumerate()
        .map(|(k, lap)| {
            if !lap.is_symmetric() {
                return Err(Error::InvalidInput(format!(
                    "Laplacian {k} is not square and symmetric ({}x{})",
                    lap.rows, lap.cols
                )));
            }
            Ok(lap.rows - lap.rank())
        })
        .collect::<Result<Vec<_>>>()
        .map(BettiVector)
}
