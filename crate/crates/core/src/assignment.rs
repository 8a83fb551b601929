//! Linear sum assignment by the Hungarian method with row potentials.

use crate::error::{Error, Result};

/// Optimal assignment of rows to distinct columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `columns[i]` is the column matched to row `i`.
    pub columns: Vec<usize>,
    pub cost: f64,
}

/// Minimum-cost assignment for a row-major `rows x cols` cost matrix with
/// `rows <= cols`. Runs in `O(rows^2 * cols)`.
pub fn solve_min(cost: &[f64], rows: usize, cols: usize) -> Result<Assignment> {
    if cost.len() != rows * cols {
        return Err(Error::InvalidInput(format!(
            "cost matrix has {} entries, expected {rows}x{cols}",
            cost.len()
        )));
    }
    if rows > cols {
        return Err(Error::InvalidInput(format!(
            "more rows ({rows}) than columns ({cols})"
        )));
    }
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidInput("cost matrix must be finite".into()));
    }
    if rows == 0 {
        return Ok(Assignment {
            columns: vec![],
            cost: 0.0,
        });
    }
    // 1-based arrays with a virtual row/column 0.
    let mut u = vec![0.0; rows + 1];
    let mut v = vec![0.0; cols + 1];
    let mut row_of = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    for i in 1..=rows {
        row_of[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; cols + 1];
        let mut used = vec![false; cols + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=cols {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * cols + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=cols {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut columns = vec![0usize; rows];
    for j in 1..=cols {
        if row_of[j] != 0 {
            columns[row_of[j] - 1] = j - 1;
        }
    }
    let total = columns
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i * cols + j])
        .sum();
    Ok(Assignment {
        columns,
        cost: total,
    })
}

/// Maximum-weight assignment; `cost` in the result is the maximised total.
pub fn solve_max(weight: &[f64], rows: usize, cols: usize) -> Result<Assignment> {
    let neg: Vec<f64> = weight.iter().map(|w| -w).collect();
    let mut a = solve_min(&neg, rows, cols)?;
    a.cost = -a.cost;
    Ok(a)
}
