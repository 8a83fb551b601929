//! Exact matrix rank over the rationals.
//!
//! Fraction-free Gaussian elimination on integer rows: each elimination step
//! replaces a row by an integer combination with the pivot row and then
//! divides it by the gcd of its entries, which keeps entries small for
//! boundary and Laplacian matrices. The first pass runs in checked `i128`;
//! if any product overflows the whole computation is redone with `BigInt`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedMul, CheckedSub, Signed};

/// Rank of a row-major `rows x cols` integer matrix.
pub fn exact_rank(rows: usize, cols: usize, entries: &[i64]) -> usize {
    assert_eq!(
        entries.len(),
        rows * cols,
        "entry count does not match shape"
    );
    if rows == 0 || cols == 0 {
        return 0;
    }
    let small: Vec<Vec<i128>> = entries
        .chunks(cols)
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    if let Some(r) = eliminate(small, cols) {
        return r;
    }
    let big: Vec<Vec<BigInt>> = entries
        .chunks(cols)
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    eliminate(big, cols).expect("BigInt arithmetic cannot overflow")
}

fn eliminate<T>(mut m: Vec<Vec<T>>, cols: usize) -> Option<usize>
where
    T: Clone + Integer + Signed + CheckedMul + CheckedSub,
{
    // Drop zero rows up front; boundary matrices are mostly sparse.
    m.retain(|r| r.iter().any(|v| !v.is_zero()));
    let rows = m.len();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        // Smallest nonzero pivot limits growth.
        let pivot = (rank..rows)
            .filter(|&i| !m[i][c].is_zero())
            .min_by(|&a, &b| m[a][c].abs().cmp(&m[b][c].abs()));
        let Some(p) = pivot else { continue };
        m.swap(rank, p);
        let (head, tail) = m.split_at_mut(rank + 1);
        let prow = &head[rank];
        for row in tail.iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let g = prow[c].gcd(&row[c]);
            let fp = row[c].clone() / g.clone();
            let fr = prow[c].clone() / g;
            let mut content = T::zero();
            for j in c..cols {
                let a = row[j].checked_mul(&fr)?;
                let b = if prow[j].is_zero() {
                    T::zero()
                } else {
                    prow[j].checked_mul(&fp)?
                };
                row[j] = a.checked_sub(&b)?;
                if !row[j].is_zero() {
                    content = content.gcd(&row[j]);
                }
            }
            debug_assert!(row[c].is_zero());
            if !content.is_zero() && !content.is_one() {
                for v in row[c + 1..].iter_mut() {
                    *v = v.clone() / content.clone();
                }
            }
        }
        rank += 1;
    }
    Some(rank)
}
