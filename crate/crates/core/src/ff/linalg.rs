//! Dense linear algebra over `F_p`, just enough to pull elements back
//! along subfield embeddings.

use alloc::vec;
use alloc::vec::Vec;

use super::{Field, PrimeField};

/// Solves `Σ xⱼ · columns[j] = target` over `F_p`, where each column has
/// `rows` entries (shorter columns are zero-padded). Returns one solution
/// or `None` when the system is inconsistent.
pub fn solve(field: &PrimeField, columns: &[Vec<u64>], target: &[u64], rows: usize) -> Option<Vec<u64>> {
    let n = columns.len();
    let at = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
    // augmented matrix, row-major
    let mut m: Vec<Vec<u64>> = (0..rows)
        .map(|i| {
            let mut row: Vec<u64> = columns.iter().map(|c| at(c, i)).collect();
            row.push(at(target, i));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(k) = (r..rows).find(|&k| m[k][c] != 0) else {
            continue;
        };
        m.swap(r, k);
        let inv = field.inv(&m[r][c]).unwrap();
        for v in m[r].iter_mut() {
            *v = field.mul(v, &inv);
        }
        for k in 0..rows {
            if k != r && m[k][c] != 0 {
                let factor = m[k][c];
                for j in 0..=n {
                    let sub = field.mul(&factor, &m[r][j]);
                    m[k][j] = field.sub(&m[k][j], &sub);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| row[n] != 0) {
        return None;
    }
    let mut x = vec![0u64; n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][n];
    }
    Some(x)
}

/// A matrix `P` (one row per column of `C`) with `P·C = I`, where `C` has
/// the given columns and `rows` rows. `None` if the columns are dependent.
pub fn left_inverse(field: &PrimeField, columns: &[Vec<u64>], rows: usize) -> Option<Vec<Vec<u64>>> {
    let n = columns.len();
    let at = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
    // [C | I_rows]
    let mut m: Vec<Vec<u64>> = (0..rows)
        .map(|i| {
            let mut row: Vec<u64> = columns.iter().map(|c| at(c, i)).collect();
            row.extend((0..rows).map(|j| u64::from(i == j)));
            row
        })
        .collect();
    for c in 0..n {
        let k = (c..rows).find(|&k| m[k][c] != 0)?;
        m.swap(c, k);
        let inv = field.inv(&m[c][c]).unwrap();
        for v in m[c].iter_mut() {
            *v = field.mul(v, &inv);
        }
        for k in 0..rows {
            if k != c && m[k][c] != 0 {
                let factor = m[k][c];
                for j in 0..n + rows {
                    let sub = field.mul(&factor, &m[c][j]);
                    m[k][j] = field.sub(&m[k][j], &sub);
                }
            }
        }
    }
    Some(m.into_iter().take(n).map(|row| row[n..].to_vec()).collect())
}
