//! Exact rational linear algebra: solving `A x = b` with consistency
//! detection, a particular solution, and a nullspace basis.

use num::Zero;

use crate::scalar::{self, Scalar};

/// Affine description of the solution set of `A x = b`:
/// `x = particular + sum_j z_j * nullspace[j]`.
#[derive(Clone, Debug)]
pub struct AffineSolution {
    pub particular: Vec<Scalar>,
    pub nullspace: Vec<Vec<Scalar>>,
}

/// Gaussian elimination over the rationals. Returns `None` when the
/// system is inconsistent.
pub fn solve_linear(a: &[Vec<Scalar>], b: &[Scalar]) -> Option<AffineSolution> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<Scalar>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..cols {
        let pivot_row = (rank..rows).find(|&r| !m[r][col].is_zero());
        let Some(pr) = pivot_row else { continue };
        m.swap(rank, pr);
        let inv = m[rank][col].clone();
        for c in col..=cols {
            let v = &m[rank][c] / &inv;
            m[rank][c] = v;
        }
        for r in 0..rows {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=cols {
                    let v = &m[r][c] - &factor * &m[rank][c];
                    m[r][c] = v;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }

    // Rows with zero coefficients but nonzero rhs mean inconsistency.
    for r in rank..rows {
        if !m[r][cols].is_zero() {
            return None;
        }
    }

    let mut particular = vec![scalar::zero(); cols];
    for (i, &pc) in pivot_cols.iter().enumerate() {
        particular[pc] = m[i][cols].clone();
    }

    let pivot_set: std::collections::BTreeSet<usize> = pivot_cols.iter().copied().collect();
    let mut nullspace = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut vec = vec![scalar::zero(); cols];
        vec[free] = scalar::int(1);
        for (i, &pc) in pivot_cols.iter().enumerate() {
            vec[pc] = -m[i][free].clone();
        }
        nullspace.push(vec);
    }

    Some(AffineSolution {
        particular,
        nullspace,
    })
}

/// Checks `A x = b` for a concrete `x`.
pub fn residual_is_zero(a: &[Vec<Scalar>], b: &[Scalar], x: &[Scalar]) -> bool {
    a.iter().zip(b).all(|(row, rhs)| {
        let lhs: Scalar = row.iter().zip(x).map(|(c, v)| c * v).sum();
        &lhs == rhs
    })
}
