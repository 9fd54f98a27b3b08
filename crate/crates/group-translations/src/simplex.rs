//! Exact rational linear programming via a two-phase dense simplex with
//! Bland's rule. Used for the Manhattan / 1D fixed-family length
//! minimization, where the optimum is a rational vertex and float methods
//! would blur exact comparisons.

use num::{Signed, Zero};

use crate::scalar::{self, Scalar};

#[derive(Clone, Debug)]
pub enum LpResult {
    Optimal { x: Vec<Scalar>, value: Scalar },
    Infeasible,
}

/// Minimizes `c . x` subject to `A x = b`, `x >= 0`. The problems built in
/// this crate are always bounded below, so unboundedness is a logic error.
pub fn solve_min(c: &[Scalar], a: &[Vec<Scalar>], b: &[Scalar]) -> LpResult {
    let m = a.len();
    let n = c.len();
    if m == 0 {
        return LpResult::Optimal {
            x: vec![scalar::zero(); n],
            value: scalar::zero(),
        };
    }

    // Rows with b >= 0, artificial variable per row.
    let total = n + m;
    let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        assert_eq!(row.len(), n, "constraint row width");
        let flip = b[i].is_negative();
        let mut r: Vec<Scalar> = Vec::with_capacity(total + 1);
        for v in row {
            r.push(if flip { -v } else { v.clone() });
        }
        for j in 0..m {
            r.push(if j == i { scalar::int(1) } else { scalar::zero() });
        }
        r.push(if flip { -&b[i] } else { b[i].clone() });
        rows.push(r);
    }
    let mut basis: Vec<usize> = (n..total).collect();

    // Phase 1: minimize the artificial sum.
    let mut obj = vec![scalar::zero(); total + 1];
    for row in &rows {
        for j in 0..n {
            let v = &obj[j] - &row[j];
            obj[j] = v;
        }
        let v = &obj[total] - &row[total];
        obj[total] = v;
    }
    run_simplex(&mut rows, &mut basis, &mut obj, total);
    // obj[total] holds -z.
    if obj[total].is_negative() {
        return LpResult::Infeasible;
    }

    // Drive remaining artificials out of the basis; rows that cannot
    // pivot on a structural column are redundant and dropped.
    let mut keep = vec![true; rows.len()];
    for i in 0..rows.len() {
        if basis[i] >= n {
            if let Some(col) = (0..n).find(|&j| !rows[i][j].is_zero()) {
                pivot(&mut rows, &mut basis, &mut obj, i, col);
            } else {
                keep[i] = false;
            }
        }
    }
    let mut kept_rows = Vec::new();
    let mut kept_basis = Vec::new();
    for (i, k) in keep.iter().enumerate() {
        if *k {
            let mut r: Vec<Scalar> = rows[i][..n].to_vec();
            r.push(rows[i][total].clone());
            kept_rows.push(r);
            kept_basis.push(basis[i]);
        }
    }
    let mut rows = kept_rows;
    let mut basis = kept_basis;

    // Phase 2 objective over structural columns only.
    let mut obj: Vec<Scalar> = c.to_vec();
    obj.push(scalar::zero());
    for (i, &bi) in basis.iter().enumerate() {
        if !c[bi].is_zero() {
            let factor = c[bi].clone();
            for j in 0..=n {
                let v = &obj[j] - &factor * &rows[i][j];
                obj[j] = v;
            }
        }
    }
    run_simplex(&mut rows, &mut basis, &mut obj, n);

    let mut x = vec![scalar::zero(); n];
    for (i, &bi) in basis.iter().enumerate() {
        x[bi] = rows[i][n].clone();
    }
    let value = -obj[n].clone();
    LpResult::Optimal { x, value }
}

fn run_simplex(
    rows: &mut Vec<Vec<Scalar>>,
    basis: &mut [usize],
    obj: &mut [Scalar],
    ncols: usize,
) {
    loop {
        // Bland: smallest index with a negative reduced cost.
        let Some(entering) = (0..ncols).find(|&j| obj[j].is_negative()) else {
            return;
        };
        // Ratio test, ties by smallest basic variable.
        let mut best: Option<(Scalar, usize, usize)> = None;
        for (i, row) in rows.iter().enumerate() {
            if row[entering].is_positive() {
                let ratio = &row[ncols] / &row[entering];
                let cand = (ratio, basis[i], i);
                best = match best {
                    None => Some(cand),
                    Some(b) => {
                        if (cand.0 < b.0) || (cand.0 == b.0 && cand.1 < b.1) {
                            Some(cand)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
        }
        let (_, _, leaving) = best.expect("LP unbounded; crate problems are bounded");
        pivot(rows, basis, obj, leaving, entering);
    }
}

fn pivot(
    rows: &mut [Vec<Scalar>],
    basis: &mut [usize],
    obj: &mut [Scalar],
    pr: usize,
    pc: usize,
) {
    let width = rows[pr].len();
    let inv = rows[pr][pc].clone();
    for j in 0..width {
        let v = &rows[pr][j] / &inv;
        rows[pr][j] = v;
    }
    for i in 0..rows.len() {
        if i != pr && !rows[i][pc].is_zero() {
            let factor = rows[i][pc].clone();
            for j in 0..width {
                let v = &rows[i][j] - &factor * &rows[pr][j];
                rows[i][j] = v;
            }
        }
    }
    if !obj[pc].is_zero() {
        let factor = obj[pc].clone();
        for j in 0..width {
            let v = &obj[j] - &factor * &rows[pr][j];
            obj[j] = v;
        }
    }
    basis[pr] = pc;
}

/// Minimizes `sum_j |tau_j|` over unrestricted `tau` subject to
/// `M tau = rhs`, where `M` is the 0/1 group-membership matrix (rows =
/// indices, columns = groups). Returns `None` when infeasible.
pub fn min_abs_sum(memb: &[Vec<bool>], rhs: &[Scalar]) -> Option<(Vec<Scalar>, Scalar)> {
    let m = memb.len();
    let k = if m == 0 { 0 } else { memb[0].len() };
    if k == 0 {
        return if rhs.iter().all(|r| r.is_zero()) {
            Some((Vec::new(), scalar::zero()))
        } else {
            None
        };
    }
    // tau_j = p_j - q_j with p, q >= 0; |tau_j| <= p_j + q_j, tight at optimum.
    let n = 2 * k;
    let c = vec![scalar::int(1); n];
    let mut a = Vec::with_capacity(m);
    for row in memb {
        let mut r = Vec::with_capacity(n);
        for &is_in in row {
            r.push(if is_in { scalar::int(1) } else { scalar::zero() });
        }
        for &is_in in row {
            r.push(if is_in { scalar::int(-1) } else { scalar::zero() });
        }
        a.push(r);
    }
    match solve_min(&c, &a, rhs) {
        LpResult::Infeasible => None,
        LpResult::Optimal { x, value } => {
            let tau: Vec<Scalar> = (0..k).map(|j| &x[j] - &x[k + j]).collect();
            Some((tau, value))
        }
    }
}

/// Phase-1 feasibility of `M tau = rhs` with `tau >= 0`.
pub fn feasible_nonneg(memb: &[Vec<bool>], rhs: &[Scalar]) -> bool {
    let m = memb.len();
    let k = if m == 0 { 0 } else { memb[0].len() };
    if k == 0 {
        return rhs.iter().all(|r| r.is_zero());
    }
    let c = vec![scalar::zero(); k];
    let a: Vec<Vec<Scalar>> = memb
        .iter()
        .map(|row| {
            row.iter()
                .map(|&b| if b { scalar::int(1) } else { scalar::zero() })
                .collect()
        })
        .collect();
    !matches!(solve_min(&c, &a, rhs), LpResult::Infeasible)
}
