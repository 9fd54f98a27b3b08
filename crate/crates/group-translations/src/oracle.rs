//! Desk-scale exhaustive solvers used as ground truth in tests: MLFT by
//! full family enumeration with convex inner solves, MCFT cardinality by
//! feasibility search (plus a branch-and-bound for monotone 0/1
//! instances), and laminar-family MCHT. All enumeration orders are
//! deterministic so failures reproduce.

use std::collections::BTreeSet;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::exec::{self, Parallelism};
use crate::given::solve_mlgt_convex;
use crate::linalg;
use crate::model::{
    evaluate_cost, DisplacementSet, FamilyKind, GroupFamily, NormKind, Transformation,
};
use crate::scalar::Scalar;

const MLFT_CAP: usize = 4;
const MCFT_GENERAL_CAP: usize = 4;
const MCFT_MONOTONE_CAP: usize = 8;
const MCFT_SUPPORT_CAP: usize = 8;
const MCHT_CAP: usize = 5;

/// All nonempty subsets of `[n]` as bitmasks, ordered by (popcount, value).
fn subset_masks(n: usize) -> Vec<u32> {
    let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    masks
}

fn mask_to_group(mask: u32) -> BTreeSet<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// Exact feasibility of a fixed family: per coordinate, the membership
/// system `B tau = delta_c` must be consistent (coordinates share `B`).
fn family_feasible(delta: &DisplacementSet, groups: &[u32]) -> bool {
    let n = delta.n();
    let a: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            groups
                .iter()
                .map(|&g| {
                    if g & (1 << i) != 0 {
                        Scalar::one()
                    } else {
                        Scalar::zero()
                    }
                })
                .collect()
        })
        .collect();
    (0..delta.dimension()).all(|c| {
        let rhs: Vec<Scalar> = delta.deltas().iter().map(|v| v.0[c].clone()).collect();
        linalg::solve_linear(&a, &rhs).is_some()
    })
}

/// Exhaustive Euclidean MLFT: tries every family of distinct nonempty
/// subsets of `[n]` with at most `max_groups` groups, solving the
/// fixed-family length minimization for each, and returns the cheapest
/// valid transformation. Ties break towards the earlier family in
/// (popcount, lex) enumeration order.
pub fn oracle_mlft(
    delta: &DisplacementSet,
    max_groups: usize,
    tol: f64,
) -> Result<Transformation> {
    oracle_mlft_with(delta, max_groups, tol, Parallelism::default())
}

/// [`oracle_mlft`] with an explicit execution mode; family evaluations
/// are independent and the reduction is deterministic.
pub fn oracle_mlft_with(
    delta: &DisplacementSet,
    max_groups: usize,
    tol: f64,
    mode: Parallelism,
) -> Result<Transformation> {
    let n = delta.n();
    if n > MLFT_CAP {
        return Err(Error::SizeCap(format!(
            "exhaustive MLFT is capped at n = {MLFT_CAP}, got n = {n}"
        )));
    }
    if delta.deltas().iter().all(|v| v.is_zero()) {
        return Ok(Transformation::empty(FamilyKind::Free));
    }
    let subsets = subset_masks(n);
    let family_count: u32 = 1 << subsets.len();
    let candidates: Vec<u32> = (1..family_count)
        .filter(|fm| (fm.count_ones() as usize) <= max_groups)
        .collect();

    let solve_family = |family_mask: u32| -> Option<(f64, u32)> {
        let groups: Vec<u32> = subsets
            .iter()
            .enumerate()
            .filter(|(gi, _)| family_mask & (1 << gi) != 0)
            .map(|(_, &m)| m)
            .collect();
        let family = GroupFamily::new(
            FamilyKind::Given,
            groups.iter().map(|&m| mask_to_group(m)).collect(),
        );
        let t = match solve_mlgt_convex(delta, &family, NormKind::Euclidean, tol) {
            Ok(t) => t,
            Err(Error::BudgetExceeded { best, .. }) => *best,
            Err(_) => return None,
        };
        Some((evaluate_cost(&t, NormKind::Euclidean).length, family_mask))
    };
    let best = exec::min_map(mode, candidates, solve_family)
        .ok_or_else(|| Error::Constraint("no feasible family found".into()))?;

    // Re-solve the winning family once to materialize the transformation.
    let groups: Vec<u32> = subsets
        .iter()
        .enumerate()
        .filter(|(gi, _)| best.1 & (1 << gi) != 0)
        .map(|(_, &m)| m)
        .collect();
    let family = GroupFamily::new(
        FamilyKind::Free,
        groups.iter().map(|&m| mask_to_group(m)).collect(),
    );
    match solve_mlgt_convex(delta, &family, NormKind::Euclidean, tol) {
        Ok(t) => Ok(t),
        Err(Error::BudgetExceeded { best, .. }) => Ok(*best),
        Err(e) => Err(e),
    }
}

/// Minimum MCFT cardinality. `monotone = false`: feasibility search over
/// families of distinct subsets in ascending cardinality (translations
/// unrestricted). `monotone = true`: requires a 0/1 instance and runs a
/// branch-and-bound over support partitions with 0/1 candidate
/// translations (the gadget regime).
pub fn oracle_mcft(delta: &DisplacementSet, monotone: bool) -> Result<usize> {
    if monotone {
        return monotone_binary_mcft(delta);
    }
    let n = delta.n();
    if n > MCFT_GENERAL_CAP {
        return Err(Error::SizeCap(format!(
            "exhaustive MCFT is capped at n = {MCFT_GENERAL_CAP}, got n = {n}"
        )));
    }
    let subsets = subset_masks(n);
    let family_count: u32 = 1 << subsets.len();
    for k in 0..=subsets.len() {
        let mut masks: Vec<u32> = (0..family_count)
            .filter(|fm| fm.count_ones() as usize == k)
            .collect();
        masks.sort();
        for fm in masks {
            let groups: Vec<u32> = subsets
                .iter()
                .enumerate()
                .filter(|(gi, _)| fm & (1 << gi) != 0)
                .map(|(_, &m)| m)
                .collect();
            if family_feasible(delta, &groups) {
                return Ok(k);
            }
        }
    }
    unreachable!("the all-singletons family is always feasible");
}

/// Support bitmask of a 0/1 vector; error when any component is neither
/// 0 nor 1.
fn binary_support(v: &crate::model::Vector) -> Result<u64> {
    let mut mask = 0u64;
    for (c, x) in v.0.iter().enumerate() {
        if x.is_one() {
            mask |= 1 << c;
        } else if !x.is_zero() {
            return Err(Error::Malformed(
                "monotone oracle requires all components in {0, 1}".into(),
            ));
        }
    }
    Ok(mask)
}

/// All partitions of the set bits of `mask` into nonempty parts, as lists
/// of part masks, in deterministic order (restricted growth strings).
fn support_partitions(mask: u64) -> Vec<Vec<u64>> {
    let bits: Vec<u64> = (0..64).filter(|b| mask & (1 << b) != 0).collect();
    let mut out = Vec::new();
    let mut assignment = vec![0usize; bits.len()];
    fn rec(bits: &[u64], i: usize, max_part: usize, assignment: &mut [usize], out: &mut Vec<Vec<u64>>) {
        if i == bits.len() {
            let parts = max_part + 1;
            let mut masks = vec![0u64; parts];
            for (j, &p) in assignment.iter().enumerate() {
                masks[p] |= 1 << bits[j];
            }
            out.push(masks);
            return;
        }
        for p in 0..=max_part + 1 {
            assignment[i] = p;
            rec(bits, i + 1, max_part.max(p), assignment, out);
        }
    }
    if bits.is_empty() {
        return out;
    }
    assignment[0] = 0;
    rec(&bits, 1, 0, &mut assignment, &mut out);
    out
}

fn monotone_binary_mcft(delta: &DisplacementSet) -> Result<usize> {
    // Distinct nonzero supports; identical vectors share decompositions.
    let mut supports: Vec<u64> = Vec::new();
    for v in delta.deltas() {
        let s = binary_support(v)?;
        if s != 0 && !supports.contains(&s) {
            supports.push(s);
        }
    }
    if supports.len() > MCFT_MONOTONE_CAP {
        return Err(Error::SizeCap(format!(
            "monotone MCFT branch-and-bound is capped at {MCFT_MONOTONE_CAP} distinct vectors"
        )));
    }
    if supports
        .iter()
        .any(|s| s.count_ones() as usize > MCFT_SUPPORT_CAP)
    {
        return Err(Error::SizeCap(format!(
            "monotone MCFT branch-and-bound is capped at support size {MCFT_SUPPORT_CAP}"
        )));
    }
    // Most-constrained first: larger supports have more partitions but
    // force more sharing.
    supports.sort_by_key(|s| std::cmp::Reverse(s.count_ones()));
    let partitions: Vec<Vec<Vec<u64>>> =
        supports.iter().map(|&s| support_partitions(s)).collect();

    // Upper bound: one singleton group per distinct vector.
    let mut best = supports.len();
    let mut chosen: Vec<u64> = Vec::new();
    fn dfs(
        idx: usize,
        partitions: &[Vec<Vec<u64>>],
        chosen: &mut Vec<u64>,
        best: &mut usize,
    ) {
        if chosen.len() >= *best {
            return;
        }
        if idx == partitions.len() {
            *best = chosen.len();
            return;
        }
        for parts in &partitions[idx] {
            let added: Vec<u64> = parts
                .iter()
                .copied()
                .filter(|p| !chosen.contains(p))
                .collect();
            if chosen.len() + added.len() >= *best {
                continue;
            }
            let mark = chosen.len();
            chosen.extend(added);
            dfs(idx + 1, partitions, chosen, best);
            chosen.truncate(mark);
        }
    }
    dfs(0, &partitions, &mut chosen, &mut best);
    Ok(best)
}

/// Minimum cardinality over laminar (hierarchical) families with a
/// feasible translation assignment, by ascending-cardinality enumeration
/// of pairwise-laminar subset combinations.
pub fn oracle_laminar_mcht(delta: &DisplacementSet) -> Result<usize> {
    let n = delta.n();
    if n > MCHT_CAP {
        return Err(Error::SizeCap(format!(
            "exhaustive laminar MCHT is capped at n = {MCHT_CAP}, got n = {n}"
        )));
    }
    let subsets = subset_masks(n);
    let laminar = |a: u32, b: u32| a & b == 0 || a & b == a || a & b == b;
    for k in 0..=n {
        // DFS over k-combinations of subsets, pairwise laminar, in lex
        // order of subset indices.
        fn rec(
            delta: &DisplacementSet,
            subsets: &[u32],
            start: usize,
            picked: &mut Vec<u32>,
            k: usize,
            laminar: &dyn Fn(u32, u32) -> bool,
        ) -> bool {
            if picked.len() == k {
                return family_feasible(delta, picked);
            }
            for gi in start..subsets.len() {
                let m = subsets[gi];
                if picked.iter().all(|&p| laminar(p, m)) {
                    picked.push(m);
                    if rec(delta, subsets, gi + 1, picked, k, laminar) {
                        return true;
                    }
                    picked.pop();
                }
            }
            false
        }
        let mut picked = Vec::new();
        if rec(delta, &subsets, 0, &mut picked, k, &laminar) {
            return Ok(k);
        }
    }
    unreachable!("the all-singletons family is laminar and feasible");
}
