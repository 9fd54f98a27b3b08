//! MLGT solvers for a fixed group family: an exact linear-pass algorithm
//! for 1D hierarchical families (bottom-up interval medians, top-down
//! clamping) and a generic convex solver for arbitrary families and
//! dimensions.

use std::collections::BTreeSet;

use num::Zero;

use crate::error::{Error, Result};
use crate::hierarchy::{build_forest, Forest};
use crate::linalg;
use crate::median::{interval_median, Interval};
use crate::model::{DisplacementSet, GroupFamily, NormKind, Transformation, Vector};
use crate::scalar::{self, Scalar};
use crate::simplex;
use crate::smooth::{self, NormTerm};

/// Rooted tree over a 1D hierarchical family, annotated per node with the
/// interval `M(v)` of optimal cumulative translations for its subtree and,
/// after extraction, the chosen cumulative value.
pub struct MedianAnnotatedTree {
    pub forest: Forest,
    pub groups: Vec<BTreeSet<usize>>,
    pub intervals: Vec<Interval>,
    /// Chosen cumulative translation per node (sum of translations on the
    /// root path), filled by [`MedianAnnotatedTree::extract`].
    pub cumulative: Vec<Scalar>,
}

impl MedianAnnotatedTree {
    /// Builds the annotated tree bottom-up. Requires d = 1, a laminar
    /// family containing every singleton `{i}` and the root group `[n]`.
    pub fn build(delta: &DisplacementSet, family: &GroupFamily) -> Result<Self> {
        if delta.dimension() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: delta.dimension(),
            });
        }
        let n = delta.n();
        family.validate(n).map_err(Error::Constraint)?;
        for i in 0..n {
            if !family.groups.iter().any(|g| g.len() == 1 && g.contains(&i)) {
                return Err(Error::Constraint(format!(
                    "family must contain the singleton group for index {i}"
                )));
            }
        }
        let full: BTreeSet<usize> = (0..n).collect();
        if !family.groups.iter().any(|g| *g == full) {
            return Err(Error::Constraint(
                "family must contain the root group of all indices".into(),
            ));
        }
        let groups = family.groups.clone();
        let forest = build_forest(&groups, n)?;

        // Bottom-up: a singleton leaf {i} pins its cumulative value to
        // delta_i; an internal node takes the interval median of its
        // children's intervals.
        let mut intervals: Vec<Option<Interval>> = vec![None; groups.len()];
        for &v in forest.order.iter().rev() {
            let iv = if groups[v].len() == 1 {
                let i = *groups[v].iter().next().unwrap();
                Interval::point(delta.delta(i).0[0].clone())
            } else {
                let children: Vec<Interval> = forest.nodes[v]
                    .children
                    .iter()
                    .map(|&c| intervals[c].clone().expect("children visited first"))
                    .collect();
                interval_median(&children)?
            };
            intervals[v] = Some(iv);
        }
        Ok(MedianAnnotatedTree {
            forest,
            groups,
            intervals: intervals.into_iter().map(Option::unwrap).collect(),
            cumulative: Vec::new(),
        })
    }

    /// Top-down extraction: each node's cumulative value is the parent's
    /// value clamped into `M(v)` (the root clamps 0), so the translation
    /// `tau(v) = x(v) - x(parent)` is 0 whenever the parent already lies
    /// in the optimal interval.
    pub fn extract(&mut self, family: &GroupFamily) -> Transformation {
        let mut cumulative: Vec<Scalar> = vec![scalar::zero(); self.groups.len()];
        let mut translations: Vec<Vector> = vec![Vector::zero(1); self.groups.len()];
        for &v in &self.forest.order {
            let incoming = match self.forest.nodes[v].parent {
                Some(p) => cumulative[p].clone(),
                None => scalar::zero(),
            };
            let chosen = self.intervals[v].clamp(&incoming);
            translations[v] = Vector(vec![&chosen - &incoming]);
            cumulative[v] = chosen;
        }
        self.cumulative = cumulative;
        Transformation {
            family: family.clone(),
            translations,
        }
    }
}

/// Exact 1D MLGT for a hierarchical family containing all singletons and
/// the root group. The returned translation for each group is the clamp
/// step of the annotated tree; total length is globally minimal.
pub fn solve_mlgt_hierarchy_1d(
    delta: &DisplacementSet,
    family: &GroupFamily,
) -> Result<Transformation> {
    let mut tree = MedianAnnotatedTree::build(delta, family)?;
    Ok(tree.extract(family))
}

/// Iteration budget (per smoothing stage) for the Euclidean convex path.
const EUCLIDEAN_ITERS_PER_STAGE: usize = 100_000;

/// Generic fixed-family length minimization. Manhattan (and any 1D) norms
/// decompose per coordinate and are solved exactly by rational LP; the
/// Euclidean norm in d >= 2 is solved by smoothed gradient descent on an
/// exact affine parameterization of the feasible set, so the returned
/// transformation is always exactly valid even though its length is only
/// tol-accurate.
pub fn solve_mlgt_convex(
    delta: &DisplacementSet,
    family: &GroupFamily,
    norm: NormKind,
    tol: f64,
) -> Result<Transformation> {
    if !(tol > 0.0) {
        return Err(Error::Malformed(format!("tol must be positive, got {tol}")));
    }
    let n = delta.n();
    let d = delta.dimension();
    family.validate(n).map_err(Error::Constraint)?;
    let k = family.groups.len();
    let memb: Vec<Vec<bool>> = (0..n)
        .map(|i| family.groups.iter().map(|g| g.contains(&i)).collect())
        .collect();

    if norm == NormKind::Manhattan || d == 1 {
        // Per-coordinate exact LP: coordinates are independent under the
        // Manhattan norm (and trivially in 1D).
        let mut per_coord: Vec<Vec<Scalar>> = Vec::with_capacity(d);
        for c in 0..d {
            let rhs: Vec<Scalar> = delta.deltas().iter().map(|v| v.0[c].clone()).collect();
            let (tau, _) = simplex::min_abs_sum(&memb, &rhs).ok_or_else(|| {
                Error::Constraint(format!(
                    "family admits no valid transformation (coordinate {c})"
                ))
            })?;
            per_coord.push(tau);
        }
        let translations: Vec<Vector> = (0..k)
            .map(|j| Vector(per_coord.iter().map(|tc| tc[j].clone()).collect()))
            .collect();
        return Ok(Transformation {
            family: family.clone(),
            translations,
        });
    }

    // Euclidean, d >= 2. Solve the membership system per coordinate; the
    // coefficient matrix is shared, so all coordinates see the same
    // nullspace basis.
    let a: Vec<Vec<Scalar>> = memb
        .iter()
        .map(|row| {
            row.iter()
                .map(|&b| if b { scalar::int(1) } else { scalar::zero() })
                .collect()
        })
        .collect();
    let mut particulars: Vec<Vec<Scalar>> = Vec::with_capacity(d);
    let mut nullspace: Vec<Vec<Scalar>> = Vec::new();
    for c in 0..d {
        let rhs: Vec<Scalar> = delta.deltas().iter().map(|v| v.0[c].clone()).collect();
        let sol = linalg::solve_linear(&a, &rhs).ok_or_else(|| {
            Error::Constraint(format!(
                "family admits no valid transformation (coordinate {c})"
            ))
        })?;
        if c == 0 {
            nullspace = sol.nullspace;
        }
        particulars.push(sol.particular);
    }
    let nb = nullspace.len();
    let nullspace_f64: Vec<Vec<f64>> = nullspace
        .iter()
        .map(|v| v.iter().map(scalar::to_f64).collect())
        .collect();

    // Variables z: one block of `nb` free coefficients per coordinate;
    // tau_j = particular_j + sum_b z[c][b] * nullspace[b][j] per coordinate.
    let terms: Vec<NormTerm> = (0..k)
        .map(|j| NormTerm {
            rows: (0..d)
                .map(|c| {
                    let mut coef = vec![0.0; d * nb];
                    for b in 0..nb {
                        coef[c * nb + b] = nullspace_f64[b][j];
                    }
                    (coef, scalar::to_f64(&particulars[c][j]))
                })
                .collect(),
        })
        .collect();
    let (z, converged) = smooth::minimize(
        &terms,
        vec![0.0; d * nb],
        tol,
        EUCLIDEAN_ITERS_PER_STAGE,
    );

    // Exact reconstruction: any z yields a feasible point of the affine
    // set, so rationalizing z preserves exact validity.
    let mut translations: Vec<Vector> = Vec::with_capacity(k);
    let z_exact: Vec<Scalar> = z
        .iter()
        .map(|&v| scalar::from_f64_exact(v))
        .collect::<Result<_>>()?;
    for j in 0..k {
        let mut comps = Vec::with_capacity(d);
        for c in 0..d {
            let mut x = particulars[c][j].clone();
            for b in 0..nb {
                if !nullspace[b][j].is_zero() {
                    x += &z_exact[c * nb + b] * &nullspace[b][j];
                }
            }
            comps.push(x);
        }
        translations.push(Vector(comps));
    }
    let t = Transformation {
        family: family.clone(),
        translations,
    };
    if !converged {
        let best_objective = smooth::objective(&terms, &z);
        return Err(Error::BudgetExceeded {
            best_objective,
            best: Box::new(t),
        });
    }
    Ok(t)
}
