//! Shared data model: displacements, group families, transformations,
//! validity checking and cost evaluation.
//!
//! Indices are 0-based internally; serialization (see [`crate::io`]) uses
//! 1-based indices.

use std::collections::{BTreeMap, BTreeSet};

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// A d-dimensional vector with exact rational components.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Vector(pub Vec<Scalar>);

impl Vector {
    pub fn zero(d: usize) -> Self {
        Vector(vec![scalar::zero(); d])
    }

    pub fn from_i64(components: &[i64]) -> Self {
        Vector(components.iter().map(|&c| scalar::int(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Vector {
        Vector(self.0.iter().map(|a| -a).collect())
    }

    /// Exact Manhattan norm.
    pub fn manhattan(&self) -> Scalar {
        self.0.iter().map(|c| c.abs()).sum()
    }

    pub fn euclidean_f64(&self) -> f64 {
        self.0
            .iter()
            .map(|c| {
                let x = scalar::to_f64(c);
                x * x
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(scalar::to_f64).collect()
    }

    pub fn xy(&self) -> [f64; 2] {
        [scalar::to_f64(&self.0[0]), scalar::to_f64(&self.0[1])]
    }
}

/// The input `Delta = {delta_1, ..., delta_n}` of displacement vectors.
#[derive(Clone, Debug)]
pub struct DisplacementSet {
    deltas: Vec<Vector>,
    dimension: usize,
}

impl DisplacementSet {
    pub fn new(deltas: Vec<Vector>) -> Result<Self> {
        let first = deltas
            .first()
            .ok_or_else(|| Error::Malformed("displacement set must be nonempty".into()))?;
        let dimension = first.dim();
        if dimension == 0 {
            return Err(Error::Malformed("dimension must be at least 1".into()));
        }
        for v in &deltas {
            if v.dim() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: v.dim(),
                });
            }
        }
        Ok(DisplacementSet { deltas, dimension })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::new(rows.iter().map(|r| Vector::from_i64(r)).collect()).unwrap()
    }

    pub fn from_points(points_a: &[Vector], points_b: &[Vector]) -> Result<Self> {
        if points_a.len() != points_b.len() {
            return Err(Error::Malformed(format!(
                "point sets must have equal size ({} vs {})",
                points_a.len(),
                points_b.len()
            )));
        }
        Self::new(points_a.iter().zip(points_b).map(|(a, b)| b.sub(a)).collect())
    }

    pub fn n(&self) -> usize {
        self.deltas.len()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn deltas(&self) -> &[Vector] {
        &self.deltas
    }

    pub fn delta(&self, i: usize) -> &Vector {
        &self.deltas[i]
    }

    /// The i-th coordinates of all displacements, as a 1D instance.
    pub fn project(&self, coord: usize) -> DisplacementSet {
        DisplacementSet {
            deltas: self
                .deltas
                .iter()
                .map(|v| Vector(vec![v.0[coord].clone()]))
                .collect(),
            dimension: 1,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FamilyKind {
    Given,
    Disjoint,
    Hierarchy,
    Free,
}

impl FamilyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyKind::Given => "given",
            FamilyKind::Disjoint => "disjoint",
            FamilyKind::Hierarchy => "hierarchy",
            FamilyKind::Free => "free",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "given" => Ok(FamilyKind::Given),
            "disjoint" => Ok(FamilyKind::Disjoint),
            "hierarchy" => Ok(FamilyKind::Hierarchy),
            "free" => Ok(FamilyKind::Free),
            other => Err(Error::Decode(format!("unknown family kind {other:?}"))),
        }
    }
}

/// A family of index groups with a declared kind. Groups are ordered and
/// duplicate-free; the rooted-tree view of a hierarchical family is
/// computed on demand via [`crate::hierarchy::Forest`].
#[derive(Clone, Debug)]
pub struct GroupFamily {
    pub kind: FamilyKind,
    pub groups: Vec<BTreeSet<usize>>,
}

impl GroupFamily {
    pub fn new(kind: FamilyKind, groups: Vec<BTreeSet<usize>>) -> Self {
        GroupFamily { kind, groups }
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Checks the invariants of the declared kind against an instance with
    /// `n` indices. Returns a machine-readable violation on failure.
    /// Duplicate groups are rejected for disjoint and hierarchical
    /// families (they break the partition / tree view) but allowed for
    /// given and free ones, where constructions legitimately emit two
    /// copies of a set with different translations (e.g. one per axis).
    pub fn validate(&self, n: usize) -> std::result::Result<(), String> {
        let check_dups = matches!(self.kind, FamilyKind::Disjoint | FamilyKind::Hierarchy);
        let mut seen = BTreeSet::new();
        for (gi, group) in self.groups.iter().enumerate() {
            if group.is_empty() {
                return Err(format!("group {gi} is empty"));
            }
            if let Some(&max) = group.iter().max() {
                if max >= n {
                    return Err(format!("group {gi} references index {max} >= n = {n}"));
                }
            }
            if check_dups && !seen.insert(group.clone()) {
                return Err(format!("group {gi} duplicates an earlier group"));
            }
        }
        match self.kind {
            FamilyKind::Given | FamilyKind::Free => Ok(()),
            FamilyKind::Disjoint => {
                let masks = bitmasks(&self.groups, n);
                for i in 0..masks.len() {
                    for j in i + 1..masks.len() {
                        if intersects(&masks[i], &masks[j]) {
                            return Err(format!("groups {i} and {j} are not disjoint"));
                        }
                    }
                }
                Ok(())
            }
            FamilyKind::Hierarchy => {
                let masks = bitmasks(&self.groups, n);
                for i in 0..masks.len() {
                    for j in i + 1..masks.len() {
                        if !laminar_pair(&masks[i], &masks[j]) {
                            return Err(format!("groups {i} and {j} cross (not laminar)"));
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

/// True iff the invariants of the family's declared kind hold.
pub fn validate_family_kind(family: &GroupFamily, n: usize) -> bool {
    family.validate(n).is_ok()
}

pub(crate) fn bitmasks(groups: &[BTreeSet<usize>], n: usize) -> Vec<Vec<u64>> {
    let words = n.div_ceil(64).max(1);
    groups
        .iter()
        .map(|g| {
            let mut mask = vec![0u64; words];
            for &i in g {
                mask[i / 64] |= 1 << (i % 64);
            }
            mask
        })
        .collect()
}

pub(crate) fn intersects(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

pub(crate) fn subset_of(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Laminar relation: nested or disjoint.
pub(crate) fn laminar_pair(a: &[u64], b: &[u64]) -> bool {
    !intersects(a, b) || subset_of(a, b) || subset_of(b, a)
}

/// A solution `(F, tau)`: a family plus one translation per group.
/// `translations[g]` belongs to `family.groups[g]`.
#[derive(Clone, Debug)]
pub struct Transformation {
    pub family: GroupFamily,
    pub translations: Vec<Vector>,
}

impl Transformation {
    pub fn new(family: GroupFamily, translations: Vec<Vector>) -> Result<Self> {
        if family.groups.len() != translations.len() {
            return Err(Error::Malformed(format!(
                "family has {} groups but {} translations",
                family.groups.len(),
                translations.len()
            )));
        }
        Ok(Transformation {
            family,
            translations,
        })
    }

    pub fn empty(kind: FamilyKind) -> Self {
        Transformation {
            family: GroupFamily::new(kind, Vec::new()),
            translations: Vec::new(),
        }
    }

    pub fn cardinality(&self) -> usize {
        self.family.groups.len()
    }

    /// Sum of translations of all groups containing index `i`.
    pub fn applied_to(&self, i: usize, dimension: usize) -> Vector {
        let mut acc = Vector::zero(dimension);
        for (group, tau) in self.family.groups.iter().zip(&self.translations) {
            if group.contains(&i) {
                acc = acc.add(tau);
            }
        }
        acc
    }

    /// Merges groups with identical index sets by summing their
    /// translations, preserving first-occurrence order.
    pub fn merge_duplicate_groups(&self) -> Transformation {
        let mut order: Vec<BTreeSet<usize>> = Vec::new();
        let mut merged: BTreeMap<BTreeSet<usize>, Vector> = BTreeMap::new();
        for (group, tau) in self.family.groups.iter().zip(&self.translations) {
            match merged.get_mut(group) {
                Some(existing) => *existing = existing.add(tau),
                None => {
                    order.push(group.clone());
                    merged.insert(group.clone(), tau.clone());
                }
            }
        }
        let translations = order.iter().map(|g| merged[g].clone()).collect();
        Transformation {
            family: GroupFamily::new(self.family.kind, order),
            translations,
        }
    }
}

/// Exact validity: for every `i`, the translations of groups containing
/// `i` sum to `delta_i`. An index in no group requires `delta_i = 0`.
pub fn check_validity(delta: &DisplacementSet, t: &Transformation) -> Result<bool> {
    let n = delta.n();
    for group in &t.family.groups {
        if let Some(&max) = group.iter().max() {
            if max >= n {
                return Err(Error::Malformed(format!(
                    "group references index {max} >= n = {n}"
                )));
            }
        }
    }
    for tau in &t.translations {
        if tau.dim() != delta.dimension() {
            return Err(Error::DimensionMismatch {
                expected: delta.dimension(),
                got: tau.dim(),
            });
        }
    }
    for i in 0..n {
        if &t.applied_to(i, delta.dimension()) != delta.delta(i) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Approximate validity with a per-coordinate absolute tolerance; used for
/// float-rotated solutions where exact equality is unattainable.
pub fn check_validity_approx(delta: &DisplacementSet, t: &Transformation, tol: f64) -> Result<bool> {
    let n = delta.n();
    let d = delta.dimension();
    for i in 0..n {
        let got = t.applied_to(i, d).to_f64();
        let want = delta.delta(i).to_f64();
        for c in 0..d {
            if (got[c] - want[c]).abs() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NormKind {
    Euclidean,
    Manhattan,
}

impl NormKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormKind::Euclidean => "euclidean",
            NormKind::Manhattan => "manhattan",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(NormKind::Euclidean),
            "manhattan" => Ok(NormKind::Manhattan),
            other => Err(Error::Decode(format!("unknown norm {other:?}"))),
        }
    }
}

/// Per-group cost entry of a [`CostReport`].
#[derive(Clone, Debug)]
pub struct GroupCost {
    pub group: BTreeSet<usize>,
    pub translation: Vector,
    pub length: f64,
    pub exact_length: Option<Scalar>,
}

/// Cost summary of a transformation. Manhattan lengths are exact
/// rationals; Euclidean lengths are floats.
#[derive(Clone, Debug)]
pub struct CostReport {
    pub cardinality: usize,
    pub norm: NormKind,
    pub length: f64,
    pub exact_length: Option<Scalar>,
    pub valid: Option<bool>,
    pub per_group: Vec<GroupCost>,
}

/// Evaluates cardinality and total length under the named norm. Validity
/// is left unset; see [`evaluate_cost_against`].
pub fn evaluate_cost(t: &Transformation, norm: NormKind) -> CostReport {
    let mut per_group = Vec::with_capacity(t.translations.len());
    let mut exact_total = scalar::zero();
    let mut float_total = 0.0f64;
    for (group, tau) in t.family.groups.iter().zip(&t.translations) {
        let (length, exact_length) = match norm {
            NormKind::Manhattan => {
                let exact = tau.manhattan();
                (scalar::to_f64(&exact), Some(exact))
            }
            NormKind::Euclidean => {
                if tau.dim() == 1 {
                    let exact = tau.manhattan();
                    (scalar::to_f64(&exact), Some(exact))
                } else {
                    (tau.euclidean_f64(), None)
                }
            }
        };
        if let Some(e) = &exact_length {
            exact_total += e;
        }
        float_total += length;
        per_group.push(GroupCost {
            group: group.clone(),
            translation: tau.clone(),
            length,
            exact_length,
        });
    }
    let all_exact = per_group.iter().all(|g| g.exact_length.is_some());
    CostReport {
        cardinality: t.family.groups.len(),
        norm,
        length: float_total,
        exact_length: if all_exact && !per_group.is_empty() {
            Some(exact_total)
        } else if t.translations.is_empty() {
            Some(scalar::zero())
        } else {
            None
        },
        valid: None,
        per_group,
    }
}

/// Like [`evaluate_cost`] but also records exact validity against `delta`.
pub fn evaluate_cost_against(
    delta: &DisplacementSet,
    t: &Transformation,
    norm: NormKind,
) -> Result<CostReport> {
    let mut report = evaluate_cost(t, norm);
    report.valid = Some(check_validity(delta, t)?);
    Ok(report)
}

/// Convenience: group set from a slice of indices.
pub fn group(indices: &[usize]) -> BTreeSet<usize> {
    indices.iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn singleton_t(delta: &DisplacementSet) -> Transformation {
        let groups: Vec<_> = (0..delta.n()).map(|i| group(&[i])).collect();
        let translations = delta.deltas().to_vec();
        Transformation::new(GroupFamily::new(FamilyKind::Free, groups), translations).unwrap()
    }

    #[test]
    fn validity_singleton_identity() {
        let delta = DisplacementSet::from_i64(&[&[2]]);
        let t = Transformation::new(
            GroupFamily::new(FamilyKind::Free, vec![group(&[0])]),
            vec![Vector::from_i64(&[2])],
        )
        .unwrap();
        assert!(check_validity(&delta, &t).unwrap());
    }

    #[test]
    fn validity_sum_mismatch() {
        let delta = DisplacementSet::from_i64(&[&[2]]);
        let t = Transformation::new(
            GroupFamily::new(FamilyKind::Free, vec![group(&[0])]),
            vec![Vector::from_i64(&[1])],
        )
        .unwrap();
        assert!(!check_validity(&delta, &t).unwrap());
    }

    #[test]
    fn validity_common_fate_group() {
        let delta = DisplacementSet::from_i64(&[&[1], &[1]]);
        let t = Transformation::new(
            GroupFamily::new(FamilyKind::Free, vec![group(&[0, 1])]),
            vec![Vector::from_i64(&[1])],
        )
        .unwrap();
        assert!(check_validity(&delta, &t).unwrap());
    }

    #[test]
    fn validity_uncovered_index_needs_zero_delta() {
        let delta = DisplacementSet::from_i64(&[&[0], &[3]]);
        let t = Transformation::new(
            GroupFamily::new(FamilyKind::Free, vec![group(&[1])]),
            vec![Vector::from_i64(&[3])],
        )
        .unwrap();
        assert!(check_validity(&delta, &t).unwrap());
        let delta_bad = DisplacementSet::from_i64(&[&[1], &[3]]);
        assert!(!check_validity(&delta_bad, &t).unwrap());
    }

    #[test]
    fn validity_dimension_mismatch_errors() {
        let delta = DisplacementSet::from_i64(&[&[1, 2]]);
        let t = Transformation::new(
            GroupFamily::new(FamilyKind::Free, vec![group(&[0])]),
            vec![Vector::from_i64(&[1])],
        )
        .unwrap();
        assert!(check_validity(&delta, &t).is_err());
    }

    #[test]
    fn cost_345_triangle() {
        let delta = DisplacementSet::from_i64(&[&[3, 4]]);
        let t = singleton_t(&delta);
        let euclid = evaluate_cost(&t, NormKind::Euclidean);
        assert!((euclid.length - 5.0).abs() < 1e-12);
        let manhattan = evaluate_cost(&t, NormKind::Manhattan);
        assert_eq!(manhattan.exact_length, Some(int(7)));
    }

    #[test]
    fn cost_1d_exact() {
        let delta = DisplacementSet::from_i64(&[&[1], &[-2]]);
        let t = singleton_t(&delta);
        let report = evaluate_cost(&t, NormKind::Euclidean);
        assert_eq!(report.cardinality, 2);
        assert_eq!(report.exact_length, Some(int(3)));
    }

    #[test]
    fn family_kind_validation() {
        let hier = GroupFamily::new(FamilyKind::Hierarchy, vec![group(&[0, 1]), group(&[0])]);
        assert!(validate_family_kind(&hier, 2));
        let crossing = GroupFamily::new(
            FamilyKind::Hierarchy,
            vec![group(&[0, 1]), group(&[1, 2])],
        );
        assert!(!validate_family_kind(&crossing, 3));
        let disj = GroupFamily::new(FamilyKind::Disjoint, vec![group(&[0]), group(&[1])]);
        assert!(validate_family_kind(&disj, 2));
        let overlapping = GroupFamily::new(FamilyKind::Disjoint, vec![group(&[0, 1]), group(&[1])]);
        assert!(!validate_family_kind(&overlapping, 2));
        let dup_hier = GroupFamily::new(FamilyKind::Hierarchy, vec![group(&[0]), group(&[0])]);
        assert!(!validate_family_kind(&dup_hier, 1));
        // Free families may carry two copies of a set (axis-split groups).
        let dup_free = GroupFamily::new(FamilyKind::Free, vec![group(&[0]), group(&[0])]);
        assert!(validate_family_kind(&dup_free, 1));
    }

    #[test]
    fn cost_invariant_under_group_permutation() {
        let delta = DisplacementSet::from_i64(&[&[1, 0], &[0, 2], &[3, 3]]);
        let t = singleton_t(&delta);
        let mut rev = t.clone();
        rev.family.groups.reverse();
        rev.translations.reverse();
        let a = evaluate_cost(&t, NormKind::Manhattan);
        let b = evaluate_cost(&rev, NormKind::Manhattan);
        assert_eq!(a.exact_length, b.exact_length);
        assert_eq!(a.cardinality, b.cardinality);
    }

    #[test]
    fn merge_duplicates_preserves_validity() {
        let delta = DisplacementSet::from_i64(&[&[3], &[1]]);
        let t = Transformation::new(
            GroupFamily::new(FamilyKind::Free, vec![group(&[0]), group(&[0, 1]), group(&[0])]),
            vec![
                Vector::from_i64(&[1]),
                Vector::from_i64(&[1]),
                Vector::from_i64(&[1]),
            ],
        )
        .unwrap();
        assert!(check_validity(&delta, &t).unwrap());
        let merged = t.merge_duplicate_groups();
        assert_eq!(merged.cardinality(), 2);
        assert!(check_validity(&delta, &merged).unwrap());
    }
}
