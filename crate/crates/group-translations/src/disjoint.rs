//! MCDT / MLDT solver. In a disjoint family every index lies in at most
//! one group, so a group translation must equal the displacement of each
//! of its members: groups are exactly the equivalence classes of equal
//! displacement vectors. One grouping is therefore simultaneously optimal
//! for both cardinality and length.

use std::collections::BTreeSet;

use crate::model::{DisplacementSet, FamilyKind, GroupFamily, Transformation, Vector};

/// Groups indices with identical displacement vectors; zero vectors form
/// no group (empty-sum convention). Group order is lexicographic by
/// translation vector.
pub fn solve_disjoint(delta: &DisplacementSet) -> Transformation {
    let mut by_vector: Vec<(&Vector, usize)> = delta
        .deltas()
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| (v, i))
        .collect();
    by_vector.sort();

    let mut groups: Vec<BTreeSet<usize>> = Vec::new();
    let mut translations: Vec<Vector> = Vec::new();
    for (v, i) in by_vector {
        match translations.last() {
            Some(last) if last == v => {
                groups.last_mut().unwrap().insert(i);
            }
            _ => {
                groups.push(BTreeSet::from([i]));
                translations.push(v.clone());
            }
        }
    }
    Transformation {
        family: GroupFamily::new(FamilyKind::Disjoint, groups),
        translations,
    }
}
