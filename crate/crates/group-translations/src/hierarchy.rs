//! Hierarchical-family solvers: MCHT, the 1D MLHT chain construction, and
//! the correspondence between 2D hierarchical transformations and
//! Euclidean Steiner trees, including a tiny-instance exact solver by full
//! topology enumeration.

use std::collections::BTreeSet;

use num::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::disjoint::solve_disjoint;
use crate::error::{Error, Result};
use crate::exec::{self, Parallelism};
use crate::model::{
    bitmasks, check_validity, laminar_pair, subset_of, DisplacementSet, FamilyKind, GroupFamily,
    Transformation, Vector,
};
use crate::scalar::{self, Scalar};

// ---------------------------------------------------------------------------
// Laminar forest

#[derive(Clone, Debug)]
pub struct ForestNode {
    /// Index into the family's group list.
    pub group: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// Rooted-forest view of a laminar family: one node per group, parent =
/// smallest strict superset.
#[derive(Clone, Debug)]
pub struct Forest {
    pub nodes: Vec<ForestNode>,
    pub roots: Vec<usize>,
    /// Node order sorted by decreasing group size (parents precede
    /// children).
    pub order: Vec<usize>,
}

pub fn build_forest(groups: &[BTreeSet<usize>], n: usize) -> Result<Forest> {
    let masks = bitmasks(groups, n);
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            if !laminar_pair(&masks[i], &masks[j]) {
                return Err(Error::Constraint(format!(
                    "groups {i} and {j} cross; family is not hierarchical"
                )));
            }
            if groups[i] == groups[j] {
                return Err(Error::Constraint(format!("groups {i} and {j} are equal")));
            }
        }
    }
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by_key(|&g| std::cmp::Reverse(groups[g].len()));

    let mut nodes: Vec<ForestNode> = (0..groups.len())
        .map(|g| ForestNode {
            group: g,
            parent: None,
            children: Vec::new(),
        })
        .collect();
    let mut roots = Vec::new();
    for &g in &order {
        // Parent: the smallest strict superset.
        let mut parent: Option<usize> = None;
        for other in 0..groups.len() {
            if other != g
                && groups[other].len() > groups[g].len()
                && subset_of(&masks[g], &masks[other])
            {
                parent = match parent {
                    Some(p) if groups[p].len() <= groups[other].len() => Some(p),
                    _ => Some(other),
                };
            }
        }
        nodes[g].parent = parent;
        match parent {
            Some(p) => nodes[p].children.push(g),
            None => roots.push(g),
        }
    }
    Ok(Forest {
        nodes,
        roots,
        order,
    })
}

impl Forest {
    /// Indices of the group that belong to no child group.
    pub fn direct_indices(&self, groups: &[BTreeSet<usize>], node: usize) -> BTreeSet<usize> {
        let mut set = groups[node].clone();
        for &child in &self.nodes[node].children {
            for i in &groups[child] {
                set.remove(i);
            }
        }
        set
    }
}

// ---------------------------------------------------------------------------
// MCHT

/// Minimum-cardinality hierarchical transformation. Any hierarchical
/// solution can be flattened group by group into a disjoint one of no
/// larger cardinality, and a disjoint family is hierarchical, so the
/// disjoint grouping is optimal here too.
pub fn solve_mcht(delta: &DisplacementSet) -> Transformation {
    let mut t = solve_disjoint(delta);
    t.family.kind = FamilyKind::Hierarchy;
    t
}

// ---------------------------------------------------------------------------
// 1D MLHT

/// 1D MLHT via nested suffix chains over the sorted positive values and
/// the sorted-descending negative values. The total length is exactly
/// `span(Delta ∪ {0})`, which matches the free lower bound, so the result
/// is optimal for both MLHT and MLFT.
pub fn solve_mlht_1d(delta: &DisplacementSet) -> Result<Transformation> {
    if delta.dimension() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: delta.dimension(),
        });
    }
    let mut groups: Vec<BTreeSet<usize>> = Vec::new();
    let mut translations: Vec<Vector> = Vec::new();
    chain(delta, true, &mut groups, &mut translations);
    chain(delta, false, &mut groups, &mut translations);
    Ok(Transformation {
        family: GroupFamily::new(FamilyKind::Hierarchy, groups),
        translations,
    })
}

/// Builds one suffix chain over the strictly positive (or strictly
/// negative) values. Equal values share a group, so the emitted family
/// has one group per distinct value and no zero translations.
fn chain(
    delta: &DisplacementSet,
    positive: bool,
    groups: &mut Vec<BTreeSet<usize>>,
    translations: &mut Vec<Vector>,
) {
    let mut items: Vec<(Scalar, usize)> = delta
        .deltas()
        .iter()
        .enumerate()
        .filter_map(|(i, v)| {
            let x = &v.0[0];
            if (positive && x.is_positive()) || (!positive && x.is_negative()) {
                Some((x.clone(), i))
            } else {
                None
            }
        })
        .collect();
    if positive {
        items.sort();
    } else {
        items.sort_by(|a, b| b.cmp(a));
    }
    // Walk from the extreme value inwards, accumulating suffix groups.
    let mut suffix: BTreeSet<usize> = items.iter().map(|(_, i)| *i).collect();
    let mut prev = scalar::zero();
    let mut pos = 0usize;
    while pos < items.len() {
        let value = items[pos].0.clone();
        groups.push(suffix.clone());
        translations.push(Vector(vec![&value - &prev]));
        while pos < items.len() && items[pos].0 == value {
            suffix.remove(&items[pos].1);
            pos += 1;
        }
        prev = value;
    }
}

/// `max(X) - min(X)` for the multiset `Delta ∪ {0}` of a 1D instance.
pub fn span_with_zero(delta: &DisplacementSet) -> Scalar {
    let mut min = scalar::zero();
    let mut max = scalar::zero();
    for v in delta.deltas() {
        let x = &v.0[0];
        if x < &min {
            min = x.clone();
        }
        if x > &max {
            max = x.clone();
        }
    }
    max - min
}

// ---------------------------------------------------------------------------
// Steiner trees

/// A tree spanning the displacement points plus the origin, with optional
/// extra (Steiner) points. Node ids: `0..n` are the delta terminals, `n`
/// is the origin, and `n + 1 + s` is `steiner_points[s]`.
#[derive(Clone, Debug)]
pub struct SteinerTree {
    /// Terminal positions: the n delta points followed by the origin.
    pub terminals: Vec<[f64; 2]>,
    pub steiner_points: Vec<[f64; 2]>,
    pub edges: Vec<(usize, usize)>,
    pub total_length: f64,
}

impl SteinerTree {
    pub fn new(
        terminals: Vec<[f64; 2]>,
        steiner_points: Vec<[f64; 2]>,
        edges: Vec<(usize, usize)>,
    ) -> Self {
        let mut tree = SteinerTree {
            terminals,
            steiner_points,
            edges,
            total_length: 0.0,
        };
        tree.total_length = tree
            .edges
            .iter()
            .map(|&(a, b)| dist(tree.point(a), tree.point(b)))
            .sum();
        tree
    }

    pub fn origin_id(&self) -> usize {
        self.terminals.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.terminals.len() + self.steiner_points.len()
    }

    pub fn point(&self, id: usize) -> [f64; 2] {
        if id < self.terminals.len() {
            self.terminals[id]
        } else {
            self.steiner_points[id - self.terminals.len()]
        }
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Converts a valid 2D hierarchical transformation into a Steiner tree on
/// `Delta ∪ {origin}` of exactly the same total length: node positions are
/// the cumulative translations, laid out top-down from the root.
pub fn transformation_to_steiner(
    delta: &DisplacementSet,
    t: &Transformation,
) -> Result<SteinerTree> {
    if delta.dimension() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: delta.dimension(),
        });
    }
    if !check_validity(delta, t)? {
        return Err(Error::Constraint(
            "transformation is not valid for the given displacements".into(),
        ));
    }
    let n = delta.n();
    let full: BTreeSet<usize> = (0..n).collect();
    let mut groups = t.family.groups.clone();
    let mut translations = t.translations.clone();
    if !groups.iter().any(|g| *g == full) {
        // The root group can always be added with a zero translation.
        groups.push(full.clone());
        translations.push(Vector::zero(2));
    }
    let forest = build_forest(&groups, n)?;

    // Cumulative positions, exact, top-down.
    let mut positions: Vec<Option<Vector>> = vec![None; groups.len()];
    for &v in &forest.order {
        let base = match forest.nodes[v].parent {
            Some(p) => positions[p].clone().expect("parents precede children"),
            None => Vector::zero(2),
        };
        positions[v] = Some(base.add(&translations[v]));
    }

    // The minimal group containing each index. Validity pins the node
    // position of that group to delta_i exactly.
    let mut minimal: Vec<Option<usize>> = vec![None; n];
    for (g, set) in groups.iter().enumerate() {
        for &i in set {
            minimal[i] = match minimal[i] {
                Some(m) if groups[m].len() <= set.len() => Some(m),
                _ => Some(g),
            };
        }
    }

    let terminals: Vec<[f64; 2]> = delta
        .deltas()
        .iter()
        .map(|v| v.xy())
        .chain(std::iter::once([0.0, 0.0]))
        .collect();
    let origin_id = n;

    // Each forest node becomes either the terminal of one of its mapped
    // indices or a fresh Steiner point; extra coincident terminals hang
    // off zero-length edges.
    let mut node_id: Vec<usize> = vec![usize::MAX; groups.len()];
    let mut steiner_points: Vec<[f64; 2]> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for &v in &forest.order {
        let mapped: Vec<usize> = (0..n).filter(|&i| minimal[i] == Some(v)).collect();
        let id = match mapped.first() {
            Some(&first) => first,
            None => {
                steiner_points.push(positions[v].as_ref().unwrap().xy());
                n + steiner_points.len()
            }
        };
        node_id[v] = id;
        for &extra in mapped.iter().skip(1) {
            edges.push((id, extra));
        }
    }
    for &v in &forest.order {
        let parent_id = match forest.nodes[v].parent {
            Some(p) => node_id[p],
            None => origin_id,
        };
        edges.push((parent_id, node_id[v]));
    }
    // Indices in no group are stationary and sit on the origin.
    for i in 0..n {
        if minimal[i].is_none() {
            edges.push((origin_id, i));
        }
    }
    Ok(SteinerTree::new(terminals, steiner_points, edges))
}

/// Converts a Steiner tree spanning `Delta ∪ {origin}` back into a valid
/// hierarchical transformation of no larger Euclidean length: root the
/// tree at the origin and emit, for every node, the group of delta
/// indices in its subtree with the edge vector to its parent.
pub fn steiner_to_transformation(
    delta: &DisplacementSet,
    tree: &SteinerTree,
) -> Result<Transformation> {
    if delta.dimension() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: delta.dimension(),
        });
    }
    let n = delta.n();
    if tree.terminals.len() != n + 1 {
        return Err(Error::Malformed(format!(
            "tree has {} terminals, expected {}",
            tree.terminals.len(),
            n + 1
        )));
    }
    let count = tree.node_count();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); count];
    for &(a, b) in &tree.edges {
        if a >= count || b >= count {
            return Err(Error::Malformed(format!("edge ({a}, {b}) out of range")));
        }
        adj[a].push(b);
        adj[b].push(a);
    }

    // BFS tree rooted at the origin terminal.
    let origin = tree.origin_id();
    let mut parent: Vec<Option<usize>> = vec![None; count];
    let mut visited = vec![false; count];
    let mut bfs_order = vec![origin];
    visited[origin] = true;
    let mut head = 0;
    while head < bfs_order.len() {
        let u = bfs_order[head];
        head += 1;
        for &v in &adj[u] {
            if !visited[v] {
                visited[v] = true;
                parent[v] = Some(u);
                bfs_order.push(v);
            }
        }
    }
    if (0..n).any(|i| !visited[i]) {
        return Err(Error::Constraint(
            "tree does not span all terminals from the origin".into(),
        ));
    }

    // Exact node positions: terminals pin to the exact displacement
    // vectors, Steiner points take their float coordinates verbatim.
    let exact_pos = |id: usize| -> Result<Vector> {
        if id < n {
            Ok(delta.delta(id).clone())
        } else if id == origin {
            Ok(Vector::zero(2))
        } else {
            let p = tree.point(id);
            Ok(Vector(vec![
                scalar::from_f64_exact(p[0])?,
                scalar::from_f64_exact(p[1])?,
            ]))
        }
    };

    // Subtree delta sets, children before parents.
    let mut subtree: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); count];
    for &u in bfs_order.iter().rev() {
        if u < n {
            subtree[u].insert(u);
        }
        if let Some(p) = parent[u] {
            let set = subtree[u].clone();
            subtree[p].extend(set);
        }
    }

    let mut groups = Vec::new();
    let mut translations = Vec::new();
    for &u in &bfs_order {
        let Some(p) = parent[u] else { continue };
        if subtree[u].is_empty() {
            continue; // Steiner point with no terminals below: dropped.
        }
        let tau = exact_pos(u)?.sub(&exact_pos(p)?);
        groups.push(subtree[u].clone());
        translations.push(tau);
    }
    let merged = Transformation {
        family: GroupFamily::new(FamilyKind::Hierarchy, groups),
        translations,
    }
    .merge_duplicate_groups();
    // Zero translations contribute nothing; drop them.
    let mut groups = Vec::new();
    let mut translations = Vec::new();
    for (g, tau) in merged.family.groups.into_iter().zip(merged.translations) {
        if !tau.is_zero() {
            groups.push(g);
            translations.push(tau);
        }
    }
    Ok(Transformation {
        family: GroupFamily::new(FamilyKind::Hierarchy, groups),
        translations,
    })
}

// ---------------------------------------------------------------------------
// Tiny exact 2D MLHT via full Steiner topology enumeration

const TINY_CAP: usize = 6;

#[derive(Clone, Debug)]
struct Topology {
    edges: Vec<(usize, usize)>,
    steiner_count: usize,
}

/// All full Steiner topologies on `t >= 2` terminals (local ids
/// `0..t-1`; Steiner ids start at `t`), generated by iterative terminal
/// insertion into edges.
fn enumerate_topologies(t: usize) -> Vec<Topology> {
    assert!(t >= 2);
    if t == 2 {
        return vec![Topology {
            edges: vec![(0, 1)],
            steiner_count: 0,
        }];
    }
    let mut topologies = vec![Topology {
        edges: vec![(0, t), (1, t), (2, t)],
        steiner_count: 1,
    }];
    for terminal in 3..t {
        let mut next = Vec::new();
        for topo in &topologies {
            for (ei, &(u, v)) in topo.edges.iter().enumerate() {
                let s = t + topo.steiner_count;
                let mut edges = topo.edges.clone();
                edges[ei] = (u, s);
                edges.push((v, s));
                edges.push((terminal, s));
                next.push(Topology {
                    edges,
                    steiner_count: topo.steiner_count + 1,
                });
            }
        }
        topologies = next;
    }
    topologies
}

/// Fermat point (geometric median) of three points.
fn fermat_point(pts: [[f64; 2]; 3]) -> [f64; 2] {
    // Coincident pairs dominate the sum: the doubled point is optimal.
    for i in 0..3 {
        for j in i + 1..3 {
            if dist(pts[i], pts[j]) < 1e-15 {
                return pts[i];
            }
        }
    }
    // A vertex with angle >= 120 degrees is the optimum.
    for v in 0..3 {
        let a = pts[(v + 1) % 3];
        let b = pts[(v + 2) % 3];
        let ua = [a[0] - pts[v][0], a[1] - pts[v][1]];
        let ub = [b[0] - pts[v][0], b[1] - pts[v][1]];
        let na = (ua[0] * ua[0] + ua[1] * ua[1]).sqrt();
        let nb = (ub[0] * ub[0] + ub[1] * ub[1]).sqrt();
        let cos = (ua[0] * ub[0] + ua[1] * ub[1]) / (na * nb);
        if cos <= -0.5 {
            return pts[v];
        }
    }
    // Interior case: Weiszfeld from the centroid.
    let mut y = [
        (pts[0][0] + pts[1][0] + pts[2][0]) / 3.0,
        (pts[0][1] + pts[1][1] + pts[2][1]) / 3.0,
    ];
    for _ in 0..200 {
        let mut num = [0.0, 0.0];
        let mut den = 0.0;
        for p in &pts {
            let d = dist(y, *p).max(1e-18);
            num[0] += p[0] / d;
            num[1] += p[1] / d;
            den += 1.0 / d;
        }
        let next = [num[0] / den, num[1] / den];
        let moved = dist(y, next);
        y = next;
        if moved < 1e-15 {
            break;
        }
    }
    y
}

/// Optimizes Steiner point positions of one topology by damped
/// geometric-median relocation; returns the final tree length.
fn optimize_topology(
    topo: &Topology,
    terminals: &[[f64; 2]],
    tol: f64,
    seed: u64,
) -> (f64, Vec<[f64; 2]>) {
    let t = terminals.len();
    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); t + topo.steiner_count];
    for &(a, b) in &topo.edges {
        neighbors[a].push(b);
        neighbors[b].push(a);
    }
    let centroid = {
        let mut c = [0.0, 0.0];
        for p in terminals {
            c[0] += p[0];
            c[1] += p[1];
        }
        [c[0] / t as f64, c[1] / t as f64]
    };
    let scale = terminals
        .iter()
        .map(|p| dist(*p, centroid))
        .fold(0.0, f64::max)
        .max(1e-9);

    let mut best: Option<(f64, Vec<[f64; 2]>)> = None;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for start in 0..3 {
        let mut steiner: Vec<[f64; 2]> = (0..topo.steiner_count)
            .map(|_| {
                if start == 0 {
                    centroid
                } else {
                    [
                        centroid[0] + rng.gen_range(-0.3..0.3) * scale,
                        centroid[1] + rng.gen_range(-0.3..0.3) * scale,
                    ]
                }
            })
            .collect();
        let pos = |steiner: &[[f64; 2]], id: usize| -> [f64; 2] {
            if id < t {
                terminals[id]
            } else {
                steiner[id - t]
            }
        };
        for _ in 0..20_000 {
            let mut max_move: f64 = 0.0;
            for s in 0..topo.steiner_count {
                let nb = &neighbors[t + s];
                let target = fermat_point([
                    pos(&steiner, nb[0]),
                    pos(&steiner, nb[1]),
                    pos(&steiner, nb[2]),
                ]);
                let cur = steiner[s];
                let next = [
                    cur[0] + 0.5 * (target[0] - cur[0]),
                    cur[1] + 0.5 * (target[1] - cur[1]),
                ];
                max_move = max_move.max(dist(cur, next));
                steiner[s] = next;
            }
            if max_move < tol {
                break;
            }
        }
        let cost: f64 = topo
            .edges
            .iter()
            .map(|&(a, b)| dist(pos(&steiner, a), pos(&steiner, b)))
            .sum();
        if best.as_ref().map_or(true, |(c, _)| cost < *c) {
            best = Some((cost, steiner));
        }
    }
    best.unwrap()
}

/// Exact (desk-scale) 2D MLHT: enumerates all full Steiner topologies on
/// the distinct displacement points plus the origin, optimizes each, and
/// converts the best tree into a hierarchical transformation.
pub fn solve_mlht_2d_exact_tiny(delta: &DisplacementSet, tol: f64) -> Result<Transformation> {
    solve_mlht_2d_exact_tiny_with(delta, tol, Parallelism::default())
}

/// Like [`solve_mlht_2d_exact_tiny`] with an explicit execution mode;
/// topology evaluations are independent work items and the reduction is
/// deterministic by `(cost, topology index)`.
pub fn solve_mlht_2d_exact_tiny_with(
    delta: &DisplacementSet,
    tol: f64,
    mode: Parallelism,
) -> Result<Transformation> {
    if delta.dimension() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: delta.dimension(),
        });
    }
    if delta.n() > TINY_CAP {
        return Err(Error::SizeCap(format!(
            "exact 2D MLHT is capped at n = {TINY_CAP}, got n = {}",
            delta.n()
        )));
    }
    let n = delta.n();

    // Distinct nonzero displacement values and their indices.
    let mut distinct: Vec<(&Vector, Vec<usize>)> = Vec::new();
    for (i, v) in delta.deltas().iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        match distinct.iter_mut().find(|(dv, _)| *dv == v) {
            Some((_, idxs)) => idxs.push(i),
            None => distinct.push((v, vec![i])),
        }
    }
    if distinct.is_empty() {
        return Ok(Transformation::empty(FamilyKind::Hierarchy));
    }

    // Local terminal layout: distinct values then the origin.
    let m = distinct.len();
    let local_terminals: Vec<[f64; 2]> = distinct
        .iter()
        .map(|(v, _)| v.xy())
        .chain(std::iter::once([0.0, 0.0]))
        .collect();
    let t_count = m + 1;

    let topologies = enumerate_topologies(t_count);
    let indices: Vec<usize> = (0..topologies.len()).collect();
    let best = exec::min_map(mode, indices, |i| {
        let (cost, steiner) = optimize_topology(&topologies[i], &local_terminals, tol, i as u64);
        Some((cost, i, steiner))
    })
    .expect("at least one topology");
    let (_, best_index, steiner) = best;
    let topo = &topologies[best_index];

    // Re-map local node ids to the global SteinerTree layout: terminal j
    // becomes the representative delta index, local origin becomes n.
    let remap = |id: usize| -> usize {
        if id < m {
            distinct[id].1[0]
        } else if id == m {
            n
        } else {
            n + 1 + (id - t_count)
        }
    };
    let mut edges: Vec<(usize, usize)> = topo
        .edges
        .iter()
        .map(|&(a, b)| (remap(a), remap(b)))
        .collect();
    for (_, idxs) in &distinct {
        for &dup in &idxs[1..] {
            edges.push((idxs[0], dup));
        }
    }
    for (i, v) in delta.deltas().iter().enumerate() {
        if v.is_zero() {
            edges.push((n, i));
        }
    }
    let terminals: Vec<[f64; 2]> = delta
        .deltas()
        .iter()
        .map(|v| v.xy())
        .chain(std::iter::once([0.0, 0.0]))
        .collect();
    let tree = SteinerTree::new(terminals, steiner, edges);
    steiner_to_transformation(delta, &tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        evaluate_cost, evaluate_cost_against, group, validate_family_kind, NormKind,
    };
    use crate::scalar::int;

    #[test]
    fn mcht_groups_equal_vectors() {
        let delta = DisplacementSet::from_i64(&[&[1], &[1], &[2]]);
        let t = solve_mcht(&delta);
        assert_eq!(t.cardinality(), 2);
        assert!(check_validity(&delta, &t).unwrap());
    }

    #[test]
    fn mcht_distinct_vectors() {
        let delta = DisplacementSet::from_i64(&[&[1, 0], &[0, 1], &[2, 2]]);
        assert_eq!(solve_mcht(&delta).cardinality(), 3);
    }

    #[test]
    fn mlht_1d_span() {
        let delta = DisplacementSet::from_i64(&[&[3], &[-2], &[5]]);
        let t = solve_mlht_1d(&delta).unwrap();
        assert!(check_validity(&delta, &t).unwrap());
        assert!(validate_family_kind(&t.family, 3));
        let report = evaluate_cost(&t, NormKind::Manhattan);
        assert_eq!(report.exact_length, Some(int(7)));
        assert_eq!(span_with_zero(&delta), int(7));
    }

    #[test]
    fn mlht_1d_common_fate_degenerates_to_one_group() {
        let delta = DisplacementSet::from_i64(&[&[4], &[4], &[4]]);
        let t = solve_mlht_1d(&delta).unwrap();
        assert_eq!(t.cardinality(), 1);
        let report = evaluate_cost(&t, NormKind::Manhattan);
        assert_eq!(report.exact_length, Some(int(4)));
    }

    #[test]
    fn mlht_1d_single_negative() {
        let delta = DisplacementSet::from_i64(&[&[-1]]);
        let t = solve_mlht_1d(&delta).unwrap();
        let report = evaluate_cost(&t, NormKind::Manhattan);
        assert_eq!(report.exact_length, Some(int(1)));
    }

    #[test]
    fn forest_structure() {
        let groups = vec![group(&[0, 1, 2]), group(&[0, 1]), group(&[0]), group(&[2])];
        let forest = build_forest(&groups, 3).unwrap();
        assert_eq!(forest.roots, vec![0]);
        assert_eq!(forest.nodes[1].parent, Some(0));
        assert_eq!(forest.nodes[2].parent, Some(1));
        assert_eq!(forest.nodes[3].parent, Some(0));
        assert_eq!(forest.direct_indices(&groups, 1), group(&[1]));
    }

    #[test]
    fn forest_rejects_crossing_groups() {
        let groups = vec![group(&[0, 1]), group(&[1, 2])];
        assert!(build_forest(&groups, 3).is_err());
    }

    #[test]
    fn single_group_segment() {
        let delta = DisplacementSet::from_i64(&[&[1, 0]]);
        let t = Transformation {
            family: GroupFamily::new(FamilyKind::Hierarchy, vec![group(&[0])]),
            translations: vec![Vector::from_i64(&[1, 0])],
        };
        let tree = transformation_to_steiner(&delta, &t).unwrap();
        assert!((tree.total_length - 1.0).abs() < 1e-12);
        assert!(tree.steiner_points.is_empty());
    }

    #[test]
    fn nested_chain_telescopes() {
        let delta = DisplacementSet::from_i64(&[&[1, 0], &[3, 0]]);
        let t = Transformation {
            family: GroupFamily::new(
                FamilyKind::Hierarchy,
                vec![group(&[0, 1]), group(&[1])],
            ),
            translations: vec![Vector::from_i64(&[1, 0]), Vector::from_i64(&[2, 0])],
        };
        let tree = transformation_to_steiner(&delta, &t).unwrap();
        assert!((tree.total_length - 3.0).abs() < 1e-12);
        let back = steiner_to_transformation(&delta, &tree).unwrap();
        assert!(check_validity(&delta, &back).unwrap());
        let report = evaluate_cost(&back, NormKind::Euclidean);
        assert!((report.length - 3.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_transformation_errors() {
        let delta = DisplacementSet::from_i64(&[&[1, 0]]);
        let t = Transformation {
            family: GroupFamily::new(FamilyKind::Hierarchy, vec![group(&[0])]),
            translations: vec![Vector::from_i64(&[2, 0])],
        };
        assert!(transformation_to_steiner(&delta, &t).is_err());
    }

    #[test]
    fn star_tree_gives_singletons() {
        let delta = DisplacementSet::from_i64(&[&[1, 0], &[0, 1]]);
        let terminals = vec![[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]];
        let tree = SteinerTree::new(terminals, vec![], vec![(2, 0), (2, 1)]);
        let t = steiner_to_transformation(&delta, &tree).unwrap();
        assert_eq!(t.cardinality(), 2);
        assert!(t.family.groups.iter().all(|g| g.len() == 1));
        assert!(check_validity(&delta, &t).unwrap());
    }

    #[test]
    fn path_through_steiner_point_gives_nested_groups() {
        let delta = DisplacementSet::from_i64(&[&[2, 1], &[2, -1]]);
        // origin -> p -> {delta_0, delta_1} with p = (1, 0).
        let tree = SteinerTree::new(
            vec![[2.0, 1.0], [2.0, -1.0], [0.0, 0.0]],
            vec![[1.0, 0.0]],
            vec![(2, 3), (3, 0), (3, 1)],
        );
        let t = steiner_to_transformation(&delta, &tree).unwrap();
        let sets: BTreeSet<_> = t.family.groups.iter().cloned().collect();
        assert_eq!(
            sets,
            BTreeSet::from([group(&[0, 1]), group(&[0]), group(&[1])])
        );
        assert!(check_validity(&delta, &t).unwrap());
        let report = evaluate_cost(&t, NormKind::Euclidean);
        assert!(report.length <= tree.total_length + 1e-9);
    }

    #[test]
    fn non_spanning_tree_errors() {
        let delta = DisplacementSet::from_i64(&[&[1, 0], &[0, 1]]);
        let tree = SteinerTree::new(
            vec![[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]],
            vec![],
            vec![(2, 0)],
        );
        assert!(steiner_to_transformation(&delta, &tree).is_err());
    }

    #[test]
    fn topology_counts_are_double_factorials() {
        assert_eq!(enumerate_topologies(3).len(), 1);
        assert_eq!(enumerate_topologies(4).len(), 3);
        assert_eq!(enumerate_topologies(5).len(), 15);
        assert_eq!(enumerate_topologies(6).len(), 105);
    }

    #[test]
    fn tiny_exact_equilateral_fermat() {
        // Terminals origin, (1,0), (1/2, sqrt(3)/2): the optimal tree
        // uses the Fermat point with total length sqrt(3). Rational
        // deltas close to the exact corner keep validity exact.
        let h = scalar::round_decimal(3f64.sqrt() / 2.0, 12).unwrap();
        let delta = DisplacementSet::new(vec![
            Vector::from_i64(&[1, 0]),
            Vector(vec![crate::scalar::ratio(1, 2), h]),
        ])
        .unwrap();
        let t = solve_mlht_2d_exact_tiny(&delta, 1e-9).unwrap();
        assert!(check_validity(&delta, &t).unwrap());
        let report = evaluate_cost(&t, NormKind::Euclidean);
        assert!(
            (report.length - 3f64.sqrt()).abs() < 1e-6,
            "length = {}",
            report.length
        );
    }

    #[test]
    fn tiny_exact_collinear_span() {
        let delta = DisplacementSet::from_i64(&[&[1, 0], &[2, 0], &[3, 0]]);
        let t = solve_mlht_2d_exact_tiny(&delta, 1e-9).unwrap();
        assert!(check_validity(&delta, &t).unwrap());
        let report = evaluate_cost_against(&delta, &t, NormKind::Euclidean).unwrap();
        assert!((report.length - 3.0).abs() < 1e-6);
    }

    #[test]
    fn tiny_exact_size_cap() {
        let rows: Vec<&[i64]> = vec![&[1, 0]; 7];
        let delta = DisplacementSet::from_i64(&rows);
        assert!(matches!(
            solve_mlht_2d_exact_tiny(&delta, 1e-9),
            Err(Error::SizeCap(_))
        ));
    }

    #[test]
    fn tiny_exact_all_zero() {
        let delta = DisplacementSet::from_i64(&[&[0, 0], &[0, 0]]);
        let t = solve_mlht_2d_exact_tiny(&delta, 1e-9).unwrap();
        assert_eq!(t.cardinality(), 0);
        assert!(check_validity(&delta, &t).unwrap());
    }
}
