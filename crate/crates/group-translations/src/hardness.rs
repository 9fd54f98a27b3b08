//! Constructive artifacts of the hardness results: the vertex-cover
//! gadget for monotone MCFT, the certificate-to-solution construction,
//! and the exact d-to-1 dimension-reduction encoding with its signed-digit
//! decoder. Everything here is exact big-integer arithmetic.

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{DisplacementSet, FamilyKind, GroupFamily, Transformation, Vector};
use crate::scalar::{self, Scalar};

/// Simple undirected graph for vertex-cover instances.
#[derive(Clone, Debug)]
pub struct Graph {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &(u, v) in &edges {
            if u == v {
                return Err(Error::Malformed(format!("self-loop at vertex {u}")));
            }
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::Malformed(format!(
                    "edge ({u}, {v}) out of range for {vertex_count} vertices"
                )));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::Malformed(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(Graph {
            vertex_count,
            edges,
        })
    }

    pub fn is_vertex_cover(&self, cover: &BTreeSet<usize>) -> bool {
        cover.iter().all(|&v| v < self.vertex_count)
            && self
                .edges
                .iter()
                .all(|&(u, v)| cover.contains(&u) || cover.contains(&v))
    }
}

// Coordinate layout of the gadget's unit vectors. Vertex v owns
// coordinates 2v and 2v+1; edge e owns the block of four starting at
// 2|V| + 4e.
fn x_vertex(v: usize, which: usize) -> usize {
    2 * v + which
}

fn x_edge(vertex_count: usize, e: usize, which: usize) -> usize {
    2 * vertex_count + 4 * e + which
}

fn unit_sum(d: usize, coords: &[usize]) -> Vector {
    let mut comps = vec![scalar::zero(); d];
    for &c in coords {
        comps[c] = scalar::int(1);
    }
    Vector(comps)
}

/// Vertex-cover gadget: one vector per vertex plus five per edge, all
/// 0/1, in dimension 2|V| + 4|E|. Delta order: vertex vectors in vertex
/// order, then the five edge vectors per edge in edge order.
pub fn encode_vertex_cover(g: &Graph) -> DisplacementSet {
    let nv = g.vertex_count;
    let d = 2 * nv + 4 * g.edges.len();
    let mut deltas = Vec::with_capacity(nv + 5 * g.edges.len());
    for v in 0..nv {
        deltas.push(unit_sum(d, &[x_vertex(v, 0), x_vertex(v, 1)]));
    }
    for (e, &(u, v)) in g.edges.iter().enumerate() {
        let xe = |which| x_edge(nv, e, which);
        deltas.push(unit_sum(d, &[x_vertex(u, 0), xe(0), xe(1)]));
        deltas.push(unit_sum(d, &[x_vertex(v, 1), xe(1), xe(2)]));
        deltas.push(unit_sum(d, &[x_vertex(u, 1), xe(2), xe(3)]));
        deltas.push(unit_sum(d, &[x_vertex(v, 0), xe(3), xe(0)]));
        deltas.push(unit_sum(d, &[xe(0), xe(1), xe(2), xe(3)]));
    }
    DisplacementSet::new(deltas).expect("gadget is nonempty with uniform dimension")
}

/// Turns a vertex cover into a valid monotone transformation for
/// [`encode_vertex_cover`] with exactly |V| + 4|E| + |cover| groups:
/// cover vertices split their vector into the two unit translations,
/// which also serve the incident edges' first/third gadget vectors; each
/// edge contributes its two uncovered gadget vectors as singletons plus
/// two paired unit sums that combine into the fifth.
pub fn cover_to_solution(g: &Graph, cover: &BTreeSet<usize>) -> Result<Transformation> {
    if !g.is_vertex_cover(cover) {
        return Err(Error::Constraint(
            "the given set is not a vertex cover of the graph".into(),
        ));
    }
    let nv = g.vertex_count;
    let d = 2 * nv + 4 * g.edges.len();
    let delta_vertex = |v: usize| v;
    let delta_edge = |e: usize, which: usize| nv + 5 * e + which;

    let mut groups: Vec<BTreeSet<usize>> = Vec::new();
    let mut translations: Vec<Vector> = Vec::new();

    // Per cover vertex: members of the two unit groups, filled below.
    let mut unit_groups: Vec<Vec<BTreeSet<usize>>> = vec![Vec::new(); nv];
    for &c in cover {
        unit_groups[c] = vec![
            BTreeSet::from([delta_vertex(c)]),
            BTreeSet::from([delta_vertex(c)]),
        ];
    }

    for (e, &(u, v)) in g.edges.iter().enumerate() {
        let xe = |which| x_edge(nv, e, which);
        // Orient the edge towards a cover endpoint, as in the reduction.
        if cover.contains(&u) {
            // delta_1 = x1(u) + (x1e + x2e), delta_3 = x2(u) + (x3e + x4e).
            unit_groups[u][0].insert(delta_edge(e, 0));
            unit_groups[u][1].insert(delta_edge(e, 2));
            groups.push(BTreeSet::from([delta_edge(e, 1)]));
            translations.push(unit_sum(d, &[x_vertex(v, 1), xe(1), xe(2)]));
            groups.push(BTreeSet::from([delta_edge(e, 3)]));
            translations.push(unit_sum(d, &[x_vertex(v, 0), xe(3), xe(0)]));
            groups.push(BTreeSet::from([delta_edge(e, 0), delta_edge(e, 4)]));
            translations.push(unit_sum(d, &[xe(0), xe(1)]));
            groups.push(BTreeSet::from([delta_edge(e, 2), delta_edge(e, 4)]));
            translations.push(unit_sum(d, &[xe(2), xe(3)]));
        } else {
            // delta_2 = x2(v) + (x2e + x3e), delta_4 = x1(v) + (x4e + x1e).
            unit_groups[v][1].insert(delta_edge(e, 1));
            unit_groups[v][0].insert(delta_edge(e, 3));
            groups.push(BTreeSet::from([delta_edge(e, 0)]));
            translations.push(unit_sum(d, &[x_vertex(u, 0), xe(0), xe(1)]));
            groups.push(BTreeSet::from([delta_edge(e, 2)]));
            translations.push(unit_sum(d, &[x_vertex(u, 1), xe(2), xe(3)]));
            groups.push(BTreeSet::from([delta_edge(e, 1), delta_edge(e, 4)]));
            translations.push(unit_sum(d, &[xe(1), xe(2)]));
            groups.push(BTreeSet::from([delta_edge(e, 3), delta_edge(e, 4)]));
            translations.push(unit_sum(d, &[xe(3), xe(0)]));
        }
    }
    for v in 0..nv {
        if cover.contains(&v) {
            for (which, members) in unit_groups[v].iter().enumerate() {
                groups.push(members.clone());
                translations.push(unit_sum(d, &[x_vertex(v, which)]));
            }
        } else {
            groups.push(BTreeSet::from([delta_vertex(v)]));
            translations.push(unit_sum(d, &[x_vertex(v, 0), x_vertex(v, 1)]));
        }
    }
    Ok(Transformation {
        family: GroupFamily::new(FamilyKind::Free, groups),
        translations,
    })
}

/// Parameters of the base-A positional encoding that folds a bounded
/// integer d-dimensional instance into one dimension.
#[derive(Clone, Debug)]
pub struct EncodingParams {
    /// Number of displacement vectors in the source instance.
    pub n: usize,
    /// Bound on the absolute value of source components (at least 1).
    pub m: BigInt,
    /// Encoding base `A = 3 ((n+1)!)^2 M`.
    pub a: BigInt,
    /// Source dimension.
    pub d: usize,
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

impl EncodingParams {
    pub fn new(n: usize, m: BigInt, d: usize) -> Self {
        let fac = factorial(n + 1);
        let a = BigInt::from(3) * &fac * &fac * &m;
        EncodingParams { n, m, a, d }
    }

    /// Digit bound `((n+1)!)^2 M` of well-behaved numbers.
    pub fn digit_bound(&self) -> BigInt {
        let fac = factorial(self.n + 1);
        &fac * &fac * &self.m
    }
}

fn as_integer(x: &Scalar) -> Option<BigInt> {
    x.is_integer().then(|| x.numer().clone())
}

/// Folds a bounded-integer instance into one dimension:
/// `f(delta) = sum_j delta^j A^(j-1)`. Injective on components bounded by
/// M; monotone instances map to nonnegative integers.
pub fn reduce_dimension(delta: &DisplacementSet) -> Result<(DisplacementSet, EncodingParams)> {
    let mut m = BigInt::one();
    for v in delta.deltas() {
        for c in &v.0 {
            let int = as_integer(c).ok_or_else(|| {
                Error::Malformed("dimension reduction requires integer components".into())
            })?;
            m = m.max(int.abs());
        }
    }
    let params = EncodingParams::new(delta.n(), m, delta.dimension());
    let encoded: Vec<Vector> = delta
        .deltas()
        .iter()
        .map(|v| Vector(vec![Scalar::from_integer(fold(v, &params.a))]))
        .collect();
    Ok((DisplacementSet::new(encoded)?, params))
}

fn fold(v: &Vector, a: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    let mut power = BigInt::one();
    for c in &v.0 {
        acc += c.numer() * &power;
        power *= a;
    }
    acc
}

/// Inverse of the fold on well-behaved numbers: extracts the signed
/// base-A digits of `x * D` and divides by `D`. Digits in the forbidden
/// middle band, a non-integral `x * D`, or leftover mass after d digits
/// all mean `x` is not well-behaved and yield a decode error.
pub fn lift_translation(x: &Scalar, params: &EncodingParams, denom: &BigInt) -> Result<Vector> {
    if denom.is_zero() || denom.abs() > factorial(params.n) {
        return Err(Error::Malformed(format!(
            "denominator must be a nonzero integer with |D| <= {}!",
            params.n
        )));
    }
    let scaled = x * Scalar::from_integer(denom.clone());
    let mut rem = as_integer(&scaled)
        .ok_or_else(|| Error::Decode("x * D is not an integer".into()))?;
    let bound = params.digit_bound();
    let two_bound = BigInt::from(2) * &bound;
    let mut digits = Vec::with_capacity(params.d);
    for j in 0..params.d {
        let y = rem.mod_floor(&params.a);
        let signed = if y <= bound {
            y
        } else if y >= two_bound {
            y - &params.a
        } else {
            return Err(Error::Decode(format!(
                "digit {} falls in the forbidden band; number is not well-behaved",
                j + 1
            )));
        };
        rem = (rem - &signed) / &params.a;
        digits.push(signed);
    }
    if !rem.is_zero() {
        return Err(Error::Decode(
            "number has mass beyond the top digit; not well-behaved".into(),
        ));
    }
    Ok(Vector(
        digits
            .into_iter()
            .map(|y| Scalar::new(y, denom.clone()))
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_validity, group};
    use crate::scalar::int;

    fn is_monotone(t: &Transformation) -> bool {
        t.translations
            .iter()
            .all(|tau| tau.0.iter().all(|c| !c.is_negative()))
    }

    #[test]
    fn k2_gadget_dimensions() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let delta = encode_vertex_cover(&g);
        assert_eq!(delta.n(), 7);
        assert_eq!(delta.dimension(), 8);
    }

    #[test]
    fn triangle_gadget_dimensions() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let delta = encode_vertex_cover(&g);
        assert_eq!(delta.n(), 18);
        assert_eq!(delta.dimension(), 18);
    }

    #[test]
    fn edgeless_gadget() {
        let g = Graph::new(3, vec![]).unwrap();
        let delta = encode_vertex_cover(&g);
        assert_eq!(delta.n(), 3);
        for v in delta.deltas() {
            let ones = v.0.iter().filter(|c| **c == int(1)).count();
            assert_eq!(ones, 2);
        }
    }

    #[test]
    fn graph_validation() {
        assert!(Graph::new(2, vec![(0, 0)]).is_err());
        assert!(Graph::new(2, vec![(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(2, vec![(0, 2)]).is_err());
    }

    #[test]
    fn k2_cover_solution() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let delta = encode_vertex_cover(&g);
        let t = cover_to_solution(&g, &group(&[0]).iter().copied().collect()).unwrap();
        assert_eq!(t.cardinality(), 7); // |V| + 4|E| + |C| = 2 + 4 + 1
        assert!(check_validity(&delta, &t).unwrap());
        assert!(is_monotone(&t));
        // The cover may also be the second endpoint.
        let t2 = cover_to_solution(&g, &BTreeSet::from([1])).unwrap();
        assert_eq!(t2.cardinality(), 7);
        assert!(check_validity(&delta, &t2).unwrap());
        assert!(is_monotone(&t2));
    }

    #[test]
    fn triangle_cover_solution() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let delta = encode_vertex_cover(&g);
        let cover = BTreeSet::from([0, 1]);
        let t = cover_to_solution(&g, &cover).unwrap();
        assert_eq!(t.cardinality(), 3 + 12 + 2);
        assert!(check_validity(&delta, &t).unwrap());
        assert!(is_monotone(&t));
    }

    #[test]
    fn edgeless_cover_solution() {
        let g = Graph::new(4, vec![]).unwrap();
        let delta = encode_vertex_cover(&g);
        let t = cover_to_solution(&g, &BTreeSet::new()).unwrap();
        assert_eq!(t.cardinality(), 4);
        assert!(check_validity(&delta, &t).unwrap());
    }

    #[test]
    fn invalid_cover_rejected() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        assert!(cover_to_solution(&g, &BTreeSet::new()).is_err());
    }

    #[test]
    fn reduce_dimension_basis_example() {
        let delta = DisplacementSet::from_i64(&[&[1, 0], &[0, 1]]);
        let (reduced, params) = reduce_dimension(&delta).unwrap();
        // n = 2, M = 1: A = 3 * (3!)^2 = 108.
        assert_eq!(params.a, BigInt::from(108));
        assert_eq!(reduced.delta(0), &Vector::from_i64(&[1]));
        assert_eq!(reduced.delta(1), &Vector::from_i64(&[108]));
    }

    #[test]
    fn reduce_dimension_zero_vector() {
        let delta = DisplacementSet::from_i64(&[&[0, 0, 0]]);
        let (reduced, _) = reduce_dimension(&delta).unwrap();
        assert!(reduced.delta(0).is_zero());
    }

    #[test]
    fn reduce_dimension_rejects_non_integers() {
        let delta = DisplacementSet::new(vec![Vector(vec![crate::scalar::ratio(1, 2)])]).unwrap();
        assert!(reduce_dimension(&delta).is_err());
    }

    #[test]
    fn roundtrip_random_vectors() {
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..200 {
            let d = 1 + (next() % 6) as usize;
            let n = 1 + (next() % 5) as usize;
            let comps: Vec<i64> = (0..d).map(|_| (next() % 21) as i64 - 10).collect();
            let v = Vector::from_i64(&comps);
            let params = EncodingParams::new(n, BigInt::from(10), d);
            let folded = Scalar::from_integer(fold(&v, &params.a));
            let lifted = lift_translation(&folded, &params, &BigInt::one()).unwrap();
            assert_eq!(lifted, v, "components {comps:?}");
            // Fold of the lift reproduces the number.
            assert_eq!(fold(&lifted, &params.a), *folded.numer());
        }
    }

    #[test]
    fn injectivity_on_bounded_inputs() {
        let params = EncodingParams::new(3, BigInt::from(2), 3);
        let mut seen = BTreeSet::new();
        for x in -2i64..=2 {
            for y in -2i64..=2 {
                for z in -2i64..=2 {
                    let v = Vector::from_i64(&[x, y, z]);
                    assert!(seen.insert(fold(&v, &params.a)));
                }
            }
        }
    }

    #[test]
    fn signed_digit_extraction() {
        // x = A - 1 decodes to (-1, 1, 0, ...).
        let params = EncodingParams::new(2, BigInt::one(), 3);
        let x = Scalar::from_integer(&params.a - BigInt::one());
        let v = lift_translation(&x, &params, &BigInt::one()).unwrap();
        assert_eq!(v, Vector::from_i64(&[-1, 1, 0]));
    }

    #[test]
    fn zero_lifts_to_zero() {
        let params = EncodingParams::new(2, BigInt::one(), 4);
        let v = lift_translation(&int(0), &params, &BigInt::one()).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn forbidden_band_is_rejected() {
        // With M = 1, n = 2: bound = 36, band is (36, 72); digit 50 must fail.
        let params = EncodingParams::new(2, BigInt::one(), 2);
        let x = int(50);
        assert!(matches!(
            lift_translation(&x, &params, &BigInt::one()),
            Err(Error::Decode(_))
        ));
    }

    #[test]
    fn non_integral_scaled_value_rejected() {
        let params = EncodingParams::new(2, BigInt::one(), 2);
        assert!(lift_translation(&crate::scalar::ratio(1, 3), &params, &BigInt::from(2)).is_err());
    }

    #[test]
    fn rational_denominator_roundtrip() {
        // x = 7/2 with D = 2: digits of 7 are (7, 0) -> (7/2, 0).
        let params = EncodingParams::new(2, BigInt::from(4), 2);
        let x = crate::scalar::ratio(7, 2);
        let v = lift_translation(&x, &params, &BigInt::from(2)).unwrap();
        assert_eq!(v.0[0], crate::scalar::ratio(7, 2));
        assert!(v.0[1].is_zero());
    }
}
