//! Free-family solvers: 1D MLFT, the exact Manhattan MLFT in 2D via
//! per-axis decomposition, beta-rotated Manhattan solves, the
//! 1.307-approximation for Euclidean MLFT, and the quarter-arc instance
//! whose chain solution separates Euclidean OPT from every beta-Manhattan
//! solve.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::error::{Error, Result};
use crate::hierarchy::solve_mlht_1d;
use crate::model::{
    evaluate_cost, DisplacementSet, FamilyKind, GroupFamily, NormKind, Transformation, Vector,
};
use crate::scalar;

/// Approximation factor of [`solve_euclidean_mlft_approx`]:
/// `sin(pi/8) + cos(pi/8)`.
pub fn approx_ratio() -> f64 {
    (std::f64::consts::PI / 8.0).sin() + (std::f64::consts::PI / 8.0).cos()
}

/// 1D MLFT. The nested-chain hierarchical solution already matches the
/// free lower bound `span(Delta ∪ {0})`, so it is optimal here too.
pub fn solve_mlft_1d(delta: &DisplacementSet) -> Result<Transformation> {
    let mut t = solve_mlht_1d(delta)?;
    t.family.kind = FamilyKind::Free;
    Ok(t)
}

/// Exact Manhattan MLFT in 2D: the norm separates per coordinate, so two
/// independent 1D solves (x-translations and y-translations) are
/// concatenated. All translations stay axis-aligned; a set appearing in
/// both axes is kept as two copies, so every group's Euclidean length
/// equals its Manhattan length.
pub fn solve_manhattan_mlft_2d(delta: &DisplacementSet) -> Result<Transformation> {
    if delta.dimension() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: delta.dimension(),
        });
    }
    let mut groups = Vec::new();
    let mut translations = Vec::new();
    for axis in 0..2 {
        let axis_t = solve_mlht_1d(&delta.project(axis))?;
        for (g, tau) in axis_t.family.groups.into_iter().zip(axis_t.translations) {
            let mut comps = vec![scalar::zero(), scalar::zero()];
            comps[axis] = tau.0[0].clone();
            groups.push(g);
            translations.push(Vector(comps));
        }
    }
    Ok(Transformation {
        family: GroupFamily::new(FamilyKind::Free, groups),
        translations,
    })
}

/// Number of exact quarter turns if `beta` is a multiple of pi/2.
fn quarter_turns(beta: f64) -> Option<i64> {
    let k = (beta / FRAC_PI_2).round();
    if (beta - k * FRAC_PI_2).abs() < 1e-12 {
        Some((k as i64).rem_euclid(4))
    } else {
        None
    }
}

/// Exact clockwise rotation by `k` quarter turns.
fn rotate_quarters_cw(v: &Vector, k: i64) -> Vector {
    let (x, y) = (v.0[0].clone(), v.0[1].clone());
    match k.rem_euclid(4) {
        0 => Vector(vec![x, y]),
        1 => Vector(vec![y, -x]),
        2 => Vector(vec![-x, -y]),
        _ => Vector(vec![-y, x]),
    }
}

fn rotate_cw_f64(v: &Vector, beta: f64) -> Result<Vector> {
    let [x, y] = v.xy();
    let (s, c) = beta.sin_cos();
    Ok(Vector(vec![
        scalar::from_f64_exact(x * c + y * s)?,
        scalar::from_f64_exact(-x * s + y * c)?,
    ]))
}

fn rotate_ccw_f64(v: &Vector, beta: f64) -> Result<Vector> {
    rotate_cw_f64(v, -beta)
}

/// Manhattan MLFT solved in a frame rotated clockwise by `beta`, with all
/// translations rotated back. The result is Euclidean-valid for the
/// original instance (exactly for quarter-turn betas, to 1e-9 per
/// coordinate otherwise) and its Euclidean length equals the rotated
/// frame's Manhattan length, since every translation is axis-aligned
/// there.
pub fn solve_beta_manhattan_mlft(delta: &DisplacementSet, beta: f64) -> Result<Transformation> {
    if delta.dimension() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: delta.dimension(),
        });
    }
    if let Some(k) = quarter_turns(beta) {
        let rotated = DisplacementSet::new(
            delta
                .deltas()
                .iter()
                .map(|v| rotate_quarters_cw(v, k))
                .collect(),
        )?;
        let mut t = solve_manhattan_mlft_2d(&rotated)?;
        t.translations = t
            .translations
            .iter()
            .map(|tau| rotate_quarters_cw(tau, -k))
            .collect();
        return Ok(t);
    }
    let rotated = DisplacementSet::new(
        delta
            .deltas()
            .iter()
            .map(|v| rotate_cw_f64(v, beta))
            .collect::<Result<_>>()?,
    )?;
    let mut t = solve_manhattan_mlft_2d(&rotated)?;
    t.translations = t
        .translations
        .iter()
        .map(|tau| rotate_ccw_f64(tau, beta))
        .collect::<Result<_>>()?;
    Ok(t)
}

/// Euclidean MLFT approximation: the cheaper of the 0-Manhattan and
/// pi/4-Manhattan solves, guaranteed within `sin(pi/8) + cos(pi/8)`
/// (about 1.307) of the optimum.
pub fn solve_euclidean_mlft_approx(delta: &DisplacementSet) -> Result<Transformation> {
    let axis = solve_beta_manhattan_mlft(delta, 0.0)?;
    let diag = solve_beta_manhattan_mlft(delta, FRAC_PI_4)?;
    let axis_len = evaluate_cost(&axis, NormKind::Euclidean).length;
    let diag_len = evaluate_cost(&diag, NormKind::Euclidean).length;
    Ok(if axis_len <= diag_len { axis } else { diag })
}

/// Displacements sampled on two unit-radius quarter arcs: the bottom arc
/// runs from the origin to (1,1) around center (1,0); the top arc is its
/// rotation by pi about (1/2, 1/2). Coordinates are rationalized to 12
/// decimal digits so validity checks stay exact; the arc endpoints come
/// out exactly (0,0) and (1,1).
pub fn build_arc_instance(samples_per_arc: usize) -> Result<DisplacementSet> {
    if samples_per_arc < 2 {
        return Err(Error::Malformed(format!(
            "samples_per_arc must be at least 2, got {samples_per_arc}"
        )));
    }
    let m = samples_per_arc;
    let one = scalar::int(1);
    let mut bottom: Vec<Vector> = Vec::with_capacity(m);
    for j in 0..m {
        let theta = std::f64::consts::PI - FRAC_PI_2 * j as f64 / (m - 1) as f64;
        bottom.push(Vector(vec![
            scalar::round_decimal(1.0 + theta.cos(), 12)?,
            scalar::round_decimal(theta.sin(), 12)?,
        ]));
    }
    let top: Vec<Vector> = bottom
        .iter()
        .map(|p| Vector(vec![&one - &p.0[0], &one - &p.0[1]]))
        .collect();
    DisplacementSet::new(bottom.into_iter().chain(top).collect())
}

/// The chain solution for an arc instance: translations are the
/// consecutive difference vectors along the bottom arc. Group `S_l`
/// (l = 2..m) collects the bottom points from `l` on and the top points
/// before `l`, so the bottom point `j` receives the prefix sum up to `j`
/// and the top point `j` receives the complementary suffix — validity is
/// exact by telescoping. Total Euclidean length is the inscribed polyline
/// of the bottom arc, approaching pi/2.
pub fn build_arc_chain_solution(delta: &DisplacementSet) -> Result<Transformation> {
    if delta.dimension() != 2 || delta.n() % 2 != 0 || delta.n() < 4 {
        return Err(Error::Constraint(
            "arc instance must be 2D with an even number (>= 4) of points".into(),
        ));
    }
    let m = delta.n() / 2;
    let one = scalar::int(1);
    for j in 0..m {
        let b = delta.delta(j);
        let t = delta.delta(m + j);
        if t.0[0] != &one - &b.0[0] || t.0[1] != &one - &b.0[1] {
            return Err(Error::Constraint(format!(
                "point {} is not the (1,1)-mirror of point {}",
                m + j + 1,
                j + 1
            )));
        }
    }
    if !delta.delta(0).is_zero() {
        return Err(Error::Constraint(
            "bottom arc must start at the origin".into(),
        ));
    }
    if delta.delta(m - 1) != &Vector(vec![one.clone(), one]) {
        return Err(Error::Constraint("bottom arc must end at (1,1)".into()));
    }
    let mut groups = Vec::with_capacity(m - 1);
    let mut translations = Vec::with_capacity(m - 1);
    for l in 1..m {
        // Bottom indices l..m-1 and top indices 0..l-1 (0-based).
        let mut set: std::collections::BTreeSet<usize> = (l..m).collect();
        set.extend((0..l).map(|j| m + j));
        groups.push(set);
        translations.push(delta.delta(l).sub(delta.delta(l - 1)));
    }
    Ok(Transformation {
        family: GroupFamily::new(FamilyKind::Free, groups),
        translations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_validity, check_validity_approx, evaluate_cost};
    use crate::scalar::{int, to_f64};

    #[test]
    fn mlft_1d_span_examples() {
        let cases: Vec<(Vec<i64>, i64)> =
            vec![(vec![3, -2, 5], 7), (vec![1, 2, 3], 3), (vec![0, 0], 0)];
        for (vals, want) in cases {
            let rows: Vec<&[i64]> = vals.chunks(1).collect();
            let delta = DisplacementSet::from_i64(&rows);
            let t = solve_mlft_1d(&delta).unwrap();
            assert!(check_validity(&delta, &t).unwrap());
            let len = evaluate_cost(&t, NormKind::Manhattan).exact_length.unwrap();
            assert_eq!(len, int(want), "instance {vals:?}");
        }
    }

    #[test]
    fn manhattan_2d_single_point() {
        let delta = DisplacementSet::from_i64(&[&[3, 4]]);
        let t = solve_manhattan_mlft_2d(&delta).unwrap();
        assert!(check_validity(&delta, &t).unwrap());
        assert_eq!(
            evaluate_cost(&t, NormKind::Manhattan).exact_length,
            Some(int(7))
        );
        assert_eq!(t.cardinality(), 2);
    }

    #[test]
    fn manhattan_2d_axis_pair() {
        let delta = DisplacementSet::from_i64(&[&[1, 0], &[0, 1]]);
        let t = solve_manhattan_mlft_2d(&delta).unwrap();
        assert!(check_validity(&delta, &t).unwrap());
        assert_eq!(
            evaluate_cost(&t, NormKind::Manhattan).exact_length,
            Some(int(2))
        );
    }

    #[test]
    fn manhattan_2d_equal_vectors() {
        let delta = DisplacementSet::from_i64(&[&[2, 3], &[2, 3]]);
        let t = solve_manhattan_mlft_2d(&delta).unwrap();
        assert!(check_validity(&delta, &t).unwrap());
        // One axis-aligned group per axis over the same index set.
        assert_eq!(t.cardinality(), 2);
        let delta_one_axis = DisplacementSet::from_i64(&[&[2, 0], &[2, 0]]);
        let t2 = solve_manhattan_mlft_2d(&delta_one_axis).unwrap();
        assert_eq!(t2.cardinality(), 1);
    }

    #[test]
    fn beta_zero_matches_axis_solve() {
        let delta = DisplacementSet::from_i64(&[&[1, 2], &[3, -1]]);
        let axis = solve_manhattan_mlft_2d(&delta).unwrap();
        let beta0 = solve_beta_manhattan_mlft(&delta, 0.0).unwrap();
        assert_eq!(
            evaluate_cost(&axis, NormKind::Manhattan).exact_length,
            evaluate_cost(&beta0, NormKind::Manhattan).exact_length
        );
    }

    #[test]
    fn beta_half_pi_same_cost_as_zero() {
        let delta = DisplacementSet::from_i64(&[&[1, 2], &[3, -1]]);
        let a = solve_beta_manhattan_mlft(&delta, 0.0).unwrap();
        let b = solve_beta_manhattan_mlft(&delta, FRAC_PI_2).unwrap();
        assert!(check_validity(&delta, &b).unwrap());
        assert_eq!(
            evaluate_cost(&a, NormKind::Manhattan).exact_length,
            evaluate_cost(&b, NormKind::Manhattan).exact_length
        );
    }

    #[test]
    fn beta_quarter_pi_diagonal() {
        let delta = DisplacementSet::from_i64(&[&[1, 1]]);
        let t = solve_beta_manhattan_mlft(&delta, FRAC_PI_4).unwrap();
        assert!(check_validity_approx(&delta, &t, 1e-9).unwrap());
        let len = evaluate_cost(&t, NormKind::Euclidean).length;
        assert!((len - 2f64.sqrt()).abs() < 1e-9, "len = {len}");
    }

    #[test]
    fn approx_prefers_diagonal_frame_on_diagonal_data() {
        let delta = DisplacementSet::from_i64(&[&[1, 1], &[2, 2]]);
        let t = solve_euclidean_mlft_approx(&delta).unwrap();
        assert!(check_validity_approx(&delta, &t, 1e-9).unwrap());
        let len = evaluate_cost(&t, NormKind::Euclidean).length;
        assert!((len - 8f64.sqrt()).abs() < 1e-9, "len = {len}");
    }

    #[test]
    fn approx_exact_on_axis_aligned_data() {
        let delta = DisplacementSet::from_i64(&[&[2, 0], &[5, 0]]);
        let t = solve_euclidean_mlft_approx(&delta).unwrap();
        let len = evaluate_cost(&t, NormKind::Euclidean).length;
        assert!((len - 5.0).abs() < 1e-9);
    }

    #[test]
    fn arc_instance_shape() {
        let delta = build_arc_instance(2).unwrap();
        assert_eq!(delta.n(), 4);
        assert!(delta.delta(0).is_zero());
        assert_eq!(delta.delta(1), &Vector::from_i64(&[1, 1]));
        let delta = build_arc_instance(16).unwrap();
        let one = int(1);
        for j in 0..16 {
            let b = delta.delta(j);
            let t = delta.delta(16 + j);
            assert_eq!(t.0[0], &one - &b.0[0]);
            assert_eq!(t.0[1], &one - &b.0[1]);
            // Bottom points sit on the unit circle around (1, 0), up to
            // the 12-digit rationalization.
            let dx = to_f64(&b.0[0]) - 1.0;
            let dy = to_f64(&b.0[1]);
            assert!(((dx * dx + dy * dy).sqrt() - 1.0).abs() < 1e-9);
        }
        assert!(build_arc_instance(1).is_err());
    }

    #[test]
    fn arc_chain_valid_and_short() {
        let delta = build_arc_instance(64).unwrap();
        let t = build_arc_chain_solution(&delta).unwrap();
        assert!(check_validity(&delta, &t).unwrap());
        let len = evaluate_cost(&t, NormKind::Euclidean).length;
        let target = std::f64::consts::FRAC_PI_2;
        assert!(len < target + 1e-6 && len > target - 0.01, "len = {len}");
    }

    #[test]
    fn arc_chain_rejects_non_arc_input() {
        let delta = DisplacementSet::from_i64(&[&[0, 0], &[1, 1], &[1, 1], &[0, 0]]);
        // Mirror symmetry holds but the bottom arc has only 2 points and
        // degenerates; a broken mirror must fail.
        assert!(build_arc_chain_solution(&delta).is_ok());
        let bad = DisplacementSet::from_i64(&[&[0, 0], &[1, 1], &[1, 1], &[5, 0]]);
        assert!(build_arc_chain_solution(&bad).is_err());
        let not_origin = DisplacementSet::from_i64(&[&[1, 0], &[1, 1], &[0, 1], &[0, 0]]);
        assert!(build_arc_chain_solution(&not_origin).is_err());
    }

    #[test]
    fn beta_manhattan_on_arc_is_expensive() {
        let delta = build_arc_instance(64).unwrap();
        let chain = evaluate_cost(
            &build_arc_chain_solution(&delta).unwrap(),
            NormKind::Euclidean,
        )
        .length;
        for beta in [0.0, std::f64::consts::PI / 8.0, FRAC_PI_4] {
            let t = solve_beta_manhattan_mlft(&delta, beta).unwrap();
            assert!(check_validity_approx(&delta, &t, 1e-9).unwrap());
            let len = evaluate_cost(&t, NormKind::Euclidean).length;
            assert!(len > 1.9, "beta = {beta}: len = {len}");
            assert!(len / chain > 1.2, "ratio too small at beta = {beta}");
        }
    }

    #[test]
    fn approx_ratio_constant() {
        assert!((approx_ratio() - 1.30656).abs() < 1e-5);
    }
}
