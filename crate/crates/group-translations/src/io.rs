//! On-disk formats and animation export. Both file types are JSON with
//! every number serialized as a string so exact rationals survive the
//! roundtrip; see the schema notes in the repository README.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    check_validity, check_validity_approx, evaluate_cost_against, DisplacementSet, FamilyKind,
    GroupFamily, NormKind, Transformation, Vector,
};
use crate::scalar::{format_scalar, parse_scalar, to_f64, Scalar};

pub const SCHEMA_VERSION: u32 = 1;

/// Float-rotated solutions (rotated-Manhattan, smoothed Euclidean) cannot
/// be exactly valid in rational arithmetic; this is the tolerance under
/// which they still count as valid at the file level.
pub const VALIDITY_TOL: f64 = 1e-9;

fn encode_vector(v: &Vector) -> Vec<String> {
    v.0.iter().map(format_scalar).collect()
}

fn decode_vector(comps: &[String]) -> Result<Vector> {
    Ok(Vector(
        comps
            .iter()
            .map(|s| parse_scalar(s))
            .collect::<Result<Vec<Scalar>>>()?,
    ))
}

/// Group family as it appears on disk; indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: String,
    pub groups: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points_a: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points_b: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

impl InstanceFile {
    pub fn from_deltas(delta: &DisplacementSet) -> Self {
        InstanceFile {
            schema: SCHEMA_VERSION,
            points_a: None,
            points_b: None,
            deltas: Some(delta.deltas().iter().map(encode_vector).collect()),
            family: None,
            metadata: None,
        }
    }

    pub fn from_point_lists(points_a: &[Vector], points_b: &[Vector]) -> Self {
        InstanceFile {
            schema: SCHEMA_VERSION,
            points_a: Some(points_a.iter().map(encode_vector).collect()),
            points_b: Some(points_b.iter().map(encode_vector).collect()),
            deltas: None,
            family: None,
            metadata: None,
        }
    }

    /// Displacements, computed as `b - a` when point lists are given.
    pub fn displacement_set(&self) -> Result<DisplacementSet> {
        match (&self.points_a, &self.points_b, &self.deltas) {
            (Some(a), Some(b), None) => {
                let a = a
                    .iter()
                    .map(|p| decode_vector(p))
                    .collect::<Result<Vec<_>>>()?;
                let b = b
                    .iter()
                    .map(|p| decode_vector(p))
                    .collect::<Result<Vec<_>>>()?;
                DisplacementSet::from_points(&a, &b)
            }
            (None, None, Some(d)) => DisplacementSet::new(
                d.iter().map(|p| decode_vector(p)).collect::<Result<Vec<_>>>()?,
            ),
            _ => Err(Error::Malformed(
                "instance must carry either points_a + points_b or deltas".into(),
            )),
        }
    }

    /// Decoded start positions: `points_a` when present, else the origin
    /// for every point (an instance given by deltas alone).
    pub fn start_points(&self) -> Result<Vec<Vector>> {
        let delta = self.displacement_set()?;
        match &self.points_a {
            Some(a) => a.iter().map(|p| decode_vector(p)).collect(),
            None => Ok(vec![Vector::zero(delta.dimension()); delta.n()]),
        }
    }

    /// Optional family converted to 0-based indices and validated.
    pub fn group_family(&self) -> Result<Option<GroupFamily>> {
        let Some(spec) = &self.family else {
            return Ok(None);
        };
        let n = self.displacement_set()?.n();
        let kind = FamilyKind::parse(&spec.kind)?;
        let mut groups = Vec::with_capacity(spec.groups.len());
        for g in &spec.groups {
            let mut set = BTreeSet::new();
            for &i in g {
                if i == 0 || i > n {
                    return Err(Error::Malformed(format!(
                        "family index {i} out of range 1..={n}"
                    )));
                }
                set.insert(i - 1);
            }
            groups.push(set);
        }
        let family = GroupFamily::new(kind, groups);
        family.validate(n).map_err(Error::Malformed)?;
        Ok(Some(family))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRecord {
    /// 1-based point indices.
    pub indices: Vec<usize>,
    pub translation: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRecord {
    pub cardinality: usize,
    pub norm: String,
    pub length: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_length: Option<String>,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverParameters {
    pub norm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub schema: u32,
    /// MCDT / MLDT / MLGT / MCHT / MLHT / MLFT / APPROX.
    pub variant: String,
    pub family_kind: String,
    pub groups: Vec<GroupRecord>,
    pub cost: CostRecord,
    pub parameters: SolverParameters,
    /// Render order: positions into `groups`, largest group first, ties
    /// by lexicographic index list. Zero translations are omitted.
    pub stages: Vec<usize>,
}

/// Stage order over a transformation's groups: size descending, ties by
/// lexicographic comparison of the sorted index lists. Groups whose
/// translation is zero are skipped, so a stationary instance has none.
pub fn stage_order(t: &Transformation) -> Vec<usize> {
    let mut order: Vec<usize> = (0..t.family.groups.len())
        .filter(|&gi| !t.translations[gi].is_zero())
        .collect();
    order.sort_by(|&x, &y| {
        let gx: Vec<usize> = t.family.groups[x].iter().copied().collect();
        let gy: Vec<usize> = t.family.groups[y].iter().copied().collect();
        gy.len().cmp(&gx.len()).then_with(|| gx.cmp(&gy))
    });
    order
}

impl SolutionFile {
    pub fn from_transformation(
        variant: &str,
        delta: &DisplacementSet,
        t: &Transformation,
        norm: NormKind,
        beta: Option<f64>,
        tol: Option<f64>,
    ) -> Result<Self> {
        let mut report = evaluate_cost_against(delta, t, norm)?;
        if report.valid == Some(false) && check_validity_approx(delta, t, VALIDITY_TOL)? {
            report.valid = Some(true);
        }
        let groups = t
            .family
            .groups
            .iter()
            .zip(&t.translations)
            .map(|(g, tau)| GroupRecord {
                indices: g.iter().map(|&i| i + 1).collect(),
                translation: encode_vector(tau),
            })
            .collect();
        Ok(SolutionFile {
            schema: SCHEMA_VERSION,
            variant: variant.to_ascii_uppercase(),
            family_kind: t.family.kind.as_str().to_string(),
            groups,
            cost: CostRecord {
                cardinality: report.cardinality,
                norm: norm.as_str().to_string(),
                length: format!("{:.12}", report.length),
                exact_length: report.exact_length.as_ref().map(format_scalar),
                valid: report.valid.unwrap_or(false),
            },
            parameters: SolverParameters {
                norm: norm.as_str().to_string(),
                beta: beta.map(|b| format!("{b:.12}")),
                tol: tol.map(|t| format!("{t:.3e}")),
            },
            stages: stage_order(t),
        })
    }

    /// Rebuilds the in-memory transformation; `n` is the instance size.
    pub fn transformation(&self, n: usize) -> Result<Transformation> {
        let kind = FamilyKind::parse(&self.family_kind)?;
        let mut groups = Vec::with_capacity(self.groups.len());
        let mut translations = Vec::with_capacity(self.groups.len());
        for rec in &self.groups {
            let mut set = BTreeSet::new();
            for &i in &rec.indices {
                if i == 0 || i > n {
                    return Err(Error::Malformed(format!(
                        "group index {i} out of range 1..={n}"
                    )));
                }
                set.insert(i - 1);
            }
            groups.push(set);
            translations.push(decode_vector(&rec.translation)?);
        }
        Transformation::new(GroupFamily::new(kind, groups), translations)
    }
}

pub fn load_instance(path: &Path) -> Result<InstanceFile> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn save_instance(path: &Path, file: &InstanceFile) -> Result<()> {
    fs::write(path, format!("{}\n", serde_json::to_string_pretty(file)?))?;
    Ok(())
}

pub fn load_solution(path: &Path) -> Result<SolutionFile> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn save_solution(path: &Path, file: &SolutionFile) -> Result<()> {
    fs::write(path, format!("{}\n", serde_json::to_string_pretty(file)?))?;
    Ok(())
}

/// One step of a staged animation, 1-based indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnimationStage {
    pub stage: usize,
    pub indices: Vec<usize>,
    pub translation: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageList {
    pub schema: u32,
    pub stages: Vec<AnimationStage>,
}

/// Staged-transition export: an SVG 1.1 document with one frame per
/// stage plus initial and final frames, and a JSON stage list. Larger
/// groups move first; composing all stage translations per point
/// reproduces that point's displacement, so the final frame lands on the
/// target positions.
pub fn export_animation(
    instance: &InstanceFile,
    solution: &SolutionFile,
) -> Result<(String, String)> {
    let delta = instance.displacement_set()?;
    let t = solution.transformation(delta.n())?;
    if !check_validity(&delta, &t)? && !check_validity_approx(&delta, &t, VALIDITY_TOL)? {
        return Err(Error::Constraint(
            "solution does not reproduce the instance displacements".into(),
        ));
    }
    let d = delta.dimension();
    if d == 0 || d > 2 {
        return Err(Error::Constraint(format!(
            "animation export supports 1 or 2 dimensions, got {d}"
        )));
    }
    let start = instance.start_points()?;
    let order = stage_order(&t);

    // Frame 0 is A; frame s applies stage s's group translation.
    let mut frames: Vec<Vec<Vector>> = Vec::with_capacity(order.len() + 1);
    frames.push(start.clone());
    let mut current = start;
    let mut stage_list = Vec::with_capacity(order.len());
    for (s, &gi) in order.iter().enumerate() {
        let tau = &t.translations[gi];
        for &i in &t.family.groups[gi] {
            current[i] = current[i].add(tau);
        }
        frames.push(current.clone());
        stage_list.push(AnimationStage {
            stage: s + 1,
            indices: t.family.groups[gi].iter().map(|&i| i + 1).collect(),
            translation: encode_vector(tau),
        });
    }

    let svg = render_frames(&frames, &t, &order)?;
    let json = serde_json::to_string_pretty(&StageList {
        schema: SCHEMA_VERSION,
        stages: stage_list,
    })?;
    Ok((svg, format!("{json}\n")))
}

fn point_xy(v: &Vector) -> (f64, f64) {
    match v.0.len() {
        1 => (to_f64(&v.0[0]), 0.0),
        _ => (to_f64(&v.0[0]), to_f64(&v.0[1])),
    }
}

fn render_frames(frames: &[Vec<Vector>], t: &Transformation, order: &[usize]) -> Result<String> {
    const FRAME: f64 = 200.0;
    const MARGIN: f64 = 20.0;

    let mut min = (f64::INFINITY, f64::INFINITY);
    let mut max = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for frame in frames {
        for p in frame {
            let (x, y) = point_xy(p);
            min.0 = min.0.min(x);
            min.1 = min.1.min(y);
            max.0 = max.0.max(x);
            max.1 = max.1.max(y);
        }
    }
    let span = (max.0 - min.0).max(max.1 - min.1).max(1e-9);
    let scale = (FRAME - 2.0 * MARGIN) / span;
    // SVG y grows downwards; flip so the picture matches plot convention.
    let place = |p: &Vector, frame_idx: usize| -> (f64, f64) {
        let (x, y) = point_xy(p);
        (
            frame_idx as f64 * FRAME + MARGIN + (x - min.0) * scale,
            FRAME - MARGIN - (y - min.1) * scale,
        )
    };

    let width = frames.len() as f64 * FRAME;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{width}\" height=\"{FRAME}\" viewBox=\"0 0 {width} {FRAME}\">\n"
    ));
    out.push_str(
        "  <defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" \
         markerWidth=\"6\" markerHeight=\"6\" orient=\"auto-start-reverse\">\
         <path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#d4452c\"/></marker></defs>\n",
    );
    for (fi, frame) in frames.iter().enumerate() {
        let moving: Option<&BTreeSet<usize>> = if fi < order.len() {
            Some(&t.family.groups[order[fi]])
        } else {
            None
        };
        out.push_str(&format!("  <g data-frame=\"{fi}\">\n"));
        out.push_str(&format!(
            "    <rect x=\"{}\" y=\"0\" width=\"{FRAME}\" height=\"{FRAME}\" \
             fill=\"none\" stroke=\"#cccccc\"/>\n",
            fi as f64 * FRAME
        ));
        // Arrow for the stage that starts at this frame.
        if let Some(group) = moving {
            let tau = &t.translations[order[fi]];
            let k = group.len() as f64;
            let (mut cx, mut cy) = (0.0, 0.0);
            for &i in group {
                let (x, y) = place(&frame[i], fi);
                cx += x / k;
                cy += y / k;
            }
            let (dx, dy) = point_xy(tau);
            out.push_str(&format!(
                "    <line x1=\"{cx:.3}\" y1=\"{cy:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" \
                 stroke=\"#d4452c\" stroke-width=\"1.5\" marker-end=\"url(#arrow)\"/>\n",
                cx + dx * scale,
                cy - dy * scale
            ));
        }
        for (i, p) in frame.iter().enumerate() {
            let (x, y) = place(p, fi);
            let fill = match moving {
                Some(g) if g.contains(&i) => "#d4452c",
                _ => "#444444",
            };
            out.push_str(&format!(
                "    <circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"3\" fill=\"{fill}\"/>\n"
            ));
        }
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Final animation frame in instance coordinates (A plus all stage
/// translations); callers compare it against B.
pub fn final_frame(instance: &InstanceFile, solution: &SolutionFile) -> Result<Vec<Vector>> {
    let delta = instance.displacement_set()?;
    let t = solution.transformation(delta.n())?;
    let order = stage_order(&t);
    let mut current = instance.start_points()?;
    for &gi in &order {
        let tau = &t.translations[gi];
        for &i in &t.family.groups[gi] {
            current[i] = current[i].add(tau);
        }
    }
    Ok(current)
}
