//! Constraint catalog: translates each constraint kind into residual
//! equations with analytic Jacobian rows over entity positions/orientations
//! and auxiliary scalars.
//!
//! Collinearity of two normal or direction vectors `v1`, `v2` is expressed as
//! `v1 + t v2 = 0` with a scalar unknown `t`; dimensional rows carry a sign
//! `s` frozen from the witness so the stored geometry is an exact root.
//! Auxiliary scalars are genuine Jacobian columns, appended after all entity
//! blocks; they pass through the screw transform untouched.

use crate::entity::{EntityKind, GeometricEntity};
use crate::error::ModelError;
use crate::model::GeometryState;
use nalgebra::{DMatrix, DVector, Matrix3, RowVector3, Vector3};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

/// The supported constraint kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    PlanePlaneDistance,
    PlanePlaneAngle,
    PlanePlaneParallel,
    PlanePlanePerpendicular,
    EdgeLength,
    PlaneCylinderDistance,
    PlaneCylinderTangent,
    CylinderCylinderCoaxial,
    PointOnPlane,
    /// Shortest distance between two skew lines, one scalar equation.
    ///
    /// The translation is a documented choice: `(p1 - p2) . (d1 x d2) = s l
    /// |d1 x d2|` with `s` frozen at the witness. Parallel lines are rejected
    /// as degenerate.
    LineLineDistance,
}

impl ConstraintKind {
    /// Residual rows produced by one instance of this kind.
    pub fn row_count(self) -> usize {
        match self {
            ConstraintKind::PlanePlaneDistance => 4,
            ConstraintKind::PlanePlaneParallel => 3,
            ConstraintKind::PlanePlanePerpendicular
            | ConstraintKind::PlanePlaneAngle
            | ConstraintKind::EdgeLength
            | ConstraintKind::PointOnPlane
            | ConstraintKind::LineLineDistance => 1,
            ConstraintKind::PlaneCylinderDistance | ConstraintKind::PlaneCylinderTangent => 2,
            ConstraintKind::CylinderCylinderCoaxial => 6,
        }
    }

    /// Auxiliary scalars introduced by one instance of this kind.
    ///
    /// One per collinearity sub-block; the coaxial direction equality is
    /// sign-resolved and uses none.
    pub fn aux_count(self) -> usize {
        match self {
            ConstraintKind::PlanePlaneDistance | ConstraintKind::PlanePlaneParallel => 1,
            _ => 0,
        }
    }

    /// Whether this kind carries a dimensional value (mm or radians).
    pub fn is_dimensional(self) -> bool {
        matches!(
            self,
            ConstraintKind::PlanePlaneDistance
                | ConstraintKind::PlanePlaneAngle
                | ConstraintKind::EdgeLength
                | ConstraintKind::PlaneCylinderDistance
                | ConstraintKind::LineLineDistance
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ConstraintKind::PlanePlaneDistance => "plane_plane_distance",
            ConstraintKind::PlanePlaneAngle => "plane_plane_angle",
            ConstraintKind::PlanePlaneParallel => "plane_plane_parallel",
            ConstraintKind::PlanePlanePerpendicular => "plane_plane_perpendicular",
            ConstraintKind::EdgeLength => "edge_length",
            ConstraintKind::PlaneCylinderDistance => "plane_cylinder_distance",
            ConstraintKind::PlaneCylinderTangent => "plane_cylinder_tangent",
            ConstraintKind::CylinderCylinderCoaxial => "cylinder_cylinder_coaxial",
            ConstraintKind::PointOnPlane => "point_on_plane",
            ConstraintKind::LineLineDistance => "line_line_distance",
        }
    }
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A constraint between geometric entities, referencing them by id.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub id: String,
    pub kind: ConstraintKind,
    pub entity_refs: Vec<String>,
    /// Dimensional value in mm or radians; present iff the kind is dimensional.
    pub value: Option<f64>,
}

impl Constraint {
    pub fn new(
        id: impl Into<String>,
        kind: ConstraintKind,
        refs: [&str; 2],
        value: Option<f64>,
    ) -> Self {
        Self {
            id: id.into(),
            kind,
            entity_refs: refs.iter().map(|s| s.to_string()).collect(),
            value,
        }
    }
}

/// The per-kind evaluator with entity indices resolved and branch signs,
/// angle targets and aux witness values frozen from the model geometry.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum BlockOp {
    /// `n_i + t n_j = 0`, aux `t`, witness `t = -n_i . n_j`.
    Parallel { i: usize, j: usize },
    /// Rows 0-2 as `Parallel`; row 3: `n_i . (p_j - p_i) - s l = 0`.
    Distance { i: usize, j: usize, l: f64, s: f64 },
    /// `n_i . n_j = 0`.
    Perpendicular { i: usize, j: usize },
    /// `n_i . n_j - c = 0`, `c` the member of `{cos v, -cos v}` nearer the witness.
    Angle { i: usize, j: usize, cos_target: f64 },
    /// `|p_i - p_j|^2 - l^2 = 0` between two points.
    EdgeLength { i: usize, j: usize, l: f64 },
    /// `n . d = 0` and `n . (p_p - p_c) - s l = 0`; tangency uses `l = r_cyl`.
    PlaneCylinder {
        plane: usize,
        cyl: usize,
        l: f64,
        s: f64,
    },
    /// `d_i - s d_j = 0` (3 rows) and `d_i x (p_i - p_j) = 0` (3 rows).
    Coaxial { i: usize, j: usize, s: f64 },
    /// `n . (p_v - p_p) = 0`.
    PointOnPlane { point: usize, plane: usize },
    /// `(p_i - p_j) . (d_i x d_j) - s l |d_i x d_j| = 0`.
    LineLine { i: usize, j: usize, l: f64, s: f64 },
}

/// A constraint's residual equations: row/aux bookkeeping plus the frozen
/// evaluator. Offsets are assigned when the owning model is built.
#[derive(Clone, Debug, PartialEq)]
pub struct EquationBlock {
    pub constraint_id: String,
    pub constraint_index: usize,
    pub rows: usize,
    pub aux: usize,
    pub row_offset: usize,
    pub aux_offset: usize,
    pub(crate) op: BlockOp,
}

fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Sign of `x` with the zero branch frozen to `+1`.
fn frozen_sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

fn kinds_of(refs: &[usize], entities: &[GeometricEntity]) -> String {
    refs.iter()
        .map(|&i| entities[i].kind.name())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Translates one constraint against the model geometry, freezing branch
/// signs and angle targets so the witness is an exact root.
///
/// Plane/cylinder and point/plane pairs are accepted in either order and
/// normalized internally.
pub fn translate_constraint(
    constraint: &Constraint,
    entities: &[GeometricEntity],
    index: &HashMap<String, usize>,
) -> Result<EquationBlock, ModelError> {
    let id = constraint.id.clone();
    let kind = constraint.kind;

    if constraint.entity_refs.len() != 2 {
        return Err(ModelError::ReferenceCount {
            id,
            expected: 2,
            got: constraint.entity_refs.len(),
        });
    }
    let mut refs = [0usize; 2];
    for (slot, entity_id) in constraint.entity_refs.iter().enumerate() {
        refs[slot] = *index
            .get(entity_id)
            .ok_or_else(|| ModelError::DanglingReference {
                constraint: id.clone(),
                entity: entity_id.clone(),
            })?;
    }
    if refs[0] == refs[1] {
        return Err(ModelError::RepeatedReference { id });
    }

    if kind.is_dimensional() {
        if constraint.value.is_none() {
            return Err(ModelError::MissingValue {
                id,
                kind: kind.name().to_string(),
            });
        }
    } else if constraint.value.is_some() {
        return Err(ModelError::UnexpectedValue {
            id,
            kind: kind.name().to_string(),
        });
    }
    let value = constraint.value.unwrap_or(0.0);
    if kind.is_dimensional() && kind != ConstraintKind::PlanePlaneAngle && value < 0.0 {
        return Err(ModelError::NegativeValue { id, value });
    }

    let signature_err = |expected: &str| ModelError::SignatureMismatch {
        id: id.clone(),
        kind: kind.name().to_string(),
        expected: expected.to_string(),
        got: kinds_of(&refs, entities),
    };
    let both = (entities[refs[0]].kind, entities[refs[1]].kind);

    let op = match kind {
        ConstraintKind::PlanePlaneParallel
        | ConstraintKind::PlanePlanePerpendicular
        | ConstraintKind::PlanePlaneAngle
        | ConstraintKind::PlanePlaneDistance => {
            if both != (EntityKind::Plane, EntityKind::Plane) {
                return Err(signature_err("plane, plane"));
            }
            let (i, j) = (refs[0], refs[1]);
            let n_i = entities[i].orientation_unchecked();
            let n_j = entities[j].orientation_unchecked();
            match kind {
                ConstraintKind::PlanePlaneParallel => BlockOp::Parallel { i, j },
                ConstraintKind::PlanePlanePerpendicular => BlockOp::Perpendicular { i, j },
                ConstraintKind::PlanePlaneAngle => {
                    if !(value > 0.0 && value < std::f64::consts::PI) {
                        return Err(ModelError::AngleOutOfRange { id, value });
                    }
                    // The witness picks between theta and pi - theta; B-rep
                    // face normals flip with orientation conventions.
                    let d = n_i.dot(&n_j);
                    let c = value.cos();
                    let cos_target = if (d - c).abs() <= (d + c).abs() { c } else { -c };
                    BlockOp::Angle { i, j, cos_target }
                }
                ConstraintKind::PlanePlaneDistance => {
                    let gap = n_i.dot(&(entities[j].position - entities[i].position));
                    BlockOp::Distance {
                        i,
                        j,
                        l: value,
                        s: frozen_sign(gap),
                    }
                }
                _ => unreachable!(),
            }
        }
        ConstraintKind::EdgeLength => {
            if both != (EntityKind::Point, EntityKind::Point) {
                return Err(signature_err("point, point"));
            }
            let (i, j) = (refs[0], refs[1]);
            if (entities[i].position - entities[j].position).norm() < 1e-12 {
                return Err(ModelError::DegenerateEdge { id });
            }
            BlockOp::EdgeLength { i, j, l: value }
        }
        ConstraintKind::PlaneCylinderDistance | ConstraintKind::PlaneCylinderTangent => {
            let (plane, cyl) = match both {
                (EntityKind::Plane, EntityKind::Cylinder) => (refs[0], refs[1]),
                (EntityKind::Cylinder, EntityKind::Plane) => (refs[1], refs[0]),
                _ => return Err(signature_err("plane, cylinder (either order)")),
            };
            let l = if kind == ConstraintKind::PlaneCylinderTangent {
                entities[cyl].size_params[0]
            } else {
                value
            };
            let n = entities[plane].orientation_unchecked();
            let gap = n.dot(&(entities[plane].position - entities[cyl].position));
            BlockOp::PlaneCylinder {
                plane,
                cyl,
                l,
                s: frozen_sign(gap),
            }
        }
        ConstraintKind::CylinderCylinderCoaxial => {
            if both != (EntityKind::Cylinder, EntityKind::Cylinder) {
                return Err(signature_err("cylinder, cylinder"));
            }
            let (i, j) = (refs[0], refs[1]);
            let d_i = entities[i].orientation_unchecked();
            let d_j = entities[j].orientation_unchecked();
            BlockOp::Coaxial {
                i,
                j,
                s: frozen_sign(d_i.dot(&d_j)),
            }
        }
        ConstraintKind::PointOnPlane => {
            let (point, plane) = match both {
                (EntityKind::Point, EntityKind::Plane) => (refs[0], refs[1]),
                (EntityKind::Plane, EntityKind::Point) => (refs[1], refs[0]),
                _ => return Err(signature_err("point, plane (either order)")),
            };
            BlockOp::PointOnPlane { point, plane }
        }
        ConstraintKind::LineLineDistance => {
            if both != (EntityKind::Line, EntityKind::Line) {
                return Err(signature_err("line, line"));
            }
            let (i, j) = (refs[0], refs[1]);
            let d_i = entities[i].orientation_unchecked();
            let d_j = entities[j].orientation_unchecked();
            let c = d_i.cross(&d_j);
            if c.norm() < 1e-9 {
                return Err(ModelError::ParallelLines { id });
            }
            let w = entities[i].position - entities[j].position;
            BlockOp::LineLine {
                i,
                j,
                l: value,
                s: frozen_sign(w.dot(&c)),
            }
        }
    };

    Ok(EquationBlock {
        constraint_id: constraint.id.clone(),
        constraint_index: 0,
        rows: kind.row_count(),
        aux: kind.aux_count(),
        row_offset: 0,
        aux_offset: 0,
        op,
    })
}

impl EquationBlock {
    /// Initial aux values making the witness an exact root.
    pub fn aux_init(&self, g: &GeometryState) -> Vec<f64> {
        match self.op {
            BlockOp::Parallel { i, j } | BlockOp::Distance { i, j, .. } => {
                vec![-g.orientation(i).dot(&g.orientation(j))]
            }
            _ => Vec::new(),
        }
    }

    /// Evaluates the residual rows of this block at the given geometry and
    /// aux values (the slice for this block only).
    pub fn residuals(&self, g: &GeometryState, aux: &[f64]) -> DVector<f64> {
        match self.op {
            BlockOp::Parallel { i, j } => {
                let r = g.orientation(i) + aux[0] * g.orientation(j);
                DVector::from_column_slice(r.as_slice())
            }
            BlockOp::Distance { i, j, l, s } => {
                let n_i = g.orientation(i);
                let r = n_i + aux[0] * g.orientation(j);
                let gap = n_i.dot(&(g.position(j) - g.position(i)));
                DVector::from_vec(vec![r.x, r.y, r.z, gap - s * l])
            }
            BlockOp::Perpendicular { i, j } => {
                DVector::from_element(1, g.orientation(i).dot(&g.orientation(j)))
            }
            BlockOp::Angle { i, j, cos_target } => {
                DVector::from_element(1, g.orientation(i).dot(&g.orientation(j)) - cos_target)
            }
            BlockOp::EdgeLength { i, j, l } => {
                let d = g.position(i) - g.position(j);
                DVector::from_element(1, d.norm_squared() - l * l)
            }
            BlockOp::PlaneCylinder { plane, cyl, l, s } => {
                let n = g.orientation(plane);
                let d = g.orientation(cyl);
                let gap = n.dot(&(g.position(plane) - g.position(cyl)));
                DVector::from_vec(vec![n.dot(&d), gap - s * l])
            }
            BlockOp::Coaxial { i, j, s } => {
                let dir = g.orientation(i) - s * g.orientation(j);
                let m = g.orientation(i).cross(&(g.position(i) - g.position(j)));
                DVector::from_vec(vec![dir.x, dir.y, dir.z, m.x, m.y, m.z])
            }
            BlockOp::PointOnPlane { point, plane } => {
                let n = g.orientation(plane);
                DVector::from_element(1, n.dot(&(g.position(point) - g.position(plane))))
            }
            BlockOp::LineLine { i, j, l, s } => {
                let c = g.orientation(i).cross(&g.orientation(j));
                let w = g.position(i) - g.position(j);
                DVector::from_element(1, w.dot(&c) - s * l * c.norm())
            }
        }
    }

    /// Writes this block's analytic Jacobian rows into `out` at
    /// `self.row_offset`, over per-entity `(dp, dn)` columns and aux columns.
    pub fn jacobian_into(
        &self,
        g: &GeometryState,
        aux: &[f64],
        aux_base: usize,
        out: &mut DMatrix<f64>,
    ) {
        let r0 = self.row_offset;
        let pos = |e: usize| 6 * e;
        let ori = |e: usize| 6 * e + 3;
        let set_row3 = |out: &mut DMatrix<f64>, row: usize, col: usize, v: RowVector3<f64>| {
            out.view_mut((row, col), (1, 3)).copy_from(&v);
        };
        let set_block3 = |out: &mut DMatrix<f64>, row: usize, col: usize, m: Matrix3<f64>| {
            out.view_mut((row, col), (3, 3)).copy_from(&m);
        };

        match self.op {
            BlockOp::Parallel { i, j } => {
                let t = aux[0];
                set_block3(out, r0, ori(i), Matrix3::identity());
                set_block3(out, r0, ori(j), t * Matrix3::identity());
                let n_j = g.orientation(j);
                for row in 0..3 {
                    out[(r0 + row, aux_base + self.aux_offset)] = n_j[row];
                }
            }
            BlockOp::Distance { i, j, .. } => {
                let t = aux[0];
                set_block3(out, r0, ori(i), Matrix3::identity());
                set_block3(out, r0, ori(j), t * Matrix3::identity());
                let n_j = g.orientation(j);
                for row in 0..3 {
                    out[(r0 + row, aux_base + self.aux_offset)] = n_j[row];
                }
                let n_i = g.orientation(i);
                let w = g.position(j) - g.position(i);
                set_row3(out, r0 + 3, pos(i), -n_i.transpose());
                set_row3(out, r0 + 3, pos(j), n_i.transpose());
                set_row3(out, r0 + 3, ori(i), w.transpose());
            }
            BlockOp::Perpendicular { i, j } | BlockOp::Angle { i, j, .. } => {
                set_row3(out, r0, ori(i), g.orientation(j).transpose());
                set_row3(out, r0, ori(j), g.orientation(i).transpose());
            }
            BlockOp::EdgeLength { i, j, .. } => {
                let d = g.position(i) - g.position(j);
                set_row3(out, r0, pos(i), 2.0 * d.transpose());
                set_row3(out, r0, pos(j), -2.0 * d.transpose());
            }
            BlockOp::PlaneCylinder { plane, cyl, .. } => {
                let n = g.orientation(plane);
                let d = g.orientation(cyl);
                set_row3(out, r0, ori(plane), d.transpose());
                set_row3(out, r0, ori(cyl), n.transpose());
                let w = g.position(plane) - g.position(cyl);
                set_row3(out, r0 + 1, pos(plane), n.transpose());
                set_row3(out, r0 + 1, pos(cyl), -n.transpose());
                set_row3(out, r0 + 1, ori(plane), w.transpose());
            }
            BlockOp::Coaxial { i, j, s } => {
                set_block3(out, r0, ori(i), Matrix3::identity());
                set_block3(out, r0, ori(j), -s * Matrix3::identity());
                let d_i = g.orientation(i);
                let w = g.position(i) - g.position(j);
                set_block3(out, r0 + 3, ori(i), -skew(&w));
                set_block3(out, r0 + 3, pos(i), skew(&d_i));
                set_block3(out, r0 + 3, pos(j), -skew(&d_i));
            }
            BlockOp::PointOnPlane { point, plane } => {
                let n = g.orientation(plane);
                let w = g.position(point) - g.position(plane);
                set_row3(out, r0, pos(point), n.transpose());
                set_row3(out, r0, pos(plane), -n.transpose());
                set_row3(out, r0, ori(plane), w.transpose());
            }
            BlockOp::LineLine { i, j, l, s } => {
                let d_i = g.orientation(i);
                let d_j = g.orientation(j);
                let w = g.position(i) - g.position(j);
                let c = d_i.cross(&d_j);
                let c_hat = c / c.norm();
                set_row3(out, r0, pos(i), c.transpose());
                set_row3(out, r0, pos(j), -c.transpose());
                // d/d d_i [w.(d_i x d_j)] = d_j x w ; d|c|/d d_i = -(d_j x c_hat)
                let gi = d_j.cross(&w) + s * l * d_j.cross(&c_hat);
                let gj = w.cross(&d_i) - s * l * d_i.cross(&c_hat);
                set_row3(out, r0, ori(i), gi.transpose());
                set_row3(out, r0, ori(j), gj.transpose());
            }
        }
    }

    /// Entity indices referenced by this block.
    pub fn entity_indices(&self) -> Vec<usize> {
        match self.op {
            BlockOp::Parallel { i, j }
            | BlockOp::Distance { i, j, .. }
            | BlockOp::Perpendicular { i, j }
            | BlockOp::Angle { i, j, .. }
            | BlockOp::EdgeLength { i, j, .. }
            | BlockOp::Coaxial { i, j, .. }
            | BlockOp::LineLine { i, j, .. } => vec![i, j],
            BlockOp::PlaneCylinder { plane, cyl, .. } => vec![plane, cyl],
            BlockOp::PointOnPlane { point, plane } => vec![point, plane],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_model;
    use nalgebra::Vector3;

    fn xy_planes() -> Vec<GeometricEntity> {
        vec![
            GeometricEntity::plane("F1", Vector3::zeros(), Vector3::new(0.0, 1.0, 0.0)),
            GeometricEntity::plane("F2", Vector3::new(0.0, 1.0, 0.0), Vector3::new(0.0, -1.0, 0.0)),
        ]
    }

    #[test]
    fn row_and_aux_counts_match_table() {
        use ConstraintKind::*;
        let table = [
            (PlanePlaneDistance, 4, 1),
            (PlanePlaneParallel, 3, 1),
            (PlanePlanePerpendicular, 1, 0),
            (PlanePlaneAngle, 1, 0),
            (EdgeLength, 1, 0),
            (PlaneCylinderDistance, 2, 0),
            (PlaneCylinderTangent, 2, 0),
            (CylinderCylinderCoaxial, 6, 0),
            (PointOnPlane, 1, 0),
            (LineLineDistance, 1, 0),
        ];
        for (kind, rows, aux) in table {
            assert_eq!(kind.row_count(), rows, "{kind}");
            assert_eq!(kind.aux_count(), aux, "{kind}");
        }
    }

    #[test]
    fn parallel_antiparallel_witness() {
        // Anti-parallel unit normals force t = -n1.n2 = 1 and a zero residual.
        let model = build_model(
            xy_planes(),
            vec![Constraint::new(
                "C1",
                ConstraintKind::PlanePlaneParallel,
                ["F1", "F2"],
                None,
            )],
            1e-7,
        )
        .unwrap();
        let block = &model.blocks()[0];
        assert_eq!(block.rows, 3);
        assert_eq!(block.aux, 1);
        let aux = block.aux_init(&model.geometry());
        assert_eq!(aux, vec![1.0]);
        let r = block.residuals(&model.geometry(), &aux);
        assert!(r.amax() < 1e-15);
    }

    #[test]
    fn distance_example_exact_root() {
        let entities = vec![
            GeometricEntity::plane("F1", Vector3::zeros(), Vector3::new(1.0, 0.0, 0.0)),
            GeometricEntity::plane("F3", Vector3::new(1.0, 0.0, 0.0), Vector3::new(1.0, 0.0, 0.0)),
        ];
        let model = build_model(
            entities,
            vec![Constraint::new(
                "C1",
                ConstraintKind::PlanePlaneDistance,
                ["F1", "F3"],
                Some(1.0),
            )],
            1e-7,
        )
        .unwrap();
        let block = &model.blocks()[0];
        assert_eq!(block.rows, 4);
        let aux = block.aux_init(&model.geometry());
        assert_eq!(aux, vec![-1.0]);
        let r = block.residuals(&model.geometry(), &aux);
        assert!(r.amax() < 1e-15);
    }

    #[test]
    fn coaxial_block_shape() {
        let entities = vec![
            GeometricEntity::cylinder("F19", Vector3::zeros(), Vector3::new(0.0, 0.0, 1.0), 8.0),
            GeometricEntity::cylinder(
                "F21",
                Vector3::new(0.0, 0.0, 5.0),
                Vector3::new(0.0, 0.0, 1.0),
                5.0,
            ),
        ];
        let model = build_model(
            entities,
            vec![Constraint::new(
                "C17",
                ConstraintKind::CylinderCylinderCoaxial,
                ["F19", "F21"],
                None,
            )],
            1e-7,
        )
        .unwrap();
        let block = &model.blocks()[0];
        assert_eq!((block.rows, block.aux), (6, 0));
        let r = block.residuals(&model.geometry(), &[]);
        assert!(r.amax() < 1e-15);
    }

    #[test]
    fn angle_value_must_be_in_open_interval() {
        let err = build_model(
            xy_planes(),
            vec![Constraint::new(
                "C1",
                ConstraintKind::PlanePlaneAngle,
                ["F1", "F2"],
                Some(0.0),
            )],
            1e-7,
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::AngleOutOfRange { .. }));
    }

    #[test]
    fn zero_length_edge_rejected() {
        let entities = vec![
            GeometricEntity::point("V1", Vector3::zeros()),
            GeometricEntity::point("V2", Vector3::zeros()),
        ];
        let err = build_model(
            entities,
            vec![Constraint::new(
                "C1",
                ConstraintKind::EdgeLength,
                ["V1", "V2"],
                Some(1.0),
            )],
            1e-7,
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::DegenerateEdge { .. }));
    }

    #[test]
    fn signature_mismatch_reported() {
        let entities = vec![
            GeometricEntity::plane("F1", Vector3::zeros(), Vector3::new(0.0, 0.0, 1.0)),
            GeometricEntity::point("V1", Vector3::zeros()),
        ];
        let err = build_model(
            entities,
            vec![Constraint::new(
                "C1",
                ConstraintKind::PlanePlaneDistance,
                ["F1", "V1"],
                Some(1.0),
            )],
            1e-7,
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::SignatureMismatch { .. }));
    }

    #[test]
    fn plane_cylinder_accepts_either_order() {
        let entities = vec![
            GeometricEntity::plane("F1", Vector3::zeros(), Vector3::new(0.0, 0.0, 1.0)),
            GeometricEntity::cylinder(
                "F19",
                Vector3::new(0.0, 0.0, 3.0),
                Vector3::new(1.0, 0.0, 0.0),
                3.0,
            ),
        ];
        let model = build_model(
            entities,
            vec![
                Constraint::new(
                    "Ca",
                    ConstraintKind::PlaneCylinderTangent,
                    ["F19", "F1"],
                    None,
                ),
                Constraint::new(
                    "Cb",
                    ConstraintKind::PlaneCylinderDistance,
                    ["F1", "F19"],
                    Some(3.0),
                ),
            ],
            1e-7,
        )
        .unwrap();
        let w = model.validate_witness();
        assert!(w.valid, "max residual {}", w.max_residual);
    }
}
