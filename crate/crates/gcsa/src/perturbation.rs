//! Screw-motion perturbation machinery: the parametric-to-geometric
//! transform `T`, the geometric perturbation matrix `G = J T`, the
//! rigid-body and geometry-invariant motion basis `B`, and a
//! finite-difference oracle for `G`.
//!
//! Screw coordinates describe an infinitesimal motion of one entity as
//! `(dt, dr)` about the origin frame: `dp = dt + dr x p`, `dn = dr x n`.
//! Per entity this is the 6x6 block `[[I, -P], [0, -N]]` with `P = skew(p)`,
//! `N = skew(n)`; blocks assemble diagonally in entity order and aux columns
//! pass through as identity.

use crate::entity::{EntityKind, GeometricEntity};
use crate::model::{parametric_jacobian, GeometryState, VariationalModel};
use nalgebra::{DMatrix, DVector, Matrix3, Matrix6, Rotation3, Unit, Vector3, Vector6};
use std::fmt;

fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// How a perturbation matrix was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    FiniteDifference,
}

/// The matrix `G` relating per-entity screw motions (plus aux passthrough)
/// to first-order constraint responses.
#[derive(Clone, Debug)]
pub struct GeometricPerturbationMatrix {
    pub matrix: DMatrix<f64>,
    pub provenance: Provenance,
}

/// The 6x6 parametric-to-geometric block for one entity: `[[I, -P], [0, -N]]`
/// with `N = 0` for entities without orientation.
pub fn entity_transform_block(entity: &GeometricEntity) -> Matrix6<f64> {
    let mut t = Matrix6::zeros();
    t.fixed_view_mut::<3, 3>(0, 0).copy_from(&Matrix3::identity());
    t.fixed_view_mut::<3, 3>(0, 3).copy_from(&(-skew(&entity.position)));
    if let Some(n) = entity.orientation {
        t.fixed_view_mut::<3, 3>(3, 3).copy_from(&(-skew(&n)));
    }
    t
}

/// The block-diagonal transform over all entities, identity on aux columns.
pub fn assemble_transform(model: &VariationalModel) -> DMatrix<f64> {
    let layout = model.layout();
    let w = layout.width();
    let mut t = DMatrix::zeros(w, w);
    for (i, e) in model.entities().iter().enumerate() {
        let base = layout.screw_base(i);
        t.view_mut((base, base), (6, 6))
            .copy_from(&entity_transform_block(e));
    }
    let aux_base = layout.aux_base();
    for k in 0..layout.aux_count {
        t[(aux_base + k, aux_base + k)] = 1.0;
    }
    t
}

/// `G = J T` with aux passthrough; aux columns of `G` equal those of `J`
/// exactly.
pub fn geometric_perturbation_matrix(model: &VariationalModel) -> GeometricPerturbationMatrix {
    let j = parametric_jacobian(model);
    let t = assemble_transform(model);
    GeometricPerturbationMatrix {
        matrix: j * t,
        provenance: Provenance::Analytic,
    }
}

/// Central-difference approximation of `G`.
///
/// Column `6 i + a` (a < 3) displaces entity `i` by `+-step` along axis `a`;
/// column `6 i + 3 + a` rotates it about the origin axis `a` by `+-step`
/// using the exact rotation. Aux columns are differentiated analytically.
/// `step` must lie in `[1e-7, 1e-3]`.
pub fn finite_difference_g(model: &VariationalModel, step: f64) -> GeometricPerturbationMatrix {
    assert!(
        (1e-7..=1e-3).contains(&step),
        "finite-difference step {step} outside [1e-7, 1e-3]"
    );
    let layout = model.layout();
    let rows = model.equation_count();
    let mut g = DMatrix::zeros(rows, layout.width());
    let base_geometry = model.geometry();
    let aux = model.aux_witness();

    let mut eval = |geom: &GeometryState| crate::model::eval_residuals_at(model, geom, aux);

    for i in 0..model.entities().len() {
        for a in 0..3 {
            // Translation along axis a.
            let mut plus = base_geometry.clone();
            let mut minus = base_geometry.clone();
            let mut e = Vector3::zeros();
            e[a] = step;
            plus.displace(i, &Rotation3::identity(), &e);
            minus.displace(i, &Rotation3::identity(), &(-e));
            let col = (eval(&plus) - eval(&minus)) / (2.0 * step);
            g.column_mut(layout.screw_base(i) + a).copy_from(&col);

            // Rotation about origin axis a.
            let axis = Unit::new_unchecked(Vector3::ith(a, 1.0));
            let r_plus = Rotation3::from_axis_angle(&axis, step);
            let r_minus = Rotation3::from_axis_angle(&axis, -step);
            let mut plus = base_geometry.clone();
            let mut minus = base_geometry.clone();
            plus.displace(i, &r_plus, &Vector3::zeros());
            minus.displace(i, &r_minus, &Vector3::zeros());
            let col = (eval(&plus) - eval(&minus)) / (2.0 * step);
            g.column_mut(layout.screw_base(i) + 3 + a).copy_from(&col);
        }
    }

    // Aux columns: identity passthrough, taken from the analytic rows.
    let j = crate::model::parametric_jacobian_at(model, &base_geometry, aux);
    let aux_base = layout.aux_base();
    for k in 0..layout.aux_count {
        g.column_mut(aux_base + k).copy_from(&j.column(aux_base + k));
    }

    GeometricPerturbationMatrix {
        matrix: g,
        provenance: Provenance::FiniteDifference,
    }
}

/// Label for one motion-basis column.
#[derive(Clone, Debug, PartialEq)]
pub enum MotionLabel {
    /// Rigid translation along coordinate axis 0..3.
    RigidTranslation(usize),
    /// Rigid rotation about origin coordinate axis 0..3.
    RigidRotation(usize),
    /// Geometry-invariant motion of one entity.
    Invariant { entity: String, kind: InvariantKind },
}

/// The per-kind invariant motions of Fig.-2 style: sliding translations and
/// rotations about the entity's own axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvariantKind {
    /// In-plane translation (planes carry two, lines/cylinders one along the axis).
    Translation(usize),
    /// Rotation about the entity's own axis (normal for planes).
    AxisRotation,
    /// Rotation about the center along coordinate axis 0..3 (spheres, points).
    CenterRotation(usize),
}

impl fmt::Display for MotionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const AXES: [&str; 3] = ["x", "y", "z"];
        match self {
            MotionLabel::RigidTranslation(a) => write!(f, "rigid-translation-{}", AXES[*a]),
            MotionLabel::RigidRotation(a) => write!(f, "rigid-rotation-{}", AXES[*a]),
            MotionLabel::Invariant { entity, kind } => match kind {
                InvariantKind::Translation(k) => write!(f, "{entity}:invariant-translation-{k}"),
                InvariantKind::AxisRotation => write!(f, "{entity}:invariant-axis-rotation"),
                InvariantKind::CenterRotation(a) => {
                    write!(f, "{entity}:invariant-center-rotation-{}", AXES[*a])
                }
            },
        }
    }
}

/// The matrix `B` whose columns span rigid-body and geometry-invariant
/// motions, with per-column labels. Aux rows are identically zero.
#[derive(Clone, Debug)]
pub struct MotionBasis {
    pub matrix: DMatrix<f64>,
    pub labels: Vec<MotionLabel>,
}

/// The six rigid columns: translation along axis `e` puts `e` in every
/// entity's `dt` slot; rotation about origin axis `e` puts `e` in every `dr`
/// slot.
pub fn rigid_motion_basis(model: &VariationalModel) -> DMatrix<f64> {
    let layout = model.layout();
    let mut b = DMatrix::zeros(layout.width(), 6);
    for i in 0..layout.entity_count {
        let base = layout.screw_base(i);
        for a in 0..3 {
            b[(base + a, a)] = 1.0;
            b[(base + 3 + a, 3 + a)] = 1.0;
        }
    }
    b
}

/// Deterministic orthonormal pair completing a unit normal: the coordinate
/// axis least parallel to `n` (smallest index on ties), Gram-Schmidt, then
/// the cross product.
fn plane_tangent_pair(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let mut best = 0;
    for a in 1..3 {
        if n[a].abs() < n[best].abs() {
            best = a;
        }
    }
    let e = Vector3::ith(best, 1.0);
    let u = (e - n * n.dot(&e)).normalize();
    (u, n.cross(&u))
}

/// Geometry-invariant motions of one entity as `(dt, dr)` six-vectors for
/// its own screw block.
///
/// Translational invariants are `(v, 0)`; rotational invariants about the
/// entity's own axis through its position `q` with direction `v` are the
/// screws `(q x v, v)`. Spheres and points rotate about their center along
/// the three coordinate axes.
pub fn invariant_motions(entity: &GeometricEntity) -> Vec<(Vector6<f64>, InvariantKind)> {
    let q = entity.position;
    let screw = |t: Vector3<f64>, r: Vector3<f64>| {
        let mut v = Vector6::zeros();
        v.fixed_rows_mut::<3>(0).copy_from(&t);
        v.fixed_rows_mut::<3>(3).copy_from(&r);
        v
    };
    let rotation_about = |v: Vector3<f64>| screw(q.cross(&v), v);

    match entity.kind {
        EntityKind::Plane => {
            let n = entity.orientation_unchecked();
            let (u, w) = plane_tangent_pair(&n);
            vec![
                (screw(u, Vector3::zeros()), InvariantKind::Translation(0)),
                (screw(w, Vector3::zeros()), InvariantKind::Translation(1)),
                (rotation_about(n), InvariantKind::AxisRotation),
            ]
        }
        EntityKind::Line | EntityKind::Cylinder => {
            let d = entity.orientation_unchecked();
            vec![
                (screw(d, Vector3::zeros()), InvariantKind::Translation(0)),
                (rotation_about(d), InvariantKind::AxisRotation),
            ]
        }
        EntityKind::Cone | EntityKind::Torus => {
            let d = entity.orientation_unchecked();
            vec![(rotation_about(d), InvariantKind::AxisRotation)]
        }
        EntityKind::Sphere | EntityKind::Point => (0..3)
            .map(|a| {
                (
                    rotation_about(Vector3::ith(a, 1.0)),
                    InvariantKind::CenterRotation(a),
                )
            })
            .collect(),
    }
}

/// Concatenates the six rigid columns and every entity's invariant columns.
/// Columns may be linearly dependent; rank is computed downstream.
pub fn motion_basis(model: &VariationalModel) -> MotionBasis {
    let layout = model.layout();
    let invariant_total: usize = model
        .entities()
        .iter()
        .map(|e| e.kind.invariant_motion_count())
        .sum();
    let mut b = DMatrix::zeros(layout.width(), 6 + invariant_total);
    b.view_mut((0, 0), (layout.width(), 6))
        .copy_from(&rigid_motion_basis(model));

    let mut labels: Vec<MotionLabel> = (0..3)
        .map(MotionLabel::RigidTranslation)
        .chain((0..3).map(MotionLabel::RigidRotation))
        .collect();

    let mut col = 6;
    for (i, e) in model.entities().iter().enumerate() {
        let base = layout.screw_base(i);
        for (v, kind) in invariant_motions(e) {
            b.view_mut((base, col), (6, 1)).copy_from(&v);
            labels.push(MotionLabel::Invariant {
                entity: e.id.clone(),
                kind,
            });
            col += 1;
        }
    }
    debug_assert_eq!(col, b.ncols());
    MotionBasis { matrix: b, labels }
}

/// Convenience: `|| G b || <= bound` check used by the invariant tests.
pub fn column_in_kernel(g: &DMatrix<f64>, col: &DVector<f64>, rel_tol: f64) -> bool {
    if g.nrows() == 0 {
        return true;
    }
    (g * col).norm() <= rel_tol * g.norm() * col.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{Constraint, ConstraintKind};
    use crate::model::build_model;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn transform_block_at_origin() {
        let e = GeometricEntity::plane("F1", Vector3::zeros(), Vector3::new(0.0, 0.0, 1.0));
        let t = entity_transform_block(&e);
        assert_eq!(t.fixed_view::<3, 3>(0, 0).clone_owned(), Matrix3::identity());
        assert_eq!(t.fixed_view::<3, 3>(0, 3).clone_owned(), Matrix3::zeros());
    }

    #[test]
    fn transform_block_entries_forced_by_skew() {
        let e = GeometricEntity::plane(
            "F1",
            Vector3::new(1.0, 2.0, 3.0),
            Vector3::new(0.0, 0.0, 1.0),
        );
        let t = entity_transform_block(&e);
        let p = Matrix3::new(0.0, -3.0, 2.0, 3.0, 0.0, -1.0, -2.0, 1.0, 0.0);
        let n = Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(t.fixed_view::<3, 3>(0, 3).clone_owned(), -p);
        assert_eq!(t.fixed_view::<3, 3>(3, 3).clone_owned(), -n);
    }

    #[test]
    fn transform_block_matches_cross_products() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let p = Vector3::from_fn(|_, _| rng.gen_range(-5.0..5.0));
            let n = Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0)).normalize();
            let e = GeometricEntity::plane("F", p, n);
            let t = entity_transform_block(&e);
            let dt = Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let dr = Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let mut screw = Vector6::zeros();
            screw.fixed_rows_mut::<3>(0).copy_from(&dt);
            screw.fixed_rows_mut::<3>(3).copy_from(&dr);
            let out = t * screw;
            let dp = dr.cross(&p) + dt;
            let dn = dr.cross(&n);
            assert_relative_eq!(out.fixed_rows::<3>(0).clone_owned(), dp, epsilon = 1e-14);
            assert_relative_eq!(out.fixed_rows::<3>(3).clone_owned(), dn, epsilon = 1e-14);
        }
    }

    #[test]
    fn assemble_two_entities_no_aux() {
        let model = build_model(
            vec![
                GeometricEntity::plane("F1", Vector3::zeros(), Vector3::new(0.0, 0.0, 1.0)),
                GeometricEntity::plane("F2", Vector3::zeros(), Vector3::new(1.0, 0.0, 0.0)),
            ],
            vec![],
            1e-7,
        )
        .unwrap();
        let t = assemble_transform(&model);
        assert_eq!(t.shape(), (12, 12));
    }

    #[test]
    fn rigid_basis_layout() {
        let model = build_model(
            vec![
                GeometricEntity::plane("F1", Vector3::zeros(), Vector3::new(0.0, 0.0, 1.0)),
                GeometricEntity::plane("F2", Vector3::zeros(), Vector3::new(1.0, 0.0, 0.0)),
            ],
            vec![],
            1e-7,
        )
        .unwrap();
        let b = rigid_motion_basis(&model);
        // x-translation across both entities.
        let tx: Vec<f64> = b.column(0).iter().copied().collect();
        assert_eq!(tx, vec![1., 0., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0.]);
        // x-rotation across both entities.
        let rx: Vec<f64> = b.column(3).iter().copied().collect();
        assert_eq!(rx, vec![0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0.]);
    }

    #[test]
    fn plane_invariants_example() {
        let e = GeometricEntity::plane(
            "F1",
            Vector3::new(0.0, 0.0, 5.0),
            Vector3::new(0.0, 0.0, 1.0),
        );
        let motions = invariant_motions(&e);
        assert_eq!(motions.len(), 3);
        // Rotation about the normal through (0,0,5): q x n vanishes.
        let (rot, kind) = &motions[2];
        assert_eq!(*kind, InvariantKind::AxisRotation);
        let expected = Vector6::from_column_slice(&[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(rot, &expected);
    }

    #[test]
    fn cone_invariant_example() {
        let e = GeometricEntity::cone(
            "K1",
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 0.0, 1.0),
            0.3,
        );
        let motions = invariant_motions(&e);
        assert_eq!(motions.len(), 1);
        let expected = Vector6::from_column_slice(&[0.0, -1.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(motions[0].0, expected);
    }

    #[test]
    fn perpendicular_jacobian_row_structure() {
        let model = build_model(
            vec![
                GeometricEntity::plane("F1", Vector3::zeros(), Vector3::new(1.0, 0.0, 0.0)),
                GeometricEntity::plane("F2", Vector3::zeros(), Vector3::new(0.0, 0.0, 1.0)),
            ],
            vec![Constraint::new(
                "C1",
                ConstraintKind::PlanePlanePerpendicular,
                ["F1", "F2"],
                None,
            )],
            1e-7,
        )
        .unwrap();
        let j = parametric_jacobian(&model);
        assert_eq!(j.shape(), (1, 12));
        let row: Vec<f64> = j.row(0).iter().copied().collect();
        // zeros on dp blocks, n2 on dn1, n1 on dn2
        assert_eq!(row, vec![0., 0., 0., 0., 0., 1., 0., 0., 0., 1., 0., 0.]);
    }

    #[test]
    fn fd_zero_step_sanity() {
        // Residuals at +-0 perturbation are identical: the FD columns of an
        // unconstrained model are all zero rows.
        let model = build_model(
            vec![GeometricEntity::plane(
                "F1",
                Vector3::zeros(),
                Vector3::new(0.0, 0.0, 1.0),
            )],
            vec![],
            1e-7,
        )
        .unwrap();
        let g = finite_difference_g(&model, 1e-5);
        assert_eq!(g.matrix.shape(), (0, 6));
        assert_eq!(g.provenance, Provenance::FiniteDifference);
    }

    #[test]
    fn fd_matches_analytic_on_perpendicular_toy() {
        let model = build_model(
            vec![
                GeometricEntity::plane("F1", Vector3::new(1.0, 2.0, 0.5), Vector3::new(1.0, 0.0, 0.0)),
                GeometricEntity::plane("F2", Vector3::new(-2.0, 0.0, 4.0), Vector3::new(0.0, 0.0, 1.0)),
            ],
            vec![Constraint::new(
                "C1",
                ConstraintKind::PlanePlanePerpendicular,
                ["F1", "F2"],
                None,
            )],
            1e-7,
        )
        .unwrap();
        let analytic = geometric_perturbation_matrix(&model).matrix;
        let fd = finite_difference_g(&model, 1e-5).matrix;
        assert!((&analytic - &fd).norm() <= 1e-8 * analytic.norm().max(1.0));
    }

    #[test]
    fn unconstrained_plane_g_has_zero_rows() {
        let model = build_model(
            vec![GeometricEntity::plane(
                "F1",
                Vector3::zeros(),
                Vector3::new(0.0, 0.0, 1.0),
            )],
            vec![],
            1e-7,
        )
        .unwrap();
        let g = geometric_perturbation_matrix(&model);
        assert_eq!(g.matrix.nrows(), 0);
        assert_eq!(g.matrix.ncols(), 6);
    }
}
