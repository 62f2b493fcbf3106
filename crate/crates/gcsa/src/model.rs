//! The variational model: entities, constraints referencing them, tolerance
//! configuration and the witness-validity check.
//!
//! The model is immutable once built. Building validates ids, references,
//! orientations and size parameters, translates every constraint into its
//! equation block (freezing branch signs from the stored geometry), and
//! assigns the canonical coordinate layout: per entity six consecutive screw
//! columns (three translations in mm, three rotations in radians) in entity
//! order, then one column per auxiliary scalar in constraint order.

use crate::constraint::{translate_constraint, Constraint, EquationBlock};
use crate::entity::GeometricEntity;
use crate::error::ModelError;
use nalgebra::{DMatrix, DVector, Rotation3, Vector3};
use std::collections::HashMap;

/// Orientation vectors must be unit within this bound after normalization.
pub const ORIENTATION_NORM_TOL: f64 = 1e-12;
/// Orientations further than this from unit length are rejected outright.
pub const ORIENTATION_REJECT_TOL: f64 = 1e-9;
/// Witness residual threshold factor, stricter than the nullity tolerance so
/// residual noise never masquerades as rank noise.
pub const WITNESS_TOL: f64 = 1e-9;
/// Default nullity tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-7;

/// Maps entities and aux scalars to matrix columns.
///
/// Total width is `6 m + aux`; the mapping is a bijection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoordinateLayout {
    pub entity_count: usize,
    pub aux_count: usize,
}

impl CoordinateLayout {
    /// Total column count: `6 m + aux`.
    pub fn width(&self) -> usize {
        6 * self.entity_count + self.aux_count
    }

    /// First column of entity `i`'s screw block.
    pub fn screw_base(&self, i: usize) -> usize {
        6 * i
    }

    /// First aux column.
    pub fn aux_base(&self) -> usize {
        6 * self.entity_count
    }
}

/// Snapshot of entity positions and orientations, detached from the model so
/// perturbation code can mutate a copy.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometryState {
    pub positions: Vec<Vector3<f64>>,
    pub orientations: Vec<Option<Vector3<f64>>>,
}

impl GeometryState {
    pub fn position(&self, i: usize) -> Vector3<f64> {
        self.positions[i]
    }

    pub fn orientation(&self, i: usize) -> Vector3<f64> {
        self.orientations[i].expect("entity has an orientation")
    }

    /// Rotates entity `i` about the origin axis by `angle` and translates it,
    /// matching the exact rigid-motion semantics of the screw coordinates.
    pub fn displace(&mut self, i: usize, rotation: &Rotation3<f64>, translation: &Vector3<f64>) {
        self.positions[i] = rotation * self.positions[i] + translation;
        if let Some(n) = self.orientations[i] {
            self.orientations[i] = Some(rotation * n);
        }
    }
}

/// Per-constraint witness residual magnitudes plus the overall verdict.
#[derive(Clone, Debug)]
pub struct WitnessReport {
    pub valid: bool,
    pub max_residual: f64,
    pub threshold: f64,
    /// Max |residual| per constraint, in constraint order.
    pub per_constraint: Vec<(String, f64)>,
}

/// A validated, immutable variational model.
#[derive(Clone, Debug)]
pub struct VariationalModel {
    entities: Vec<GeometricEntity>,
    constraints: Vec<Constraint>,
    tolerance: f64,
    layout: CoordinateLayout,
    blocks: Vec<EquationBlock>,
    aux_witness: Vec<f64>,
    index: HashMap<String, usize>,
}

/// Builds and validates a model: unique ids, resolvable references, unit
/// orientations (re-normalized when within 1e-9 of unit), strictly positive
/// size parameters, and translatable constraints.
pub fn build_model(
    entities: Vec<GeometricEntity>,
    constraints: Vec<Constraint>,
    tolerance: f64,
) -> Result<VariationalModel, ModelError> {
    if entities.is_empty() {
        return Err(ModelError::EmptyModel);
    }
    if !(tolerance > 0.0) {
        return Err(ModelError::NonPositiveTolerance(tolerance));
    }

    let mut entities = entities;
    let mut index = HashMap::new();
    for (i, e) in entities.iter_mut().enumerate() {
        if index.insert(e.id.clone(), i).is_some() {
            return Err(ModelError::DuplicateEntityId(e.id.clone()));
        }
        if e.kind.has_orientation() {
            let n = e.orientation.ok_or_else(|| ModelError::MissingOrientation {
                id: e.id.clone(),
                kind: e.kind.name().to_string(),
            })?;
            let norm = n.norm();
            if (norm - 1.0).abs() > ORIENTATION_REJECT_TOL {
                return Err(ModelError::NonUnitOrientation {
                    id: e.id.clone(),
                    norm,
                });
            }
            e.orientation = Some(n / norm);
        } else if e.orientation.is_some() {
            return Err(ModelError::UnexpectedOrientation {
                id: e.id.clone(),
                kind: e.kind.name().to_string(),
            });
        }
        if e.size_params.len() != e.kind.size_param_count() {
            return Err(ModelError::SizeParamCount {
                id: e.id.clone(),
                kind: e.kind.name().to_string(),
                expected: e.kind.size_param_count(),
                got: e.size_params.len(),
            });
        }
        for &s in &e.size_params {
            if !(s > 0.0) {
                return Err(ModelError::NonPositiveSizeParam {
                    id: e.id.clone(),
                    value: s,
                });
            }
        }
    }

    let mut seen_constraints = HashMap::new();
    let mut blocks = Vec::with_capacity(constraints.len());
    let mut row_offset = 0;
    let mut aux_offset = 0;
    for (ci, c) in constraints.iter().enumerate() {
        if seen_constraints.insert(c.id.clone(), ci).is_some() {
            return Err(ModelError::DuplicateConstraintId(c.id.clone()));
        }
        let mut block = translate_constraint(c, &entities, &index)?;
        block.constraint_index = ci;
        block.row_offset = row_offset;
        block.aux_offset = aux_offset;
        row_offset += block.rows;
        aux_offset += block.aux;
        blocks.push(block);
    }

    let layout = CoordinateLayout {
        entity_count: entities.len(),
        aux_count: aux_offset,
    };

    let geometry = GeometryState {
        positions: entities.iter().map(|e| e.position).collect(),
        orientations: entities.iter().map(|e| e.orientation).collect(),
    };
    let mut aux_witness = vec![0.0; aux_offset];
    for block in &blocks {
        let init = block.aux_init(&geometry);
        aux_witness[block.aux_offset..block.aux_offset + block.aux].copy_from_slice(&init);
    }

    Ok(VariationalModel {
        entities,
        constraints,
        tolerance,
        layout,
        blocks,
        aux_witness,
        index,
    })
}

impl VariationalModel {
    pub fn entities(&self) -> &[GeometricEntity] {
        &self.entities
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn layout(&self) -> CoordinateLayout {
        self.layout
    }

    pub fn blocks(&self) -> &[EquationBlock] {
        &self.blocks
    }

    pub fn aux_witness(&self) -> &[f64] {
        &self.aux_witness
    }

    pub fn entity_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Total residual row count.
    pub fn equation_count(&self) -> usize {
        self.blocks.iter().map(|b| b.rows).sum()
    }

    /// The stored geometry as a detached state.
    pub fn geometry(&self) -> GeometryState {
        GeometryState {
            positions: self.entities.iter().map(|e| e.position).collect(),
            orientations: self.entities.iter().map(|e| e.orientation).collect(),
        }
    }

    /// Maps an equation row index to the owning constraint index.
    pub fn constraint_of_row(&self, row: usize) -> usize {
        for b in &self.blocks {
            if row >= b.row_offset && row < b.row_offset + b.rows {
                return b.constraint_index;
            }
        }
        unreachable!("row {row} out of range");
    }

    /// Evaluates `F(X)` at the stored geometry and flags the witness invalid
    /// when the largest residual exceeds `1e-9 * max(1, value scale)`.
    pub fn validate_witness(&self) -> WitnessReport {
        let g = self.geometry();
        let mut max = 0.0f64;
        let mut per = Vec::with_capacity(self.blocks.len());
        for block in &self.blocks {
            let aux = &self.aux_witness[block.aux_offset..block.aux_offset + block.aux];
            let r = block.residuals(&g, aux);
            let m = if r.is_empty() { 0.0 } else { r.amax() };
            per.push((block.constraint_id.clone(), m));
            max = max.max(m);
        }
        let scale = self
            .constraints
            .iter()
            .filter_map(|c| c.value)
            .fold(1.0f64, |acc, v| acc.max(v.abs()));
        let threshold = WITNESS_TOL * scale;
        WitnessReport {
            valid: max <= threshold,
            max_residual: max,
            threshold,
            per_constraint: per,
        }
    }

    /// Rebuilds the model with one rigid transformation applied to every
    /// entity. Constraint values and tolerance are unchanged.
    pub fn transformed(
        &self,
        rotation: &Rotation3<f64>,
        translation: &Vector3<f64>,
    ) -> Result<VariationalModel, ModelError> {
        let entities = self
            .entities
            .iter()
            .map(|e| {
                let mut e = e.clone();
                e.position = rotation * e.position + translation;
                e.orientation = e.orientation.map(|n| rotation * n);
                e
            })
            .collect();
        build_model(entities, self.constraints.clone(), self.tolerance)
    }

    /// Rebuilds the model with entities listed in the given order.
    pub fn with_entity_order(&self, order: &[usize]) -> Result<VariationalModel, ModelError> {
        assert_eq!(order.len(), self.entities.len());
        let entities = order.iter().map(|&i| self.entities[i].clone()).collect();
        build_model(entities, self.constraints.clone(), self.tolerance)
    }
}

/// Concatenation of all blocks' residuals in constraint order, evaluated at
/// the stored witness.
pub fn eval_residuals(model: &VariationalModel) -> DVector<f64> {
    eval_residuals_at(model, &model.geometry(), model.aux_witness())
}

/// Residual vector at an arbitrary geometry state and aux assignment.
pub fn eval_residuals_at(
    model: &VariationalModel,
    g: &GeometryState,
    aux_all: &[f64],
) -> DVector<f64> {
    let mut out = DVector::zeros(model.equation_count());
    for block in model.blocks() {
        let aux = &aux_all[block.aux_offset..block.aux_offset + block.aux];
        out.rows_mut(block.row_offset, block.rows)
            .copy_from(&block.residuals(g, aux));
    }
    out
}

/// The parametric Jacobian `J`: rows are equations, columns are per-entity
/// `(dp, dn)` blocks stacked six wide in entity order, then aux columns.
///
/// Entity blocks without orientation (points, spheres) have zero `dn`
/// sub-columns in every row.
pub fn parametric_jacobian(model: &VariationalModel) -> DMatrix<f64> {
    parametric_jacobian_at(model, &model.geometry(), model.aux_witness())
}

/// `J` at an arbitrary geometry state and aux assignment.
pub fn parametric_jacobian_at(
    model: &VariationalModel,
    g: &GeometryState,
    aux_all: &[f64],
) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(model.equation_count(), model.layout().width());
    let aux_base = model.layout().aux_base();
    for block in model.blocks() {
        let aux = &aux_all[block.aux_offset..block.aux_offset + block.aux];
        block.jacobian_into(g, aux, aux_base, &mut out);
    }
    out
}
