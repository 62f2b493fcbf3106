//! Geometric entities: typed surface/curve/point carriers.
//!
//! An entity is described by its kind, a position (a point on the plane, on
//! the axis, or the center), a unit orientation vector where the kind has one
//! (plane normal, axis direction), and fixed size parameters (radii, half
//! angles). Size parameters are constants of the geometry; they never enter
//! the analysis as variables.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::fmt;

/// The supported entity kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Plane,
    Line,
    Cylinder,
    Sphere,
    Cone,
    Torus,
    Point,
}

impl EntityKind {
    /// Whether this kind carries an orientation vector.
    ///
    /// Spheres and points are orientation-free; their rotational freedom is
    /// absorbed by center-rotation invariant motions.
    pub fn has_orientation(self) -> bool {
        !matches!(self, EntityKind::Sphere | EntityKind::Point)
    }

    /// Number of geometry-invariant motions contributed by one entity of
    /// this kind (see [`crate::perturbation::invariant_motions`]).
    pub fn invariant_motion_count(self) -> usize {
        match self {
            EntityKind::Plane => 3,
            EntityKind::Line | EntityKind::Cylinder => 2,
            EntityKind::Sphere | EntityKind::Point => 3,
            EntityKind::Cone | EntityKind::Torus => 1,
        }
    }

    /// Number of size parameters this kind requires.
    pub fn size_param_count(self) -> usize {
        match self {
            EntityKind::Plane | EntityKind::Line | EntityKind::Point => 0,
            EntityKind::Cylinder | EntityKind::Sphere | EntityKind::Torus | EntityKind::Cone => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EntityKind::Plane => "plane",
            EntityKind::Line => "line",
            EntityKind::Cylinder => "cylinder",
            EntityKind::Sphere => "sphere",
            EntityKind::Cone => "cone",
            EntityKind::Torus => "torus",
            EntityKind::Point => "point",
        }
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A geometric entity of the variational model.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometricEntity {
    pub id: String,
    pub kind: EntityKind,
    /// A point on the plane / on the axis / the center, in mm.
    pub position: Vector3<f64>,
    /// Unit plane normal or axis direction; `None` for spheres and points.
    pub orientation: Option<Vector3<f64>>,
    /// Fixed scalars: cylinder/sphere/torus radius, cone half-angle.
    pub size_params: Vec<f64>,
}

impl GeometricEntity {
    pub fn plane(id: impl Into<String>, position: Vector3<f64>, normal: Vector3<f64>) -> Self {
        Self {
            id: id.into(),
            kind: EntityKind::Plane,
            position,
            orientation: Some(normal),
            size_params: Vec::new(),
        }
    }

    pub fn line(id: impl Into<String>, position: Vector3<f64>, direction: Vector3<f64>) -> Self {
        Self {
            id: id.into(),
            kind: EntityKind::Line,
            position,
            orientation: Some(direction),
            size_params: Vec::new(),
        }
    }

    pub fn cylinder(
        id: impl Into<String>,
        axis_point: Vector3<f64>,
        axis_direction: Vector3<f64>,
        radius: f64,
    ) -> Self {
        Self {
            id: id.into(),
            kind: EntityKind::Cylinder,
            position: axis_point,
            orientation: Some(axis_direction),
            size_params: vec![radius],
        }
    }

    pub fn sphere(id: impl Into<String>, center: Vector3<f64>, radius: f64) -> Self {
        Self {
            id: id.into(),
            kind: EntityKind::Sphere,
            position: center,
            orientation: None,
            size_params: vec![radius],
        }
    }

    pub fn cone(
        id: impl Into<String>,
        apex: Vector3<f64>,
        axis_direction: Vector3<f64>,
        half_angle: f64,
    ) -> Self {
        Self {
            id: id.into(),
            kind: EntityKind::Cone,
            position: apex,
            orientation: Some(axis_direction),
            size_params: vec![half_angle],
        }
    }

    pub fn torus(
        id: impl Into<String>,
        center: Vector3<f64>,
        axis_direction: Vector3<f64>,
        major_radius: f64,
    ) -> Self {
        Self {
            id: id.into(),
            kind: EntityKind::Torus,
            position: center,
            orientation: Some(axis_direction),
            size_params: vec![major_radius],
        }
    }

    pub fn point(id: impl Into<String>, position: Vector3<f64>) -> Self {
        Self {
            id: id.into(),
            kind: EntityKind::Point,
            position,
            orientation: None,
            size_params: Vec::new(),
        }
    }

    /// The orientation vector, panicking for kinds that have none.
    ///
    /// Only called after model validation has established that the entity
    /// kind carries an orientation.
    pub(crate) fn orientation_unchecked(&self) -> Vector3<f64> {
        self.orientation
            .expect("entity kind carries an orientation")
    }
}
