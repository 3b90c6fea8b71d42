//! Affine connections on a single polynomial chart: covariant derivative,
//! Lie bracket, curvature and torsion, their covariant derivatives by the
//! Leibniz rule, and the cyclic identities they satisfy.

mod connection;
mod field;
mod identities;

pub use connection::{lie_bracket, Calculus, Connection};
pub use field::{EndomorphismField, PolyVectorField};
pub use identities::{
    evaluate_identity, verify_geometry_identity, FieldSet, FieldSpec, GeometryIdentity,
    GeometryScenario, FIELD_NAMES,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("index {0}")]
    Index(String),
    #[error("unknown geometry identity `{0}`")]
    UnknownIdentity(String),
    #[error("field `{0}` is not defined")]
    MissingField(String),
    #[error("identity {0} requires a torsion-free connection")]
    NeedsTorsionFree(String),
}
