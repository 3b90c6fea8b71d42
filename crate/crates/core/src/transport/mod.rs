//! Transports between equidimensional vector bundles over a polynomial
//! chart, the derivatives built from them, and the first and second
//! generalized curvatures of a composed pair of derivatives.
//!
//! Multi-point quantities live in one polynomial ring with a block of
//! `n` variables per point. Two-point objects use the blocks `(y, x)`,
//! three-point ones `(z, y, x)`; the last block is always the point the
//! section is evaluated at.

mod curvature;
mod family;
mod identities;
mod ops;
mod scenario;

pub use curvature::{direct_diagonal_composition, DiagonalCalculus, GenCurvatureComponents};
pub use family::{BundleSection, FormalGamma, FrameFamily, TransportCoeffs};
pub use identities::{verify_transport_identity, TransportIdentity};
pub use ops::{
    check_consistency, compose_two_point, consistent_gamma_from_diagonal, gen_cov_deriv,
    transport_deriv, transport_section, Layout,
};
pub use scenario::{GammaKind, TransportParams, TransportScenario};

use thiserror::Error;

use crate::exactmath::MathError;
use crate::geometry::GeometryError;

/// Vector fields on the base are the same objects the geometry module uses.
pub type VectorFieldOnBase = crate::geometry::PolyVectorField;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("unknown bundle label `{0}`")]
    UnknownLabel(String),
    #[error("bundle label mismatch: expected `{expected}`, found `{found}`")]
    LabelMismatch { expected: String, found: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("frame for `{0}` is not unipotent triangular")]
    NotUnipotent(String),
    #[error("unknown transport identity `{0}`")]
    UnknownIdentity(String),
    #[error("scenario: {0}")]
    Scenario(String),
    #[error(transparent)]
    Math(#[from] MathError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
