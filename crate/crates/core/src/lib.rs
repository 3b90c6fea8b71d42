//! Exact verification of generalized Jacobi identities and of the
//! curvature and torsion identities that follow from them.

pub mod cli;
pub mod exactmath;
pub mod free_algebra;
pub mod geometry;
pub mod index_bracket;
pub mod jacobi_verify;
pub mod rng;
pub mod transport;
pub mod verification;
