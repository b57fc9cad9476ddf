//! Total variation decompositions on finite random walk spaces.
//!
//! A finite random walk space is a state set with a row-stochastic jump
//! matrix and a reversible measure. On top of it this crate evaluates
//! nonlocal perimeters and total variation, minimizes the geometric energy
//! `P(A) + λ ν(A △ F)` exactly by s-t minimum cut, and builds the L² (ROF)
//! and L¹ decompositions, their optimality certificates, the thresholding
//! parameters of indicator data and implicit gradient flows.
//!
//! All solvers are generic over [`Scalar`]; use [`Rational`] for exact
//! arithmetic on spaces with rational weights.

pub mod certificate;
pub mod decompose_l1;
pub mod decompose_l2;
pub mod error;
pub mod geometry;
pub mod io;
pub mod levelset;
pub mod maxflow;
pub mod mincut;
pub mod repro;
pub mod scalar;
pub mod space;
pub mod thresholds;
pub mod tvflow;

pub use error::{Error, Result};
pub use geometry::{EdgeField, NodeFunction, NodeSet};
pub use mincut::Select;
pub use scalar::{rat, Rational, Scalar};
pub use space::{EdgeWeightGraph, RandomWalkSpace, ValidationReport};
