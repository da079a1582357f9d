//! Invariant metrics of complex analysis on model domains.
//!
//! Closed-form hyperbolic, pseudo-hyperbolic and Kobayashi quantities on the
//! disk, half-plane, strips, punctured disk, unit ball, polydisk and products
//! of planar domains; holomorphic maps with exact Jacobians; and a verifier
//! that sweeps Schwarz-type inequalities over seeded map families and checks
//! the closed forms against a path-minimization oracle.

pub mod ball;
pub mod error;
pub mod geometry;
pub mod maps;
pub mod planar;
pub mod product;
pub mod space;
pub mod tolerances;
pub mod verifier;

pub use ball::{BallPoint, FinslerValue, MobiusBall};
pub use error::{Error, Result};
pub use geometry::{hermitian_inner, operator_norm, CMatrix, ComplexVector, TangentVector, C64};
pub use maps::{Expr, HarmonicMap, HoloMap};
pub use planar::{DensityValue, Normalization, PlanarDomain};
pub use product::{ProductDomain, ProductNormalization};
pub use space::Space;
