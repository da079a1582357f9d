//! Tolerance ledger shared by tests, suites and the oracle.
//!
//! | Category | Value |
//! |----------|-------|
//! | exact identities (involutions, closed-form agreement) | 1e-10 / 1e-12 |
//! | inequality suites | 1e-9 |
//! | finite-difference cross-checks | 1e-6 |
//! | path oracle vs closed form | 1e-3 |

/// Identities that hold exactly in real arithmetic and lose only rounding.
pub const EXACT: f64 = 1e-12;

/// Involution and symmetry checks on compositions of a few rational maps.
pub const IDENTITY: f64 = 1e-10;

/// Default slack allowed by inequality suites.
pub const INEQUALITY: f64 = 1e-9;

/// A sample whose slack magnitude is below this is recorded as an equality witness.
pub const EQUALITY_WITNESS: f64 = 1e-8;

/// Central differences against exact derivatives.
pub const FINITE_DIFFERENCE: f64 = 1e-6;

/// Discretized path length against closed-form distances.
pub const ORACLE: f64 = 1e-3;

/// Sampled base points keep at least this distance from the boundary.
pub const SAMPLING_MARGIN: f64 = 1e-3;

/// Relative stopping tolerance for power iteration.
pub const POWER_ITERATION: f64 = 1e-10;

/// Iteration cap for power iteration.
pub const POWER_ITERATION_MAX: usize = 10_000;
