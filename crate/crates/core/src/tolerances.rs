//! Numerical tolerances shared across the crate.
//!
//! All values are absolute. Density matrices have unit trace, which fixes
//! the scale of every quantity compared against these constants.

/// Maximum `|Σ|a|² − 1|` accepted when constructing a pure state.
pub const PURE_NORM: f64 = 1e-9;

/// Maximum entrywise `|M − M†|` for a valid density matrix.
pub const HERMITICITY: f64 = 1e-10;

/// Maximum `|tr M − 1|` for a valid density matrix.
pub const TRACE: f64 = 1e-12;

/// Smallest eigenvalue accepted for a valid density matrix.
pub const MIN_EIGENVALUE: f64 = -1e-10;

/// Eigenvalues above this count towards the numeric rank.
pub const RANK: f64 = 1e-10;

/// Maximum `‖U†U − 1‖` (entrywise) for a local unitary.
pub const UNITARITY: f64 = 1e-10;

/// Default slack tolerance of criterion verdicts.
pub const CRITERION: f64 = 1e-9;

/// Resolution of threshold bisection along a noise curve.
pub const BISECTION: f64 = 1e-10;
