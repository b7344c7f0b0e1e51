//! Tolerance ladder shared by validation, identities and certification.

/// Structural validation of states and operations (norm, trace, Hermiticity, PSD).
pub const STRUCTURE: f64 = 1e-9;
/// Exact algebraic identities evaluated in floating point.
pub const IDENTITY: f64 = 1e-10;
/// Round trips (Pauli expansion, partial trace with every site kept).
pub const ROUND_TRIP: f64 = 1e-12;
/// Largest imaginary residue tolerated on a quantity that must be real.
pub const IMAGINARY_RESIDUE: f64 = 1e-10;
/// Local unitary invariance residual.
pub const SU2_INVARIANCE: f64 = 1e-9;
/// Local `SL(2,C)` invariance residual (condition-amplified).
pub const SL2C_INVARIANCE: f64 = 1e-8;
/// Tangle reconstruction versus the concurrence oracle, and `4·I6 = τ_abc²`.
pub const TANGLE: f64 = 1e-8;
/// Transpose (directional) property of link matrices.
pub const TRANSPOSE: f64 = 1e-12;
/// Monte Carlo agreement, in standard errors.
pub const MC_STANDARD_ERRORS: f64 = 5.0;
