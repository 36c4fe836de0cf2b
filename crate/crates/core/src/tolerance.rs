//! Numerical thresholds shared across the crate.

/// Validity gates: PSD, Hermiticity, unit trace, normalization.
pub const PSD_GATE: f64 = 1e-9;

/// Round-trip assertions (embedding, reconstruction, orthonormality).
pub const ROUND_TRIP: f64 = 1e-10;

/// Eigenvalues at or below this are treated as zero weight.
pub const SPECTRAL_CUTOFF: f64 = 1e-12;

/// Post-selection probabilities below this are rejected.
pub const MIN_POSTSELECTION: f64 = 1e-14;

/// Duality identity and inequality checks.
pub const DUALITY: f64 = 1e-9;

/// Kraus completeness.
pub const COMPLETENESS: f64 = 1e-10;
