//! Numerical tolerances shared across modules.

/// Hermiticity, PSD floor and trace tolerance for density matrices.
pub const STATE_TOL: f64 = 1e-12;

/// Hermiticity of cost operators.
pub const OBSERVABLE_TOL: f64 = 1e-12;

/// `||sum v_j^* v_j - 1||_F` accepted for a Kraus family.
pub const UNITALITY_TOL: f64 = 1e-10;

/// Unitality accepted for a family recovered from a Choi matrix.
pub const RECOVERED_UNITALITY_TOL: f64 = 1e-8;

/// PSD floor and partial-trace tolerance of a Choi matrix.
pub const CHOI_TOL: f64 = 1e-10;

/// `||Phi_*(sigma) - rho||_1` accepted for a transport triple.
pub const MARGINAL_TOL: f64 = 1e-8;

/// Support condition `P A P = A` for elements passed to `phi2_apply`.
pub const SUPPORT_TOL: f64 = 1e-8;

/// Totals above `-COST_FLOOR` are clamped to zero when read as squared distances.
pub const COST_FLOOR: f64 = 1e-9;
