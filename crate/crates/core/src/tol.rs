//! Centralized numerical tolerances.

/// Exactness checks on amplitudes, norms and Hermiticity.
pub const EXACT: f64 = 1e-12;
/// Hermiticity of freshly built Hamiltonians.
pub const HERMITIAN_BUILD: f64 = 1e-14;
/// Post-selected purity and fidelity checks.
pub const PURITY: f64 = 1e-9;
/// Analytic-versus-bath backend agreement.
pub const BACKEND: f64 = 1e-10;
/// Equality of environment operator products.
pub const ENV_PRODUCT: f64 = 1e-10;
/// Amplitudes below this are treated as absent when checking domains.
pub const NEGLIGIBLE: f64 = 1e-12;
/// Default cap on the total Hilbert-space dimension.
pub const DIMENSION_CAP: usize = 65_536;
/// Branch-enumeration cap.
pub const BRANCH_CAP: usize = 1_000_000;
