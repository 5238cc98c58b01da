//! Default tolerances and size caps used across the crate.
//!
//! Every default here can be overridden by the caller through the explicit
//! tolerance arguments of the public operations; these constants exist so
//! that the defaults are named, documented, and used consistently.

/// Relative spectral threshold: an eigenvalue is treated as zero when it is
/// below this fraction of the largest eigenvalue magnitude.
pub const SPECTRAL_REL: f64 = 1e-10;

/// Hermiticity gate for spectral routines, relative to max(1, ‖S‖).
/// All superoperators built by this crate are Hermitian by construction,
/// so any asymmetry beyond roundoff indicates a caller bug.
pub const HERMITICITY_REL: f64 = 1e-9;

/// POVM element positivity floor: smallest acceptable eigenvalue.
pub const PSD_FLOOR: f64 = -1e-10;

/// Residual allowed on Σ F(x) − I for a valid POVM.
pub const POVM_SUM: f64 = 1e-10;

/// Unit-norm and weight-normalization tolerance for design points.
pub const DESIGN_NORM: f64 = 1e-12;

/// Frame-potential gap below which a configuration is certified a t-design.
pub const DESIGN_CERT: f64 = 1e-8;

/// Looser reporting threshold for "near-design" diagnostics.
pub const DESIGN_NEAR: f64 = 1e-6;

/// Absolute Frobenius residual for tightness checks (superoperator entries
/// are O(1) at the dimensions this crate targets).
pub const TIGHTNESS_ABS: f64 = 1e-9;

/// Residual allowed on Σ τ(x)|Q(x))(P(x)| − 𝐈 when verifying a dual frame.
pub const DUAL_FRAME: f64 = 1e-9;

/// Probabilities more negative than this are an error; milder negativity is
/// clamped to zero as roundoff.
pub const PROB_FLOOR: f64 = -1e-14;

/// Largest tensor-space dimension d^t accepted by the symmetric projector.
pub const SYM_TENSOR_DIM_LIMIT: usize = 4096;

/// Largest tensor power accepted by the symmetric projector.
pub const SYM_MAX_T: usize = 4;
