//! povmkit: informationally complete quantum measurements at desk scale.
//!
//! The crate builds, verifies, and exercises POVMs whose outcome statistics
//! determine quantum states: complex projective t-design checks and
//! searches, POVM superoperator analysis, canonical and closed-form state
//! reconstruction, Monte Carlo linear tomography, and measurement-based
//! cloning fidelity.
//!
//! Modules, bottom up:
//!
//! * [`linops`] — operators, operator kets, superoperators, symmetric
//!   projectors, Hermitian spectral routines.
//! * [`designs`] — weighted t-design verification and numerical 2-design
//!   search.
//! * [`constructions`] — SIC-POVMs, complete MUB sets for prime dimension,
//!   and control POVMs.
//! * [`povm`] — POVM data model, trace-measure decomposition, tightness
//!   certification, dual frames, reconstruction.
//! * [`tomo`] — Monte Carlo linear state tomography.
//! * [`cloning`] — measurement-based cloning fidelity analysis.
//! * [`io`] — JSON file formats for designs, POVMs, and states.
//!
//! ```
//! use povmkit::constructions::sic_povm;
//! use povmkit::povm::tightness_check;
//!
//! let povm = sic_povm(2).unwrap();
//! let report = tightness_check(&povm, 1e-9);
//! assert!(report.is_rank_one_tight);
//! assert!((report.trace_inverse.unwrap() - 10.0).abs() < 1e-9);
//! ```

pub mod cloning;
pub mod constructions;
pub mod designs;
pub mod error;
pub mod io;
pub mod linops;
pub mod povm;
pub mod tol;
pub mod tomo;

pub use designs::WeightedDesign;
pub use error::{Error, Result};
pub use linops::{Operator, OperatorKet, SuperOp};
pub use povm::DiscretePOVM;
