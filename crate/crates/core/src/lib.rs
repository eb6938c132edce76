//! Labeled-ket algebra for two identical particles carrying several degrees of
//! freedom (DoFs), the DoF trace-out rules for distinguishable and
//! indistinguishable particles, and the two-qubit entanglement measures used to
//! check monogamy of entanglement.
//!
//! Module map:
//!
//! - [`state`]: canonical two-particle kets, exchange-symmetrized state vectors
//!   and the symmetric inner product.
//! - [`density`]: density operators, projectors, particle and DoF trace-out.
//! - [`linalg`]: small dense complex matrices and eigensolvers.
//! - [`measures`]: concurrence, negativity, entropy and monogamy checks.
//! - [`circuit`]: second-quantized hybrid beam-splitter network.
//! - [`oracle`]: seeded random instances and brute-force reference routines.
//! - [`io`]: JSON file formats for states and density operators.
//! - [`reproduce`]: end-to-end pipeline behind the `reproduce` subcommand.

pub mod circuit;
pub mod density;
pub mod error;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod oracle;
pub mod reproduce;
pub mod state;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Amplitudes with magnitude below this are dropped from sparse maps.
pub const PRUNE_TOL: f64 = 1e-14;

/// Traces and post-selection weights below this are treated as zero.
pub const DEGENERATE_TOL: f64 = 1e-12;
