//! Polytope-based linear programs that bound the depolarizing robustness of
//! measurement incompatibility and steering, with an exact conic oracle for
//! small instances.

// Pulls in the statically linked OpenBLAS used by the PSD cones.
#[cfg(all(feature = "sdp", not(target_arch = "wasm32")))]
extern crate openblas_src;

pub mod error;
pub mod lp;
pub mod measurements;
pub mod polytope;
pub mod quantum;
pub mod random;
pub mod sdp;

pub use error::{Error, Result};

/// Crate version embedded in output files.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
