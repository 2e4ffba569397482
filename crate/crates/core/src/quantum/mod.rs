//! Operators, states, measurements and assemblages.

pub mod assemblage;
pub mod hermitian;
pub mod io;
pub mod measurement;
pub mod validate;

pub use assemblage::{assemblage_from_measurements, assemblage_from_state, Assemblage, BipartiteState};
pub use hermitian::{basis_element, depolarize, HermitianOperator, C64};
pub use measurement::MeasurementSet;
pub use validate::{ValidationReport, DEFAULT_TOL};
