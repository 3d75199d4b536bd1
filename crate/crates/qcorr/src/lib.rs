//! Numerical toolkit for quantum correlation measures at desk-scale
//! dimensions.
//!
//! The crate evaluates measurement- and ensemble-optimization measures
//! (classical correlation, discord, entanglement of formation, relative
//! entropy of entanglement, squashed-entanglement upper bounds, constrained
//! Holevo capacity), detects zero-discord states in polynomial time, compiles
//! promise-problem instances between separability, entanglement-of-formation,
//! discord and Holevo-capacity form, and packages identity/inequality checks
//! as reproducible verification suites.
//!
//! All optimization-based values are certified one-sided bounds: the reported
//! number is always achieved by the returned certificate, never an exactness
//! claim.

pub mod error;
pub mod exec;
pub mod io;
pub mod measurements;
pub mod classicality;
pub mod measures;
pub mod reductions;
pub mod suites;
pub mod optimize;
pub mod qcore;

pub use error::{Error, Result};
