//! Generalized quantum measurements on two-level atoms in cavity QED.
//!
//! This crate implements two non-projective measurements as abstract
//! probability operator measures (POMs) and as compiled cavity-QED pulse
//! sequences:
//!
//! - optimal unambiguous discrimination of two non-orthogonal qubit states
//!   (the IDP measurement), realized as a projective measurement in an
//!   extended three-level space ([`idp`]);
//! - the collective square-root measurement that decodes length-two trine
//!   codewords with a superadditive coding gain ([`superadd`]).
//!
//! The gate set is the experimentally available one: resonant Ramsey pulses
//! on single atoms, two-level couplings inside a three-level atom, and
//! detuned two-atom Tavis-Cummings interactions ([`pulses`]). Detection
//! misidentification and inter-atom delay imperfections, together with the
//! parameter sweeps they induce, live in [`imperfect`]. Everything rests on
//! a small dense complex linear-algebra layer ([`qmat`]) and a POM framework
//! ([`pom`]).
//!
//! [`verify`] runs the full battery of reference checks and reports each
//! measured value against its tabulated expectation.

pub mod idp;
pub mod imperfect;
pub mod pom;
pub mod pulses;
pub mod qmat;
pub mod superadd;
pub mod verify;

mod error;

pub use error::{Error, Result};

/// Default tolerance for analytic identities that involve no eigensolver.
pub const TOL_ANALYTIC: f64 = 1e-9;
/// Default tolerance for quantities that pass through an eigensolver.
pub const TOL_EIGEN: f64 = 1e-6;
/// Positivity tolerance for POM effects and density operators.
pub const TOL_POSITIVE: f64 = 1e-10;
/// Completeness tolerance for POMs (max entry of the summed-effect defect).
pub const TOL_COMPLETE: f64 = 1e-10;
/// Largest Hilbert-space dimension a tensor product may produce.
pub const MAX_DIM: usize = 16;
