//! Simulation and analysis of a constantly driven four-level emitter (biexciton
//! cascade) coupled to two degenerate, orthogonally polarized cavity modes.
//!
//! The pipeline is: assemble the rotating-frame Liouvillian ([`lindblad`]),
//! solve for the steady state, evaluate time-averaged two-photon correlations
//! with the quantum regression theorem ([`correlations`]), normalize them into
//! a two-photon density matrix and compute the Wootters concurrence
//! ([`entanglement`]). The [`model`] and [`swt`] modules provide the
//! laser-dressed-state analytics used to interpret the numerics.
//!
//! All energies are in units of the emitter-cavity coupling `g`, all times in
//! units of `ħ/g`.

pub mod correlations;
pub mod entanglement;
pub mod error;
pub mod hilbert;
pub mod lindblad;
pub mod model;
pub mod sparse;
pub mod swt;
pub mod units;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// Shorthand for complex numbers throughout the crate.
pub type C64 = Complex64;
