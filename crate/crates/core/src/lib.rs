//! Phase-space toolkit for qudits of odd Hilbert-space dimension `d`.
//!
//! The crate provides the discrete Weyl-Heisenberg operator algebra
//! (displacements and reflections on the `d × d` phase-space lattice), the
//! chord and Wigner representations of operators and states, the continuous
//! Bargmann and Husimi representations on the unit torus together with the
//! stellar (zero-constellation) representation of pure states, phase-space
//! localization measures, analysis of the order-3 Zauner symmetry and its
//! associated Harper-type Hamiltonian eigenbasis, and a seeded multi-start
//! numerical search for SIC-POVM fiducial states.
//!
//! All operators are materialized as dense `d × d` complex matrices; the
//! intended range is small odd `d` (the SIC catalogs stop at `d = 67`), where
//! the naive dense cost is negligible and clarity wins.

pub mod bargmann;
pub mod dim;
pub mod error;
pub mod io;
pub mod localization;
pub mod op;
pub mod reps;
pub mod search;
pub mod weyl;
pub mod zauner;

pub use dim::{Dim, PhasePoint, PhaseRoots};
pub use error::{Error, Result};
pub use op::{DenseOp, PureState};

/// Version string embedded in all JSON exports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
