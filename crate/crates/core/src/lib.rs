//! Entropic uncertainty with quantum memory for a pair of uniformly
//! accelerated two-level detectors in a common thermal (Unruh) bath.
//!
//! The stationary detector state is an X-state fixed by the detector gap,
//! the Unruh temperature and the conserved correlation Delta0. On top of it
//! the crate evaluates the uncertainty sum for Pauli X/Z measurements with
//! the partner detector as memory, its lower bound, quantum discord and the
//! minimal missing information, and checks the stationary state against an
//! explicit master-equation generator.

// comparisons are written as !(x > lo) so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod correlations;
pub mod error;
pub mod eur;
pub mod lindblad;
pub mod optimize;
pub mod pipeline;
pub mod qstate;
pub mod report;
pub mod stationary;
pub mod verify;

pub use correlations::{CorrelationPoint, MissingInformation, OptimizerReport};
pub use error::{Error, Result};
pub use eur::EurPoint;
pub use lindblad::{KossakowskiParams, Liouvillian, Trajectory};
pub use pipeline::{SweepConfig, SweepRow};
pub use qstate::{BlochProjector, PauliBasis, QubitOperator, Subsystem, TwoQubitOperator};
pub use stationary::{BlochComponents, InitialCorrelation, UnruhParams, XState};
