//! Time-optimal ("brachistochrone") control of a three-qubit Ising chain
//! whose middle qubit is driven by a precessing magnetic field, together
//! with the 2-tangle and 3-tangle of the evolving state.
//!
//! Everything is expressed in rescaled units: couplings relative to `J12`,
//! time `tau = J12 * t`, energy `omega_hat = omega / J12`.
//!
//! The crate is `no_std` (with `alloc`); the `std` feature only switches the
//! float backend from `libm` to the platform implementation.

#![no_std]

extern crate alloc;
#[cfg(test)]
#[macro_use]
extern crate std;

mod error;
pub mod linalg;
pub mod model;
pub mod optimal;
pub mod oracle;
pub mod propagator;
pub mod tangle;

pub use error::{Error, Result};
pub use linalg::{Mat8, Unitary8};
pub use model::{ChainParams, ControlField, FieldParams, ModeConstants, ModeFunctions};
pub use optimal::{B2Branch, Diagnostic, OptimalPlan, PlanBranch, Thresholds};
pub use propagator::{PureState3, StateClass};
pub use tangle::{Qubit, TanglePair};
