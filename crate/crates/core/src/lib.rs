//! Simulation core for generating two-atom qutrit entanglement across a
//! cavity-fiber-cavity link with an invariant-based shortcut to adiabaticity.
//!
//! - [`model`]: truncated Hilbert space, basis enumeration, elementary operators.
//! - [`hamiltonians`]: laser and cavity-fiber couplings, Zeno dark subspace,
//!   projected effective Hamiltonians.
//! - [`pulse`]: Lewis-Riesenfeld invariant, auxiliary angles, pulse inversion,
//!   closed-form fidelity and phases.
//! - [`dynamics`]: RK4 Schrödinger and Lindblad integrators, fidelities.
//!
//! Units are `hbar = 1`; all frequencies and rates share the scale of `g`.

pub mod dynamics;
pub mod error;
pub mod hamiltonians;
pub mod model;
pub mod pulse;

pub use error::{Error, Result};
