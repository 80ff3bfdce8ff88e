//! Integrable circular billiards with a repelling Hooke potential, glued into
//! n-sheeted billiard books.
//!
//! The crate propagates trajectories exactly (the flow between reflections is
//! linear-hyperbolic), evaluates the momentum map `(H, F)` and its bifurcation
//! diagram, certifies the focus-focus equilibrium at the origin, and measures
//! the Hamiltonian monodromy around the focus-focus value by continuing the
//! angular-advance function along a loop in the `(h, f)` plane.

pub mod dynamics;
pub mod error;
pub mod io;
pub mod linearization;
pub mod model;
pub mod momentum;
pub mod monodromy;
pub mod quadrature;

pub use error::{Error, Result};
pub use model::{BookTable, MomentumValue, PhaseState};
