//! Stability conditions on the Calabi-Yau-`n` category of the A2 quiver.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: the Grothendieck group, Euler pairing and twist matrices.
//! * [`braid`]: the braid group on three strands and autoequivalence groups.
//! * [`tilting`]: reachable hearts, simple tilts and exchange graphs.
//! * [`quadrature`], [`periods`]: twisted and exponential period integrals,
//!   ODE residuals and monodromy.
//! * [`schwarz`]: the regions `R_n` and the conformal maps `f_n`.
//! * [`stability`]: stability conditions, the fundamental domain and the
//!   correspondence with the unfolding space `(a, b)`.
//! * [`render`]: SVG drawings of exchange graphs and regions.

pub mod braid;
pub mod error;
pub mod lattice;
pub mod level;
pub mod periods;
pub mod quadrature;
pub mod render;
pub mod schwarz;
pub mod stability;
pub mod tilting;

pub use error::{Error, Result};
pub use level::Level;
