//! Entanglement thresholds of doubly-parametric optical-microwave
//! transducers (DPTs), modeled as two-mode bosonic Gaussian channels.
//!
//! The crate decides, from five dimensionless device parameters plus
//! external losses, whether a transducer is separable, capable of bound
//! entanglement, or capable of distillable optical-microwave entanglement,
//! and cross-validates every closed-form threshold against independent
//! numerical procedures.

pub mod analysis;
pub mod error;
pub mod gaussian;
pub mod model;
pub mod verify;

pub use error::{Error, Result};
