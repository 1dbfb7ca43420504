//! Delayed IS-LM business-cycle model.
//!
//! The crate computes the positive equilibrium, the linearization with a
//! delayed income argument, delay-dependent stability and the critical
//! delay, the Hopf normal form at the crossing, and integrates the full
//! delayed system by the method of steps.

pub mod analysis;
pub mod cubic;
pub mod dde_sim;
pub mod error;
pub mod kv;
pub mod linalg;
pub mod linearization;
pub mod model;
pub mod normal_form;
pub mod stability;
pub mod waveform;

pub use analysis::{analyze, Analysis};
pub use error::{Error, Result};
pub use linearization::{char_coeffs, linearize, CharCoeffs, CoeffForm, LinearPair};
pub use model::{equilibrium, taylor_coefficients, Equilibrium, ModelParams, ParamValues, State, TaylorCoeffs};
