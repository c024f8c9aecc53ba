//! Multi-fidelity deep active learning for PDE surrogates.
//!
//! The crate trains a latent-variable surrogate jointly over several
//! fidelity levels of a simulator, scores candidate simulations by the
//! information their outcome would carry about the highest-fidelity
//! latent state per unit cost, and runs a budget-constrained active
//! learning loop on top of built-in finite-difference heat and Poisson
//! solvers.

pub mod acquisition;
pub mod active;
pub mod baselines;
pub mod error;
pub mod gaussian;
pub mod harness;
pub mod model;
pub mod nn;
pub mod pde;
pub mod tape;

pub use error::{Error, Result};
pub use gaussian::{DiagGaussian, VAR_FLOOR};
