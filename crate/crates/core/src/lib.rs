//! Numerical laboratory for Gaussian multiplicative chaos (GMC) on the unit
//! interval.
//!
//! The crate samples the exactly scale-invariant log-correlated field on
//! dyadic grids ([`logfield`]), exponentiates it into subcritical or critical
//! (Seneta–Heyde renormalised) chaos measures ([`chaos`]), turns pairs of
//! measures into random welding homeomorphisms ([`welding`]), and provides the
//! dyadic multifractal and potential-theoretic estimators ([`fractal`],
//! [`capacity`]) used by the verification suites in [`lab`].
//!
//! Every random quantity is a deterministic function of a 64-bit seed, and
//! replica seeds are derived from a master seed with [`rng::derive_seed`], so
//! experiments reproduce bit-for-bit regardless of thread count.

pub mod capacity;
pub mod chaos;
pub mod error;
pub mod fractal;
pub mod lab;
pub mod logfield;
mod numeric;
pub mod rng;
pub mod welding;

pub use error::{Error, Result};
