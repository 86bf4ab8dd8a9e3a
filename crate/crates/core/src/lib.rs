//! Semiclassical dynamics of a one-dimensional Schrödinger operator near a
//! hyperbolic saddle of the classical Hamiltonian.
//!
//! The crate is organised bottom-up: [`potential`] holds the classical
//! mechanics, [`model_spectrum`] the singular Bohr–Sommerfeld model of the
//! eigenvalues near the saddle energy, [`direct_spectrum`] an independent
//! finite-difference diagonalisation, [`wavepacket`] the localized initial
//! states, [`dynamics`] the autocorrelation functions and their approximants,
//! and [`gauss`] the exact arithmetic behind fractional revivals.

pub mod direct_spectrum;
pub mod dynamics;
mod error;
pub mod fit;
pub mod gauss;
pub mod model_spectrum;
pub mod potential;
pub mod special;
pub mod wavepacket;

pub use error::{Error, Result};
