//! Phase-space distributions of a q-deformed harmonic oscillator.
//!
//! The Wigner and Husimi functions of the stationary states are evaluated
//! from closed forms built on basic hypergeometric series, and every closed
//! form has an independent quadrature oracle in [`quadrature`].
//!
//! Layering, bottom up:
//!
//! - [`qseries`]: q-Pochhammer symbols, q-binomials, `rφs` evaluation
//! - [`polynomials`]: Rogers-Szegő, Stieltjes-Wigert, Al-Salam-Chihara,
//!   Hermite and Laguerre
//! - [`oscillator`]: model parameters, wavefunctions, spectrum
//! - [`phasespace`]: Wigner and Husimi closed forms, moments, limits
//! - [`quadrature`]: adaptive Gauss-Kronrod integration and the oracles

pub(crate) mod dd;
pub mod error;
pub mod oscillator;
pub mod phasespace;
pub mod polynomials;
pub mod qseries;
pub mod quadrature;

pub use error::{Error, Result};
pub use oscillator::{ModelParams, QuantumState};
pub use phasespace::{PhasePoint, WignerForm};
pub use qseries::{LogComplex, QBase, SeriesSpec};
