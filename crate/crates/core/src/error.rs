use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A non-terminating series was requested outside its disk of convergence.
    #[error("series does not converge: {0}")]
    Convergence(String),

    /// A denominator Pochhammer vanished before the series terminated.
    #[error("pole in denominator parameter {index} at term {term}")]
    Pole { index: usize, term: usize },

    /// Adaptive quadrature ran out of subdivisions. `estimate` is the best value reached.
    #[error("quadrature accuracy not reached: estimate {estimate}, error {error:e} > tolerance {tolerance:e}")]
    AccuracyNotReached {
        estimate: Complex64,
        error: f64,
        tolerance: f64,
    },

    /// A closed form violated one of its structural guarantees (realness,
    /// nonnegativity, finiteness). Indicates a bug, not bad input.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
