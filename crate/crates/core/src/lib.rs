//! Numerical verification of pluriharmonic mappings `f = h + conj(g)` on the
//! unit polydisk in `ℂⁿ`.
//!
//! The crate provides a truncated power-series model ([`series`]), the class
//! functional and its supremum estimates ([`functionals`]), pointwise and
//! coefficient criteria ([`criteria`]), pairwise injectivity scans
//! ([`univalence`]) and an independent Cauchy-integral coefficient oracle
//! ([`extraction`]). The [`cli`] module drives all of them from map files.

pub mod cli;
pub mod criteria;
pub mod error;
pub mod extraction;
pub mod fixtures;
pub mod functionals;
pub mod multiindex;
pub mod sampling;
pub mod series;
pub mod univalence;

pub use error::{Error, Result};
pub use num_complex::Complex64;
