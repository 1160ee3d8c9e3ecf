//! Hollow vortex equilibria, minimal graphs bounded by horizontal symmetry curves, and the maps between them.

pub mod builder;
pub mod checks;
pub mod cli;
pub mod configurations;
pub mod correspondence;
pub mod error;
pub mod io;
pub mod numeric;
pub mod parallel;
pub mod weierstrass;

pub use error::{Error, Result};
pub use num_complex::Complex64;
