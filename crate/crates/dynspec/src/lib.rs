//! Certified computations for subshifts of finite type, regular Cantor sets,
//! fractal dimension bounds, dynamical Markov and Lagrange spectra, and sums
//! and images of Cantor sets.

pub mod cantor;
pub mod dimension;
pub mod error;
pub mod horseshoe;
pub mod numeric;
pub mod spectra;
pub mod sumsets;
pub mod symbolic;

pub use error::{Error, Result};
