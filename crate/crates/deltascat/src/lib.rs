//! Spectra, threshold classification and low-energy wave operators for two-dimensional
//! Schrödinger operators with finitely many point interactions.

pub mod classifier;
pub mod cli;
pub mod dd;
pub mod error;
pub mod fit;
pub mod ladder;
pub mod linalg;
pub mod matrix;
pub mod operator;
pub mod quad;
pub mod scalar;
pub mod search;
pub mod spectral;
pub mod specfun;
pub mod waveop;

pub use error::{Error, Result};
