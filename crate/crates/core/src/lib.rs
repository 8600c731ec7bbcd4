//! Spectral harmonic analysis on the quaternionic unit sphere `S^{4n-1}`.

pub mod cli;
pub mod diffops;
pub mod dimension;
pub mod error;
pub mod kernel;
pub mod measure;
pub mod poly;
pub mod quat;
pub mod spectral;

pub use error::{Error, Result};
