//! Exact parabolic Chern invariants on blown-up surfaces.

pub mod chern;
pub mod cli;
pub mod elemtrans;
pub mod error;
pub mod localize;
pub mod minimize;
pub mod model;
pub mod parastruct;
pub mod rational;
pub mod surface;
pub mod testgen;

pub use error::{Error, Result};
pub use rational::Q;
