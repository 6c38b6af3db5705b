//! Stochastic-geometry analysis of spectrum sharing between LEO satellite
//! networks and terrestrial cellular networks.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod antenna;
pub mod config;
pub mod error;
pub mod fading;
pub mod geometry;
pub mod montecarlo;
pub mod quadrature;
pub mod scenario;
pub mod special;
pub mod sweep;

pub use error::{Error, Result};
