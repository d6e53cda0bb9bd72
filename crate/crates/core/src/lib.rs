//! Credit default scoring with calibrated probabilities.
//!
//! The crate covers the whole pipeline: preparing the credit table
//! ([`data`]), training a class-weighted logistic regression or a
//! three-hidden-layer network ([`models`]), recalibrating predicted
//! probabilities with Platt scaling or constrained SURE minimization
//! ([`calibration`]), and measuring discrimination and calibration quality
//! ([`metrics`]).

pub mod calibration;
pub mod data;
mod error;
pub mod io;
pub mod metrics;
pub mod models;
pub mod pipeline;

pub use error::{Error, Result};
