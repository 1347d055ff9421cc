//! Construction and checking of self-testing strategies for real projective
//! measurements.

pub mod certify;
pub mod config;
pub mod error;
pub mod io;
pub mod jordan;
pub mod known_instances;
pub mod matrix;
pub mod posthoc;
pub mod simplex;
pub mod span;
pub mod strategy;

pub use config::{Config, SolverOptions, Tolerances};
pub use error::{Error, Result};
