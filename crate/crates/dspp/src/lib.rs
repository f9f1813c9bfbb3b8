//! Conditional jump-time distributions of doubly stochastic Poisson processes.

pub mod bell;
pub mod error;
pub mod hazard_models;
pub mod malliavin_rec;
pub mod mc_oracle;
pub mod numerics;
pub mod survival_bell;

pub use error::{Error, Result};
