pub mod error;
pub mod exact_linalg;
pub mod numerics;
pub mod polytope;
pub mod quadric_config;
pub mod reduction;
pub mod report;
pub mod torus_actions;

pub use error::{Error, Result};
