pub mod abstraction;
pub mod cli;
pub mod error;
pub mod graph;
pub mod identifiability;
pub mod network;
pub mod random;
pub mod ratfun;
pub mod transform;

pub use error::{Error, Result};
