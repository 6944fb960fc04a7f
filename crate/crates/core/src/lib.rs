pub mod circuit;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod hashes;
pub mod grover;
pub mod oracles;
pub mod sim;

pub use error::{Error, Result};
