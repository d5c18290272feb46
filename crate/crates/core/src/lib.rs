pub mod ballot;
pub mod cli;
pub mod error;
pub mod hypercube;
pub mod numerics;
pub mod simulator;

pub use error::{Error, Result};
