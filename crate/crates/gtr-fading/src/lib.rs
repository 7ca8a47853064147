pub mod error;
pub mod mcsim;
pub mod models;
pub mod perf;
pub mod quad;
pub mod specfun;

#[cfg(test)]
mod oracles;

pub use error::{Error, Result};
