pub mod error;
pub mod exec;
pub mod quantum;

pub use error::{Error, Result};
pub mod circuit;
pub mod qpce;
pub mod keys;
pub mod protocol;
pub mod experiments;
