pub mod codec;
pub mod error;
pub mod harness;
pub mod prob;
pub mod region;
pub mod sample;
pub mod typicality;

pub use error::{Error, Result};
