pub mod config_space;
pub mod divided_diff;
pub mod error;
pub mod exec;
pub mod frames;
pub mod harness;
pub mod linalg;
pub mod operators;
pub mod random;
pub mod wire;

pub use error::{Error, Result};
pub use exec::Exec;
pub use num_complex::Complex64;
