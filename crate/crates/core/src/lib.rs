pub mod error;
pub mod numerics;
pub mod besov_drift;
pub mod density_weak_error;
pub mod euler_sim;
pub mod inequality_lab;
pub mod harness;
pub mod stable_kernel;

pub use error::{Error, Result};
