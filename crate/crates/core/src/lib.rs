pub mod error;
pub mod extrapolate;
pub mod kernel;
pub mod lu;
pub mod oracle;
pub mod reference;
pub mod run;
pub mod solver;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
