pub mod arithmetic;
pub mod closed_forms;
pub mod error;
pub mod special;
pub mod spectral;
pub mod transforms;
pub mod zeta_line;

pub use error::{Error, Result};
