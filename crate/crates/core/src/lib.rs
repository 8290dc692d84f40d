pub mod analysis;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod linearization;
pub mod radial;
pub mod torus;

pub use error::{Error, Result};
