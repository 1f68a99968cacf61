pub mod convex;
pub mod error;
pub mod fuzzy;
pub mod harness;
pub mod random;
pub mod walk;

pub use error::{Error, Result};
