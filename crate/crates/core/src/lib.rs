pub mod cones;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod mapcones;
pub mod matmap;
pub mod random;
pub mod states;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
