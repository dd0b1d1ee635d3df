pub mod bounds;
pub mod coloring;
pub mod entropy_net;
pub mod error;
pub mod instance;
pub mod mirror;
pub mod linalg;
pub mod measure;
pub mod rng;

pub use error::{Error, Result};
pub use linalg::{Exponent, Spectrum, SymMatrix};
pub use instance::Instance;
