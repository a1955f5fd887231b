pub mod basis1d;
pub mod error;
pub mod index_sets;
pub mod measurement;
pub mod recovery;
pub mod reference;
pub mod rng;
pub mod scalar;
pub mod solver;
pub mod tensor;

pub use error::{Error, Result};
