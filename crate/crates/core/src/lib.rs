pub mod analysis;
pub mod cfrac;
pub mod diagnostics;
pub mod error;
pub mod residues;
pub mod signal;
pub mod spectral;

pub use error::{PadeError, Result};
