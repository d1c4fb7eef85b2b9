//! Steklov spectra of warped products `[0, L] x S^{n-1}` with two boundary spheres.

pub mod annulus;
pub mod bounds;
pub mod error;
pub mod experiments;
pub mod modes;
pub mod profiles;
pub mod roots;
pub mod solver;
pub mod spectrum;

pub use error::{Error, Result};
pub use modes::Dim;
