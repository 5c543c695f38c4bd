//! Anisotropic mixed-norm analysis on periodic grids.

pub mod cli;
pub mod error;
pub mod exponent;
pub mod families;
pub mod field;
pub mod fit;
pub mod gn_algebra;
pub mod littlewood_paley;
pub mod maximal;
pub mod mixed_norm;
pub mod ns;
pub mod report;
pub mod spectral;
pub mod verifier;

pub use error::{Error, Result};
pub use exponent::{Exponent, ExponentVec, Rational};
pub use field::{GridSpec, RealField, SpectralField};
