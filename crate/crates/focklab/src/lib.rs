//! focklab: a numerical laboratory for operator-localization diagnostics on
//! the Fock space of entire functions square-integrable against the Gaussian
//! measure on C^n.
//!
//! The crate evaluates closed-form kernel pairings for a catalog of model
//! operators (translations, affine compositions, convolution-type symbols,
//! lacunary-series operators, Toeplitz operators of a measure), checks them
//! against direct quadrature, and runs grid diagnostics that locate each
//! operator inside the localization hierarchy: weak localization, power decay
//! of the reduced kernel, Gaussian off-diagonal decay, and finiteness of the
//! p-localization integrals.
//!
//! Everything is computed in the log domain ([`logc::LogComplex`]) because the
//! quantities of interest span hundreds of orders of magnitude; a pairing at
//! separation 12 is already e^{-72}.

pub mod cmatrix;
pub mod error;
pub mod fock;
pub mod localization;
pub mod logc;
pub mod operators;
pub mod point;
pub mod quad;
pub mod symbols;

pub use error::{LabError, Result};
pub use logc::{LogComplex, LogSum};
pub use point::CPoint;
