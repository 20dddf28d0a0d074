pub mod cli;
pub mod dirichlet;
pub mod dispersion;
pub mod error;
pub mod etalon;
pub mod field;
pub mod hardy;
pub mod matching;
pub mod quadrature;
pub mod series;
pub mod spectral;

pub use error::{Error, Result};
