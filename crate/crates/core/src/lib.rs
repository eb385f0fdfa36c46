//! Exact arithmetic for convergent configurations on `M_{0,N}`, the leading
//! coefficients of their cellular integrals, and the modular forms and
//! supercongruences attached to them.

pub mod arith;
pub mod catalog;
pub mod configurations;
pub mod congruences;
pub mod ctengine;
pub mod error;
pub mod ffhyper;
pub mod modforms;
pub mod recfit;
pub mod sequences;

pub use error::{Error, Result};
