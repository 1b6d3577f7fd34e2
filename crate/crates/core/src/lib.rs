//! Hecke operators on vector bundles over elliptic curves over finite fields,
//! computed through the elliptic Hall algebra.

pub mod chars;
pub mod curve;
pub mod ehall;
pub mod error;
pub mod heckegraph;
pub mod scalars;
pub mod sheaves;
pub mod symfunc;

pub use error::{HeckeError, Result};
