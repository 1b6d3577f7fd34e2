//! Exact scalar arithmetic: rational functions in `v` and their cyclotomic
//! extensions.

mod cyclo;
mod qpoly;
mod ratfunc;

pub use cyclo::{cyclotomic_poly, CycloScalar};
pub use qpoly::QPoly;
pub use ratfunc::{c_coeff, qint, vinv_minus_v, RationalFunctionV};
