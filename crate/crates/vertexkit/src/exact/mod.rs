//! Exact arithmetic substrate: rationals, parametric polynomials, truncated
//! Laurent windows, and dense rational linear algebra.

pub mod linalg;
pub mod poly;
pub mod rational;
pub mod window;

pub use linalg::{in_span, reduce_against, span_basis, QMatrix};
pub use poly::{ParamPoly, Symbol, SYMBOLS};
pub use rational::{binomial, factorial, rat, rat_int, Rational};
pub use window::{
    invert_unit_series, iota_wz, iota_zw, mul_with, truncated_exp, window_mul, zw_pow, Coeff,
    LaurentWindow, VarSet, Window, WindowError, EXACT,
};
