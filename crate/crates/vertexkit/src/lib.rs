//! Exact symbolic computation for finitely generated modules over a
//! polynomial translation operator, Lie conformal algebra structure tables,
//! conformal-linear matrix calculus, central-extension cohomology, and finite
//! vertex algebra multiplication tables.
//!
//! Everything is computed over the rationals with explicit truncation
//! windows; no floating point is used anywhere. Checks either certify an
//! identity on a stated window, exhibit a concrete counterexample
//! coefficient, or report that the window was too small to decide.

pub mod cdmod;
pub mod cohom;
pub mod exact;
pub mod gcmat;
pub mod lca;
pub mod va;

pub use cdmod::{FgModule, Gen, ModElement, QSpace, Submodule};
pub use exact::{ParamPoly, Rational, Symbol};
pub use lca::ConformalAlgebra;
