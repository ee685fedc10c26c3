//! Polynomials and dense linear algebra over GF(2).
//!
//! Coefficients are never stored: a polynomial is a set of monomials, and
//! addition is symmetric difference.

mod binom;
mod matrix;
mod monomial;
mod poly;
mod span;

pub use binom::binom_mod2;
pub use matrix::{kernel_and_rank, BitVec, GF2Matrix};
pub use monomial::{Monomial, MAX_VARS};
pub use poly::Poly;
pub use span::{solve_in_span, GradedSubspace, Insert, PolySpan};
