//! Exact arithmetic: rationals, univariate polynomials in the degree
//! variable, and sparse graded polynomials over formal Chern symbols.

mod graded;
mod rational;
mod unipoly;

pub use graded::{Exponents, GradedPoly, IntegerPoly, Symbol, SymbolId, SymbolTable, Truncation};
pub use rational::{binomial, factorial, ParseRationalError, Rational};
pub use unipoly::{lagrange_interpolate, UniPoly};
