//! Exact-arithmetic workbench for finite-set sum-product experiments.
//!
//! Everything here computes over exact rationals: Minkowski-style pairwise
//! and k-fold set operations, ratio-of-differences sets, a small expression
//! DSL, named expander constructions, exact and asymptotic growth-bound
//! checkers, slope-cluster machinery over the point set A x A, and extremal
//! set search. Results never depend on floating point except in explicitly
//! report-only ratio fields.
//!
//! Determinism contract: for fixed inputs, budget, and seeds, every public
//! operation returns identical results regardless of how many worker threads
//! the process uses.

pub mod bounds;
pub mod expanders;
pub mod expr;
pub mod finset;
pub mod numeric;
pub mod search;
pub mod slopes;

pub use finset::{Budget, FiniteSet};
pub use numeric::Rational;
